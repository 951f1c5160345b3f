#include "bellcool/device.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "bellcool/lindblad.hpp"
#include "bellcool/units.hpp"

namespace bellcool {

namespace {

const Complex kI(0.0, 1.0);

// Index of the eigenvector with the largest overlap against `guess`.
int closest_level(const Eigen::SelfAdjointEigenSolver<Matrix>& es, const Vector& guess) {
  int best = 0;
  double best_ov = -1.0;
  for (int k = 0; k < es.eigenvectors().cols(); ++k) {
    double ov = std::norm(guess.dot(es.eigenvectors().col(k)));
    if (ov > best_ov) {
      best_ov = ov;
      best = k;
    }
  }
  return best;
}

}  // namespace

bool DeviceParams::validate() const {
  auto nonneg = [](double v, const char* name) {
    if (v < 0.0) throw std::invalid_argument(std::string("DeviceParams: ") + name + " must be >= 0");
  };
  nonneg(kappa_plus, "kappa_plus");
  nonneg(kappa_minus, "kappa_minus");
  nonneg(kappa_in_A, "kappa_in_A");
  nonneg(kappa_in_B, "kappa_in_B");
  nonneg(kappa_out, "kappa_out");
  nonneg(gamma_1, "gamma_1");
  nonneg(gamma_phi, "gamma_phi");
  if (g_A <= 0.0 || g_B <= 0.0 || J <= 0.0)
    throw std::invalid_argument("DeviceParams: g_A, g_B, J must be > 0 in the coupled regime");
  if (omega_c <= 0.0 || omega_q_A <= 0.0 || omega_q_B <= 0.0)
    throw std::invalid_argument("DeviceParams: frequencies must be > 0");
  // dispersive validity: |omega_q - omega_c_pm| >> g
  const double dp = std::abs(omega_q_mean() - (omega_c - J));
  const double dm = std::abs(omega_q_mean() - (omega_c + J));
  const double g = std::max(g_A, g_B);
  return std::min(dp, dm) / g >= 5.0;
}

HilbertSpace device_space(int n_max) {
  if (n_max < 1) throw std::invalid_argument("device_space: n_max must be >= 1");
  const int d = n_max + 1;
  return HilbertSpace({d, d, 2, 2}, {"cavity A", "cavity B", "qubit A", "qubit B"});
}

Operator bare_hamiltonian(const DeviceParams& dev, int n_max) {
  const HilbertSpace space = device_space(n_max);
  const Operator aA = destroy_on(space, 0);
  const Operator aB = destroy_on(space, 1);
  const Operator adA = aA.adjoint();
  const Operator adB = aB.adjoint();

  Matrix h = Matrix::Zero(space.total_dim(), space.total_dim());
  // qubit terms, ground state at zero energy
  for (int q = 0; q < 2; ++q) {
    const double wq = (q == 0) ? dev.omega_q_A : dev.omega_q_B;
    const Matrix nq = 0.5 * (pauli_on(space, PauliAxis::Z, 2 + q).matrix() +
                             Matrix::Identity(space.total_dim(), space.total_dim()));
    h += wq * nq;
  }
  // cavity terms; the hopping sign makes the symmetric mode (a_A + a_B)/sqrt(2)
  // the lower-frequency one, omega_c - J
  h += dev.omega_c * (adA.matrix() * aA.matrix() + adB.matrix() * aB.matrix());
  h += -dev.J * (aA.matrix() * adB.matrix() + adA.matrix() * aB.matrix());
  // Jaynes-Cummings couplings
  const Matrix spA = pauli_on(space, PauliAxis::Plus, 2).matrix();
  const Matrix smA = pauli_on(space, PauliAxis::Minus, 2).matrix();
  const Matrix spB = pauli_on(space, PauliAxis::Plus, 3).matrix();
  const Matrix smB = pauli_on(space, PauliAxis::Minus, 3).matrix();
  h += dev.g_A * (spA * aA.matrix() + smA * adA.matrix());
  h += dev.g_B * (spB * aB.matrix() + smB * adB.matrix());

  Operator H(space, std::move(h));
  if (!H.is_hermitian(1e-12))
    throw std::logic_error("bare_hamiltonian: non-Hermitian result");
  return H;
}

Operator excitation_number(const HilbertSpace& space) {
  const int n = space.total_dim();
  Matrix m = Matrix::Zero(n, n);
  m += destroy_on(space, 0).adjoint().matrix() * destroy_on(space, 0).matrix();
  m += destroy_on(space, 1).adjoint().matrix() * destroy_on(space, 1).matrix();
  for (int q = 2; q < 4; ++q)
    m += 0.5 * (pauli_on(space, PauliAxis::Z, q).matrix() + Matrix::Identity(n, n));
  return Operator(space, std::move(m));
}

Operator build_hamiltonian(const DeviceParams& dev, const DriveParams& drv,
                           Frame frame, int n_max) {
  dev.validate();
  Operator H = bare_hamiltonian(dev, n_max);
  const HilbertSpace& space = H.space();

  if (frame == Frame::Lab) {
    // static part only; the oscillating drive is supplied by
    // lab_frame_hamiltonian for explicit time-dependent evolution
    return H;
  }

  if (drv.omega_d <= 0.0)
    throw std::invalid_argument("build_hamiltonian: drive-rotating frame needs omega_d > 0");

  Matrix h = H.matrix() - drv.omega_d * excitation_number(space).matrix();
  const Operator aA = destroy_on(space, 0);
  const Operator aB = destroy_on(space, 1);
  h += drv.eps_A * (std::exp(-kI * drv.phi_A) * aA.adjoint().matrix() +
                    std::exp(kI * drv.phi_A) * aA.matrix());
  h += drv.eps_B * (std::exp(-kI * drv.phi_B) * aB.adjoint().matrix() +
                    std::exp(kI * drv.phi_B) * aB.matrix());

  Operator out(space, std::move(h));
  if (!out.is_hermitian(1e-12))
    throw std::logic_error("build_hamiltonian: non-Hermitian result");
  return out;
}

std::function<Matrix(double)> lab_frame_hamiltonian(const DeviceParams& dev,
                                                    const DriveParams& drv, int n_max) {
  const Operator H0 = bare_hamiltonian(dev, n_max);
  const HilbertSpace space = H0.space();
  struct DriveOps {
    Matrix x, p;
    double eps, phi;
  };
  std::vector<DriveOps> drives;
  for (int c = 0; c < 2; ++c) {
    const Operator a = destroy_on(space, c);
    DriveOps d;
    d.x = a.matrix() + a.adjoint().matrix();
    d.p = kI * (a.matrix() - a.adjoint().matrix());
    d.eps = (c == 0) ? drv.eps_A : drv.eps_B;
    d.phi = (c == 0) ? drv.phi_A : drv.phi_B;
    drives.push_back(std::move(d));
  }
  const double omega_d = drv.omega_d;
  Matrix base = H0.matrix();
  return [base, drives, omega_d](double t_us) {
    Matrix h = base;
    for (const auto& d : drives) {
      const double theta = kAngularPerGHzUs * omega_d * t_us + d.phi;
      h += d.eps * (std::cos(theta) * d.x + std::sin(theta) * d.p);
    }
    return h;
  };
}

HybridizedModes hybridized_modes(const DeviceParams& dev, int n_max) {
  if (dev.J < 0.0) throw std::invalid_argument("hybridized_modes: J must be >= 0");
  const HilbertSpace space = device_space(n_max);
  const Operator aA = destroy_on(space, 0);
  const Operator aB = destroy_on(space, 1);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  return HybridizedModes{
      dev.omega_c - dev.J, dev.omega_c + dev.J,
      Operator(space, inv_sqrt2 * (aA.matrix() + aB.matrix())),
      Operator(space, inv_sqrt2 * (aA.matrix() - aB.matrix()))};
}

Vector bell_state_T_minus() {
  Vector v = Vector::Zero(4);
  v(0) = 1.0;
  return v;
}
Vector bell_state_T0() {
  Vector v = Vector::Zero(4);
  v(1) = v(2) = 1.0 / std::sqrt(2.0);
  return v;
}
Vector bell_state_S() {
  Vector v = Vector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}
Vector bell_state_T_plus() {
  Vector v = Vector::Zero(4);
  v(3) = 1.0;
  return v;
}

Vector vacuum_qubit_state(const HilbertSpace& space, const Vector& qubit_state) {
  if (qubit_state.size() != 4)
    throw std::invalid_argument("vacuum_qubit_state: qubit state must be 4-dim");
  Vector v = Vector::Zero(space.total_dim());
  for (int qa = 0; qa < 2; ++qa)
    for (int qb = 0; qb < 2; ++qb)
      v(space.index({0, 0, qa, qb})) = qubit_state(qa * 2 + qb);
  return v;
}

// |n+, n-> x |psi_q> as a normalized full-space vector.
static Vector mode_fock_state(const DeviceParams& dev, const HilbertSpace& space,
                              int n_plus, int n_minus, const Vector& qubit_state) {
  const HybridizedModes modes = hybridized_modes(dev, (space.dim(0) - 1));
  Vector v = vacuum_qubit_state(space, qubit_state);
  for (int k = 0; k < n_plus; ++k) v = modes.a_plus.adjoint().matrix() * v;
  for (int k = 0; k < n_minus; ++k) v = modes.a_minus.adjoint().matrix() * v;
  const double n = v.norm();
  if (n < 1e-12)
    throw std::logic_error("mode_fock_state: truncation too small for requested photons");
  return v / n;
}

CoupledEigensystem coupled_eigensystem(const DeviceParams& dev, int n_max) {
  CoupledEigensystem out;
  out.qubit_states = {bell_state_T_minus(), bell_state_T0(), bell_state_S(),
                      bell_state_T_plus()};

  const double wq = dev.omega_q_mean();
  const double dp = wq - (dev.omega_c - dev.J);
  const double dm = wq - (dev.omega_c + dev.J);
  if (dp == 0.0 || dm == 0.0)
    throw std::domain_error("coupled_eigensystem: qubit resonant with a hybridized mode");
  const double delta = dev.J * dev.g_A * dev.g_B / (dp * dm);
  out.energies = {0.0, wq - delta, wq + delta, 2.0 * wq};

  // exact single-excitation sector of the full Hamiltonian
  const Operator H = bare_hamiltonian(dev, n_max);
  const HilbertSpace& space = H.space();
  const Operator N = excitation_number(space);
  std::vector<int> sector;
  for (int i = 0; i < space.total_dim(); ++i)
    if (std::abs(N.matrix()(i, i).real() - 1.0) < 1e-9) sector.push_back(i);

  Matrix h1(sector.size(), sector.size());
  for (size_t r = 0; r < sector.size(); ++r)
    for (size_t c = 0; c < sector.size(); ++c) h1(r, c) = H.matrix()(sector[r], sector[c]);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h1);

  const Vector t0_full = vacuum_qubit_state(space, bell_state_T0());
  const Vector s_full = vacuum_qubit_state(space, bell_state_S());
  Vector t0_sec(sector.size()), s_sec(sector.size());
  for (size_t r = 0; r < sector.size(); ++r) {
    t0_sec(r) = t0_full(sector[r]);
    s_sec(r) = s_full(sector[r]);
  }

  for (int k = 0; k < h1.rows(); ++k) {
    out.exact_energies.push_back(es.eigenvalues()(k));
    Vector full = Vector::Zero(space.total_dim());
    for (size_t r = 0; r < sector.size(); ++r) full(sector[r]) = es.eigenvectors()(r, k);
    out.exact_vectors.push_back(std::move(full));
    const double ov_t0 = std::norm(t0_sec.dot(es.eigenvectors().col(k)));
    const double ov_s = std::norm(s_sec.dot(es.eigenvectors().col(k)));
    if (ov_t0 > out.overlap_T0) {
      out.overlap_T0 = ov_t0;
      out.exact_T0_energy = es.eigenvalues()(k);
    }
    if (ov_s > out.overlap_S) {
      out.overlap_S = ov_s;
      out.exact_S_energy = es.eigenvalues()(k);
    }
  }
  return out;
}

namespace {

// Energies of the nine levels used by the dispersive analysis, from one
// exact diagonalization: (n_pm = 0 and 1) x (T-, T0, S).
struct LevelTable {
  double e0_tm, e0_t0, e0_s;
  double ep_tm, ep_t0, ep_s;  // one + photon
  double em_tm, em_t0, em_s;  // one - photon
};

LevelTable level_table(const DeviceParams& dev, int n_max) {
  const Operator H = bare_hamiltonian(dev, n_max);
  const HilbertSpace& space = H.space();
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.matrix());

  auto level = [&](int np, int nm, const Vector& q) {
    const Vector guess = mode_fock_state(dev, space, np, nm, q);
    return es.eigenvalues()(closest_level(es, guess));
  };
  LevelTable t;
  t.e0_tm = level(0, 0, bell_state_T_minus());
  t.e0_t0 = level(0, 0, bell_state_T0());
  t.e0_s = level(0, 0, bell_state_S());
  t.ep_tm = level(1, 0, bell_state_T_minus());
  t.ep_t0 = level(1, 0, bell_state_T0());
  t.ep_s = level(1, 0, bell_state_S());
  t.em_tm = level(0, 1, bell_state_T_minus());
  t.em_t0 = level(0, 1, bell_state_T0());
  t.em_s = level(0, 1, bell_state_S());
  return t;
}

}  // namespace

double stark_shift(const DeviceParams& dev, const DriveParams& drv, int n_max) {
  const LevelTable t0 = level_table(dev, n_max);
  const double wq_bar = 0.5 * (t0.e0_t0 + t0.e0_s) - t0.e0_tm;
  if (drv.eps_A == 0.0 && drv.eps_B == 0.0) return wq_bar;
  if (drv.omega_d <= 0.0)
    throw std::invalid_argument("stark_shift: omega_d must be > 0 under drive");

  // semiclassical displacement of the hybridized modes; the displaced frame
  // leaves a static classical Rabi drive on each qubit
  const auto [alpha_p, alpha_m] = mode_amplitudes(dev, drv);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex alpha_A = inv_sqrt2 * (alpha_p + alpha_m);
  const Complex alpha_B = inv_sqrt2 * (alpha_p - alpha_m);

  const HilbertSpace space = device_space(n_max);
  Matrix h = bare_hamiltonian(dev, n_max).matrix() -
             drv.omega_d * excitation_number(space).matrix();
  const Matrix spA = pauli_on(space, PauliAxis::Plus, 2).matrix();
  const Matrix spB = pauli_on(space, PauliAxis::Plus, 3).matrix();
  h += dev.g_A * (alpha_A * spA + std::conj(alpha_A) * spA.adjoint());
  h += dev.g_B * (alpha_B * spB + std::conj(alpha_B) * spB.adjoint());

  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  auto level = [&](int np, int nm, const Vector& q) {
    const Vector guess = mode_fock_state(dev, space, np, nm, q);
    return es.eigenvalues()(closest_level(es, guess));
  };
  const double e_tm = level(0, 0, bell_state_T_minus());
  const double e_t0 = level(0, 0, bell_state_T0());
  const double e_s = level(0, 0, bell_state_S());
  // rotating-frame energies differ by one excitation between the pair and T-
  return 0.5 * (e_t0 + e_s) - e_tm + drv.omega_d;
}

DispersiveParams dispersive_params(const DeviceParams& dev, const DriveParams& drv,
                                   int n_max) {
  DispersiveParams dp;
  dp.omega_c_plus = dev.omega_c - dev.J;
  dp.omega_c_minus = dev.omega_c + dev.J;
  dp.Delta_plus = dev.omega_q_mean() - dp.omega_c_plus;
  dp.Delta_minus = dev.omega_q_mean() - dp.omega_c_minus;
  if (dp.Delta_plus == 0.0 || dp.Delta_minus == 0.0)
    throw std::domain_error("dispersive_params: Delta_pm = 0, dispersive formula invalid");
  dp.delta = dev.J * dev.g_A * dev.g_B / (dp.Delta_plus * dp.Delta_minus);

  const LevelTable t = level_table(dev, n_max);
  dp.delta_exact = 0.5 * (t.e0_s - t.e0_t0);
  dp.omega_q_bar = 0.5 * (t.e0_t0 + t.e0_s) - t.e0_tm;
  dp.omega_c_plus_dressed = t.ep_tm - t.e0_tm;
  dp.omega_c_minus_dressed = t.em_tm - t.e0_tm;
  // cross-Kerr: shift of the mean effective qubit frequency per photon
  dp.chi_plus = 0.5 * ((0.5 * (t.ep_t0 + t.ep_s) - t.ep_tm) - dp.omega_q_bar);
  dp.chi_minus = 0.5 * ((0.5 * (t.em_t0 + t.em_s) - t.em_tm) - dp.omega_q_bar);
  dp.omega_q_dressed = stark_shift(dev, drv, n_max);
  return dp;
}

double drive_frequency(const DispersiveParams& dp, BellTarget target, Branch branch) {
  const double mode = (branch == Branch::Plus) ? dp.omega_c_plus_dressed
                                               : dp.omega_c_minus_dressed;
  const double chi = (branch == Branch::Plus) ? dp.chi_plus : dp.chi_minus;
  const double sign = (target == BellTarget::S) ? 1.0 : -1.0;
  return 0.5 * (mode + (dp.omega_q_dressed + 2.0 * chi) + sign * dp.delta_exact);
}

double drive_frequency(const DeviceParams& dev, BellTarget target, Branch branch,
                       double eps, double phi, int n_max) {
  DriveParams drv = DriveParams::balanced(0.0, eps, phi);
  DispersiveParams dp = dispersive_params(dev, DriveParams{}, n_max);
  double wd = drive_frequency(dp, target, branch);
  if (eps > 0.0) {
    for (int it = 0; it < 3; ++it) {
      drv.omega_d = wd;
      dp.omega_q_dressed = stark_shift(dev, drv, n_max);
      wd = drive_frequency(dp, target, branch);
    }
  }
  return wd;
}

std::string CalibrationResult::summary() const {
  std::ostringstream os;
  os << "calibration: J = " << device.J << " GHz, g = " << device.g_A
     << " GHz, omega_q = " << device.omega_q_A << " GHz ("
     << iterations << " iterations)\n";
  for (const auto& e : report) {
    os << "  " << e.name << ": target " << e.target << " " << e.unit
       << ", achieved " << e.achieved << " " << e.unit << ", residual "
       << e.residual << "\n";
  }
  return os.str();
}

CalibrationResult calibrate(const ReferenceObservables& obs, bool allow_omega_q_shift,
                            int n_max) {
  CalibrationResult result;
  DeviceParams dev;
  dev.omega_c = obs.omega_c;
  dev.omega_q_A = dev.omega_q_B = obs.omega_q;
  dev.kappa_plus = obs.kappa_plus;
  dev.kappa_minus = obs.kappa_minus;

  // closed-form two-step estimate: band difference fixes J up to the
  // cross-Kerr asymmetry, the XY splitting then fixes g
  const double J0 = (obs.band_minus - obs.band_plus) - (obs.chi_minus_mag - obs.chi_plus_mag);
  const double delta_target = 0.5 * obs.two_delta;
  const double dp0 = obs.omega_q - (obs.omega_c - J0);
  const double dm0 = obs.omega_q - (obs.omega_c + J0);
  const double g0 = std::sqrt(delta_target * dp0 * dm0 / J0);
  result.J_initial = J0;
  result.g_initial = g0;

  dev.J = J0;
  dev.g_A = dev.g_B = g0;

  const int nx = allow_omega_q_shift ? 3 : 2;
  Eigen::VectorXd x(nx);
  x(0) = J0;
  x(1) = g0;
  if (nx == 3) x(2) = 0.0;  // common bare-qubit offset

  auto residuals = [&](const Eigen::VectorXd& p) {
    DeviceParams d = dev;
    d.J = p(0);
    d.g_A = d.g_B = p(1);
    if (nx == 3) d.omega_q_A = d.omega_q_B = obs.omega_q + p(2);
    const DispersiveParams disp = dispersive_params(d, DriveParams{}, n_max);
    const double band_p =
        0.5 * (drive_frequency(disp, BellTarget::T0, Branch::Plus) +
               drive_frequency(disp, BellTarget::S, Branch::Plus));
    const double band_m =
        0.5 * (drive_frequency(disp, BellTarget::T0, Branch::Minus) +
               drive_frequency(disp, BellTarget::S, Branch::Minus));
    Eigen::VectorXd r(nx);
    r(0) = 2.0 * disp.delta_exact - obs.two_delta;
    if (nx == 3) {
      r(1) = band_p - obs.band_plus;
      r(2) = band_m - obs.band_minus;
    } else {
      r(1) = (band_m - band_p) - (obs.band_minus - obs.band_plus);
    }
    return r;
  };

  // damped Newton with a finite-difference Jacobian
  Eigen::VectorXd r = residuals(x);
  int it = 0;
  for (; it < 40 && r.norm() > 1e-9; ++it) {
    Eigen::MatrixXd jac(nx, nx);
    for (int j = 0; j < nx; ++j) {
      const double h = std::max(1e-6, 1e-6 * std::abs(x(j)));
      Eigen::VectorXd xp = x;
      xp(j) += h;
      jac.col(j) = (residuals(xp) - r) / h;
    }
    Eigen::VectorXd step = jac.fullPivLu().solve(-r);
    double lambda = 1.0;
    Eigen::VectorXd xn = x + step;
    Eigen::VectorXd rn = residuals(xn);
    while (rn.norm() > r.norm() && lambda > 1e-4) {
      lambda *= 0.5;
      xn = x + lambda * step;
      rn = residuals(xn);
    }
    x = xn;
    r = rn;
    if (x(0) < 0.05 || x(0) > 0.3 || x(1) < 0.02 || x(1) > 0.2 ||
        (nx == 3 && std::abs(x(2)) > 0.1)) {
      std::ostringstream os;
      os << "calibrate: solution left physical bounds (J = " << x(0)
         << ", g = " << x(1) << "), residual norm " << r.norm();
      throw CalibrationError(os.str());
    }
  }
  if (r.norm() > 1e-6) {
    std::ostringstream os;
    os << "calibrate: no convergence, residual norm " << r.norm()
       << " (two_delta " << r(0) << ", bands";
    for (int k = 1; k < nx; ++k) os << " " << r(k);
    os << ")";
    throw CalibrationError(os.str());
  }

  dev.J = x(0);
  dev.g_A = dev.g_B = x(1);
  if (nx == 3) dev.omega_q_A = dev.omega_q_B = obs.omega_q + x(2);
  result.device = dev;
  result.iterations = it;

  const DispersiveParams disp = dispersive_params(dev, DriveParams{}, n_max);
  const double band_p = 0.5 * (drive_frequency(disp, BellTarget::T0, Branch::Plus) +
                               drive_frequency(disp, BellTarget::S, Branch::Plus));
  const double band_m = 0.5 * (drive_frequency(disp, BellTarget::T0, Branch::Minus) +
                               drive_frequency(disp, BellTarget::S, Branch::Minus));
  auto entry = [&](const std::string& name, double target, double achieved,
                   const std::string& unit) {
    result.report.push_back({name, target, achieved, achieved - target, unit});
  };
  entry("two_delta", obs.two_delta, 2.0 * disp.delta_exact, "GHz");
  entry("band_plus", obs.band_plus, band_p, "GHz");
  entry("band_minus", obs.band_minus, band_m, "GHz");
  entry("chi_plus_mag", obs.chi_plus_mag, std::abs(disp.chi_plus), "GHz");
  entry("chi_minus_mag", obs.chi_minus_mag, std::abs(disp.chi_minus), "GHz");
  entry("omega_q", obs.omega_q, dev.omega_q_A, "GHz");
  return result;
}

}  // namespace bellcool
