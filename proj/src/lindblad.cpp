#include "bellcool/lindblad.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>

#include "bellcool/units.hpp"

namespace bellcool {

namespace {

const Complex kIm(0.0, 1.0);

void check_channels(const Operator& H, const std::vector<CollapseChannel>& channels) {
  for (const auto& ch : channels) {
    if (ch.rate < 0.0) throw std::invalid_argument("CollapseChannel: rate must be >= 0");
    if (ch.op.dim() != H.dim())
      throw std::invalid_argument("CollapseChannel: operator dimension mismatch");
  }
}

Eigen::SparseMatrix<Complex> to_sparse(const Matrix& m, double prune = 0.0) {
  Eigen::SparseMatrix<Complex> s(m.rows(), m.cols());
  std::vector<Eigen::Triplet<Complex>> trip;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (std::abs(m(i, j)) > prune) trip.emplace_back(i, j, m(i, j));
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

// vec(A X B) = (B^T kron A) vec(X) for column-major vec
Eigen::SparseMatrix<Complex> sparse_kron(const Eigen::SparseMatrix<Complex>& a,
                                         const Eigen::SparseMatrix<Complex>& b) {
  Eigen::SparseMatrix<Complex> out(a.rows() * b.rows(), a.cols() * b.cols());
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<size_t>(a.nonZeros()) * b.nonZeros());
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (Eigen::SparseMatrix<Complex>::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (Eigen::SparseMatrix<Complex>::InnerIterator ib(b, kb); ib; ++ib)
          trip.emplace_back(ia.row() * b.rows() + ib.row(),
                            ia.col() * b.cols() + ib.col(), ia.value() * ib.value());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace

Matrix lindblad_rhs(const State& rho, const Operator& H,
                    const std::vector<CollapseChannel>& channels) {
  check_channels(H, channels);
  LindbladGenerator gen(H, channels);
  return gen.apply(rho.density());
}

LindbladGenerator::LindbladGenerator(const Operator& H,
                                     const std::vector<CollapseChannel>& channels) {
  check_channels(H, channels);
  const double w = kAngularPerGHzUs;
  k_ = -kIm * w * H.matrix();
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    const Matrix l = std::sqrt(w * ch.rate) * ch.op.matrix();
    k_ -= 0.5 * (l.adjoint() * l);
    jumps_.push_back(l);
  }
}

void LindbladGenerator::apply(const Matrix& rho, Matrix& out) const {
  out.noalias() = k_ * rho;
  out.noalias() += rho * k_.adjoint();
  for (const auto& l : jumps_) out.noalias() += l * rho * l.adjoint();
}

Matrix LindbladGenerator::apply(const Matrix& rho) const {
  Matrix out(rho.rows(), rho.cols());
  apply(rho, out);
  return out;
}

Eigen::SparseMatrix<Complex> LindbladGenerator::superoperator() const {
  const int n = dim();
  const Eigen::SparseMatrix<Complex> id = to_sparse(Matrix::Identity(n, n));
  const Eigen::SparseMatrix<Complex> ks = to_sparse(k_, 1e-300);
  // K rho + rho K+  ->  (I kron K) + (conj(K) kron I)
  Eigen::SparseMatrix<Complex> s = sparse_kron(id, ks);
  s += sparse_kron(to_sparse(Matrix(k_.conjugate()), 1e-300), id);
  for (const auto& l : jumps_) {
    const Eigen::SparseMatrix<Complex> ls = to_sparse(l, 1e-300);
    const Eigen::SparseMatrix<Complex> lc = to_sparse(Matrix(l.conjugate()), 1e-300);
    s += sparse_kron(lc, ls);
  }
  return s;
}

double LindbladGenerator::spectral_radius_estimate(int iterations) const {
  const int n = dim();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix v(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) v(i, j) = Complex(nd(rng), nd(rng));
  v /= v.norm();
  double lambda = 0.0;
  Matrix w(n, n);
  for (int it = 0; it < iterations; ++it) {
    apply(v, w);
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return lambda;
}

namespace {

// One RK4 step of the (linear, time-independent) generator.
void rk4_step(const LindbladGenerator& gen, Matrix& rho, double h, Matrix& k1,
              Matrix& k2, Matrix& k3, Matrix& k4, Matrix& tmp) {
  gen.apply(rho, k1);
  tmp = rho + (0.5 * h) * k1;
  gen.apply(tmp, k2);
  tmp = rho + (0.5 * h) * k2;
  gen.apply(tmp, k3);
  tmp = rho + h * k3;
  gen.apply(tmp, k4);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

EvolutionResult evolve_rk4(const State& rho0, const Operator& H,
                           const std::vector<CollapseChannel>& channels,
                           const std::vector<double>& t_grid, const EvolveOptions& opts) {
  LindbladGenerator gen(H, channels);
  const int n = gen.dim();

  double dt = opts.dt;
  if (dt <= 0.0) {
    const double radius = gen.spectral_radius_estimate();
    dt = (radius > 0.0) ? 2.0 / radius : 0.1;  // RK4 imaginary-axis limit 2.83
  }

  EvolutionResult res;
  res.method = "rk4";
  Matrix rho = rho0.density();
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), tmp(n, n);

  auto snapshot = [&](double t) {
    res.times.push_back(t);
    if (opts.store_states || res.states.empty()) {
      if (!opts.store_states) res.states.clear();
      res.states.push_back(0.5 * (rho + rho.adjoint()));
    } else {
      res.states.back() = 0.5 * (rho + rho.adjoint());
    }
  };

  snapshot(t_grid.front());
  for (size_t seg = 0; seg + 1 < t_grid.size(); ++seg) {
    const double span = t_grid[seg + 1] - t_grid[seg];
    if (span < 0.0) throw std::invalid_argument("evolve: t_grid must be ascending");
    if (span == 0.0) {
      snapshot(t_grid[seg + 1]);
      continue;
    }
    long steps = std::max(1L, static_cast<long>(std::ceil(span / dt)));
    int halvings = 0;
    for (;;) {
      const double h = span / static_cast<double>(steps);
      Matrix saved = rho;
      bool ok = true;
      for (long s = 0; s < steps; ++s) {
        const double tr_before = rho.trace().real();
        rk4_step(gen, rho, h, k1, k2, k3, k4, tmp);
        const double drift = std::abs(rho.trace().real() - tr_before);
        res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - Complex(1.0)));
        if (drift > opts.trace_tol || !std::isfinite(rho(0, 0).real())) {
          ok = false;
          break;
        }
      }
      if (ok) {
        res.steps += steps;
        break;
      }
      rho = saved;
      steps *= 2;
      if (++halvings > opts.max_step_halvings)
        throw IntegrationError("evolve(rk4): step-size underflow", res.steps,
                               res.max_trace_error);
    }
    snapshot(t_grid[seg + 1]);
  }
  return res;
}

EvolutionResult evolve_trbdf2(const State& rho0, const Operator& H,
                              const std::vector<CollapseChannel>& channels,
                              const std::vector<double>& t_grid,
                              const EvolveOptions& opts) {
  LindbladGenerator gen(H, channels);
  const int n = gen.dim();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const Eigen::SparseMatrix<Complex> sup = gen.superoperator();

  // TR-BDF2 with gamma = 2 - sqrt(2): both stages share (I - c h L),
  // c = 1 - 1/sqrt(2), so one factorization serves the whole trajectory.
  const double c = 1.0 - 1.0 / std::sqrt(2.0);
  const double k1c = 0.5 * (std::sqrt(2.0) + 1.0);
  const double k2c = 0.5 * (std::sqrt(2.0) - 1.0);

  double h = opts.dt > 0.0 ? opts.dt : 0.05;

  Eigen::SparseMatrix<Complex> m(nn, nn);
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  auto factorize = [&](double step) {
    Eigen::SparseMatrix<Complex> id(nn, nn);
    id.setIdentity();
    m = id - (c * step) * sup;
    lu.compute(m);
    if (lu.info() != Eigen::Success)
      throw IntegrationError("evolve(trbdf2): factorization failed", 0, 0.0);
  };

  EvolutionResult res;
  res.method = "trbdf2";
  Vector v = Eigen::Map<const Vector>(rho0.density().data(), nn);

  auto snapshot = [&](double t) {
    res.times.push_back(t);
    Matrix rho = Eigen::Map<const Matrix>(v.data(), n, n);
    rho = 0.5 * (rho + rho.adjoint());
    res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - Complex(1.0)));
    if (!opts.store_states && !res.states.empty())
      res.states.back() = std::move(rho);
    else
      res.states.push_back(std::move(rho));
  };

  double current_h = 0.0;
  snapshot(t_grid.front());
  Vector rhs(nn), mid(nn);
  for (size_t seg = 0; seg + 1 < t_grid.size(); ++seg) {
    const double span = t_grid[seg + 1] - t_grid[seg];
    if (span < 0.0) throw std::invalid_argument("evolve: t_grid must be ascending");
    if (span == 0.0) {
      snapshot(t_grid[seg + 1]);
      continue;
    }
    const long steps = std::max(1L, static_cast<long>(std::llround(span / h)));
    const double hs = span / static_cast<double>(steps);
    if (std::abs(hs - current_h) > 1e-15) {
      factorize(hs);
      current_h = hs;
    }
    for (long s = 0; s < steps; ++s) {
      rhs = v + (c * hs) * (sup * v);
      mid = lu.solve(rhs);
      rhs = k1c * mid - k2c * v;
      v = lu.solve(rhs);
      if (!std::isfinite(v(0).real()))
        throw IntegrationError("evolve(trbdf2): divergence", res.steps, res.max_trace_error);
    }
    res.steps += steps;
    snapshot(t_grid[seg + 1]);
  }
  return res;
}

}  // namespace

EvolutionResult evolve(const State& rho0, const Operator& H,
                       const std::vector<CollapseChannel>& channels,
                       const std::vector<double>& t_grid, const EvolveOptions& opts) {
  if (t_grid.size() < 1) throw std::invalid_argument("evolve: empty time grid");
  if (rho0.dim() != H.dim()) throw std::invalid_argument("evolve: dimension mismatch");

  EvolveMethod method = opts.method;
  if (method == EvolveMethod::Auto) {
    // RK4 cost scales with the spectral radius; prefer the implicit path
    // for larger systems and long horizons
    const double horizon = t_grid.back() - t_grid.front();
    method = (H.dim() <= 16 || horizon <= 0.5) ? EvolveMethod::RK4 : EvolveMethod::TRBDF2;
  }
  return method == EvolveMethod::RK4 ? evolve_rk4(rho0, H, channels, t_grid, opts)
                                     : evolve_trbdf2(rho0, H, channels, t_grid, opts);
}

EvolutionResult evolve_time_dependent(const State& rho0,
                                      const std::function<Matrix(double)>& H_of_t,
                                      const HilbertSpace& space,
                                      const std::vector<CollapseChannel>& channels,
                                      const std::vector<double>& t_grid, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("evolve_time_dependent: dt must be > 0");
  const int n = space.total_dim();
  const double w = kAngularPerGHzUs;

  std::vector<Matrix> jumps;
  Matrix damp = Matrix::Zero(n, n);
  for (const auto& ch : channels) {
    if (ch.rate == 0.0) continue;
    Matrix l = std::sqrt(w * ch.rate) * ch.op.matrix();
    damp -= 0.5 * (l.adjoint() * l);
    jumps.push_back(std::move(l));
  }

  auto rhs = [&](double t, const Matrix& rho) {
    const Matrix k = -kIm * w * H_of_t(t) + damp;
    Matrix out = k * rho + rho * k.adjoint();
    for (const auto& l : jumps) out.noalias() += l * rho * l.adjoint();
    return out;
  };

  EvolutionResult res;
  res.method = "rk4-timedep";
  Matrix rho = rho0.density();
  res.times.push_back(t_grid.front());
  res.states.push_back(rho);
  double t = t_grid.front();
  for (size_t seg = 0; seg + 1 < t_grid.size(); ++seg) {
    const double span = t_grid[seg + 1] - t_grid[seg];
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt)));
    const double h = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
      const Matrix k1 = rhs(t, rho);
      const Matrix k2 = rhs(t + 0.5 * h, rho + (0.5 * h) * k1);
      const Matrix k3 = rhs(t + 0.5 * h, rho + (0.5 * h) * k2);
      const Matrix k4 = rhs(t + h, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      t += h;
    }
    res.steps += steps;
    res.max_trace_error = std::max(res.max_trace_error, std::abs(rho.trace() - Complex(1.0)));
    res.times.push_back(t_grid[seg + 1]);
    res.states.push_back(0.5 * (rho + rho.adjoint()));
  }
  return res;
}

State steady_state(const Operator& H, const std::vector<CollapseChannel>& channels) {
  LindbladGenerator gen(H, channels);
  const int n = gen.dim();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  const Eigen::SparseMatrix<Complex> sup = gen.superoperator();

  // Replace one diagonal-position row (rows at diagonal positions are
  // linearly dependent through trace conservation) by the trace constraint.
  auto solve_with_row = [&](int diag_index) {
    const Eigen::Index drop = static_cast<Eigen::Index>(diag_index) * n + diag_index;
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(sup.nonZeros() + n);
    for (int k = 0; k < sup.outerSize(); ++k)
      for (Eigen::SparseMatrix<Complex>::InnerIterator it(sup, k); it; ++it)
        if (it.row() != drop) trip.emplace_back(it.row(), it.col(), it.value());
    for (int i = 0; i < n; ++i)
      trip.emplace_back(drop, static_cast<Eigen::Index>(i) * n + i, Complex(1.0));
    Eigen::SparseMatrix<Complex> a(nn, nn);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
      throw NonUniqueSteadyStateError("steady_state: singular system (degenerate null space?)");
    Vector b = Vector::Zero(nn);
    b(drop) = 1.0;
    return Vector(lu.solve(b));
  };

  const Vector v1 = solve_with_row(0);
  const Vector v2 = solve_with_row(n - 1);
  if ((v1 - v2).norm() > 1e-7 * std::max(1.0, v1.norm()))
    throw NonUniqueSteadyStateError("steady_state: null space is not unique");

  Matrix rho = Eigen::Map<const Matrix>(v1.data(), n, n);
  rho = 0.5 * (rho + rho.adjoint());
  rho /= rho.trace().real();

  const double residual = gen.apply(rho).norm();
  if (residual > 1e-10)
    throw NonUniqueSteadyStateError("steady_state: residual " + std::to_string(residual) +
                                    " exceeds 1e-10");
  return State(H.space(), rho, /*validate=*/false);
}

std::vector<CollapseChannel> device_channels(const DeviceParams& dev, int n_max) {
  const HilbertSpace space = device_space(n_max);
  const HybridizedModes modes = hybridized_modes(dev, n_max);
  std::vector<CollapseChannel> ch;
  ch.push_back({modes.a_plus, dev.kappa_plus});
  ch.push_back({modes.a_minus, dev.kappa_minus});
  ch.push_back({pauli_on(space, PauliAxis::Minus, 2), dev.gamma_1});
  ch.push_back({pauli_on(space, PauliAxis::Minus, 3), dev.gamma_1});
  ch.push_back({pauli_on(space, PauliAxis::Z, 2), 0.5 * dev.gamma_phi});
  ch.push_back({pauli_on(space, PauliAxis::Z, 3), 0.5 * dev.gamma_phi});
  return ch;
}

std::pair<Complex, Complex> mode_amplitudes(const DeviceParams& dev,
                                            const DriveParams& drv) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const Complex drive_A = drv.eps_A * std::exp(-kIm * drv.phi_A);
  const Complex drive_B = drv.eps_B * std::exp(-kIm * drv.phi_B);
  const Complex eps_p = inv_sqrt2 * (drive_A + drive_B);
  const Complex eps_m = inv_sqrt2 * (drive_A - drive_B);
  const double wp = dev.omega_c - dev.J;
  const double wm = dev.omega_c + dev.J;
  const Complex alpha_p =
      -kIm * eps_p / (kIm * (wp - drv.omega_d) + 0.5 * dev.kappa_plus);
  const Complex alpha_m =
      -kIm * eps_m / (kIm * (wm - drv.omega_d) + 0.5 * dev.kappa_minus);
  return {alpha_p, alpha_m};
}

std::pair<double, double> odd_parity_phase(const DeviceParams& dev, double omega_d) {
  auto imbalance = [&](double phi) {
    const DriveParams drv = DriveParams::balanced(omega_d, 1.0, phi);
    const auto [ap, am] = mode_amplitudes(dev, drv);
    return std::abs(ap) - std::abs(am);
  };
  // |alpha_+| decreases and |alpha_-| grows monotonically on (0, pi)
  double lo = 0.0, hi = std::numbers::pi;
  const double f_lo = imbalance(1e-12);
  const double f_hi = imbalance(std::numbers::pi - 1e-12);
  if (!(f_lo > 0.0 && f_hi < 0.0))
    throw std::logic_error("odd_parity_phase: no sign change on (0, pi)");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (imbalance(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-13) break;
  }
  const double root = 0.5 * (lo + hi);
  return {root, 2.0 * std::numbers::pi - root};
}

}  // namespace bellcool
