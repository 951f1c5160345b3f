#include "bellcool/observables.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "bellcool/device.hpp"

namespace bellcool {

namespace {

HilbertSpace two_qubit_space() { return HilbertSpace({2, 2}, {"qubit A", "qubit B"}); }

// I, X, Y, Z in the (|g>, |e>) convention
const std::array<Matrix, 4>& pauli_set() {
  static const std::array<Matrix, 4> set = {
      identity_matrix(2), pauli_matrix(PauliAxis::X), pauli_matrix(PauliAxis::Y),
      pauli_matrix(PauliAxis::Z)};
  return set;
}

}  // namespace

TwoQubitState::TwoQubitState(Matrix density, bool validate) : rho_(std::move(density)) {
  if (rho_.rows() != 4 || rho_.cols() != 4)
    throw std::invalid_argument("TwoQubitState: matrix must be 4x4");
  if (validate) {
    if (std::abs(rho_.trace() - Complex(1.0)) > 1e-9)
      throw std::invalid_argument("TwoQubitState: trace deviates from 1");
    if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("TwoQubitState: not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho_ + rho_.adjoint()),
                                             Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-8)
      throw std::invalid_argument("TwoQubitState: negative eigenvalue beyond floor");
  }
}

Matrix partial_trace_matrix(const Matrix& rho, const HilbertSpace& space,
                            const std::vector<int>& keep) {
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  const int ns = space.num_subsystems();
  std::vector<bool> kept(ns, false);
  for (int k : keep) {
    if (k < 0 || k >= ns) throw std::invalid_argument("partial_trace: invalid index");
    if (kept[k]) throw std::invalid_argument("partial_trace: duplicate index");
    kept[k] = true;
  }

  int dim_keep = 1, dim_rest = 1;
  for (int s = 0; s < ns; ++s) (kept[s] ? dim_keep : dim_rest) *= space.dim(s);

  // composite index from (kept indices in `keep` order, traced indices)
  std::vector<int> sub(ns, 0);
  auto full_index = [&](int ik, int ir) {
    int rem_k = ik, rem_r = ir;
    for (auto it = keep.rbegin(); it != keep.rend(); ++it) {
      sub[*it] = rem_k % space.dim(*it);
      rem_k /= space.dim(*it);
    }
    for (int s = ns - 1; s >= 0; --s) {
      if (kept[s]) continue;
      sub[s] = rem_r % space.dim(s);
      rem_r /= space.dim(s);
    }
    return space.index(sub);
  };

  Matrix out = Matrix::Zero(dim_keep, dim_keep);
  for (int r = 0; r < dim_keep; ++r)
    for (int c = 0; c < dim_keep; ++c) {
      Complex acc(0.0);
      for (int t = 0; t < dim_rest; ++t) acc += rho(full_index(r, t), full_index(c, t));
      out(r, c) = acc;
    }
  return out;
}

State partial_trace(const State& rho, const std::vector<int>& keep) {
  Matrix out = partial_trace_matrix(rho.density(), rho.space(), keep);
  std::vector<int> dims;
  std::vector<std::string> labels;
  for (int k : keep) {
    dims.push_back(rho.space().dim(k));
    if (!rho.space().labels().empty()) labels.push_back(rho.space().labels()[k]);
  }
  return State(HilbertSpace(dims, labels), std::move(out), /*validate=*/false);
}

TwoQubitState qubit_sector(const Matrix& rho, const HilbertSpace& space) {
  return TwoQubitState(partial_trace_matrix(rho, space, {2, 3}), /*validate=*/false);
}

TwoQubitState qubit_sector(const State& rho) {
  return qubit_sector(rho.density(), rho.space());
}

double fidelity(const TwoQubitState& rho, const Vector& target) {
  if (target.size() != 4) throw std::invalid_argument("fidelity: target must be 4-dim");
  if (std::abs(target.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("fidelity: target state is not normalized");
  const Complex f = target.dot(rho.density() * target);
  if (std::abs(f.imag()) > 1e-10)
    throw std::logic_error("fidelity: non-real overlap (invalid state?)");
  return std::clamp(f.real(), 0.0, 1.0);
}

std::array<double, 4> bell_fidelities(const TwoQubitState& rho) {
  return {fidelity(rho, bell_state_S()), fidelity(rho, bell_state_T0()),
          fidelity(rho, bell_state_T_minus()), fidelity(rho, bell_state_T_plus())};
}

Eigen::Matrix<double, 15, 1> pauli_expectations(const TwoQubitState& rho) {
  const auto& p = pauli_set();
  Eigen::Matrix<double, 15, 1> out;
  int idx = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      out(idx++) = (kron(p[a], p[b]) * rho.density()).trace().real();
    }
  return out;
}

TwoQubitState tomography_roundtrip(const TwoQubitState& rho) {
  const auto& p = pauli_set();
  const auto exp = pauli_expectations(rho);
  Matrix rec = Matrix::Identity(4, 4);
  int idx = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      rec += exp(idx++) * kron(p[a], p[b]);
    }
  return TwoQubitState(0.25 * rec, /*validate=*/false);
}

SampledTomography tomography_sampled(const TwoQubitState& rho, int shots,
                                     std::uint64_t seed) {
  if (shots < 1) throw std::invalid_argument("tomography_sampled: shots must be >= 1");
  std::mt19937_64 rng(seed);
  const auto& p = pauli_set();

  // measured single- and two-qubit expectations with accumulated statistics
  double exp_sum[4][4] = {};
  double exp_sq[4][4] = {};
  int exp_n[4][4] = {};

  for (int a = 1; a < 4; ++a)
    for (int b = 1; b < 4; ++b) {
      // eigenbases of P_a kron P_b: product eigenvectors with signs
      Eigen::ComplexEigenSolver<Matrix> ea(p[a]);
      Eigen::ComplexEigenSolver<Matrix> eb(p[b]);
      std::array<double, 4> prob{}, sa{}, sb{};
      std::array<Vector, 4> eigvec;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const int k = i * 2 + j;
          eigvec[k] = kron(Matrix(ea.eigenvectors().col(i)),
                           Matrix(eb.eigenvectors().col(j)));
          sa[k] = ea.eigenvalues()(i).real();
          sb[k] = eb.eigenvalues()(j).real();
          prob[k] = std::max(0.0, eigvec[k].dot(rho.density() * eigvec[k]).real());
        }
      std::discrete_distribution<int> dist(prob.begin(), prob.end());
      double m_ab = 0.0, m_a = 0.0, m_b = 0.0;
      for (int s = 0; s < shots; ++s) {
        const int k = dist(rng);
        m_ab += sa[k] * sb[k];
        m_a += sa[k];
        m_b += sb[k];
      }
      auto record = [&](int ia, int ib, double mean) {
        exp_sum[ia][ib] += mean;
        exp_sq[ia][ib] += mean * mean;
        exp_n[ia][ib] += 1;
      };
      record(a, b, m_ab / shots);
      record(a, 0, m_a / shots);
      record(0, b, m_b / shots);
    }

  Matrix rec = Matrix::Identity(4, 4);
  double var[4][4] = {};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == 0 && b == 0) continue;
      const double mean = exp_sum[a][b] / exp_n[a][b];
      rec += mean * kron(p[a], p[b]);
      // binomial error of a +-1 observable estimated from the sample mean
      var[a][b] = (1.0 - mean * mean) / (shots * exp_n[a][b]);
      if (var[a][b] < 0.0) var[a][b] = 0.0;
    }
  rec *= 0.25;

  SampledTomography out;
  out.reconstruction = rec;
  out.purity = (rec * rec).trace().real();

  // stderr of F = <psi|rho|psi> = sum_ab c_ab <P_a P_b> / 4
  const std::array<Vector, 4> targets = {bell_state_S(), bell_state_T0(),
                                         bell_state_T_minus(), bell_state_T_plus()};
  for (size_t t = 0; t < targets.size(); ++t) {
    double v = 0.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        if (a == 0 && b == 0) continue;
        const double c =
            targets[t].dot(kron(p[a], p[b]) * targets[t]).real();
        v += c * c * var[a][b] / 16.0;
      }
    out.fidelity_stderr[t] = std::sqrt(v);
  }
  return out;
}

double concurrence(const TwoQubitState& rho) {
  const Matrix yy = kron(pauli_matrix(PauliAxis::Y), pauli_matrix(PauliAxis::Y));
  const Matrix r = rho.density() * yy * rho.density().conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix> es(r);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i) lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<double>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

}  // namespace bellcool
