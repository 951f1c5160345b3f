#pragma once

// Reduced states, fidelities, Pauli expectation values and a simulated
// two-qubit tomography round-trip (exact linear inversion, with an optional
// finite-shot sampling mode for realistic error bars).

#include <array>
#include <cstdint>

#include "bellcool/tensor.hpp"

namespace bellcool {

/// 4x4 two-qubit density matrix in the {gg, ge, eg, ee} basis.
class TwoQubitState {
 public:
  explicit TwoQubitState(Matrix density, bool validate = true);
  const Matrix& density() const { return rho_; }

 private:
  Matrix rho_;
};

/// Partial trace keeping the listed subsystems (order preserved).
State partial_trace(const State& rho, const std::vector<int>& keep);
Matrix partial_trace_matrix(const Matrix& rho, const HilbertSpace& space,
                            const std::vector<int>& keep);

/// Reduced two-qubit state of the full device (traces out both cavities;
/// assumes the [cavity A, cavity B, qubit A, qubit B] layout).
TwoQubitState qubit_sector(const State& rho);
TwoQubitState qubit_sector(const Matrix& rho, const HilbertSpace& space);

/// F = <psi| rho |psi>, clamped to [0, 1] after an imaginary-part check.
/// Throws std::invalid_argument for an unnormalized target.
double fidelity(const TwoQubitState& rho, const Vector& target);

/// Fidelities against the four coupled-basis targets, order {S, T0, T-, T+}.
std::array<double, 4> bell_fidelities(const TwoQubitState& rho);

/// <P_A kron P_B> for all 15 non-identity Pauli pairs, ordered
/// IX IY IZ XI XX XY XZ YI YX YY YZ ZI ZX ZY ZZ.
Eigen::Matrix<double, 15, 1> pauli_expectations(const TwoQubitState& rho);

/// Linear-inversion reconstruction from exact expectation values;
/// equals the input to better than 1e-10.
TwoQubitState tomography_roundtrip(const TwoQubitState& rho);

/// Finite-shot tomography: projective readout in the 9 local Pauli bases,
/// `shots` samples per basis, linear inversion of the sampled expectations.
/// The reconstruction is not forced to be positive semidefinite.
struct SampledTomography {
  Matrix reconstruction;           // possibly slightly non-physical
  std::array<double, 4> fidelity_stderr;  // statistical errors vs {S, T0, T-, T+}
  double purity;
};
SampledTomography tomography_sampled(const TwoQubitState& rho, int shots,
                                     std::uint64_t seed);

/// Wootters concurrence (entanglement diagnostic beyond the fidelity).
double concurrence(const TwoQubitState& rho);

}  // namespace bellcool
