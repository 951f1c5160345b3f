#pragma once

// Open-system dynamics: the Lindblad right-hand side, time evolution,
// steady states, and the semiclassical cavity-amplitude analysis behind
// the odd-parity drive phase.
//
// Two integration backends share one physics definition:
//   - fixed-step RK4 on the density matrix (the reference path; per-step
//     trace-drift control as the stability/accuracy guard), and
//   - an L-stable TR-BDF2 stepper on the sparse superoperator for long or
//     stiff evolutions (one LU factorization per trajectory).
// Both are cross-validated in the test suite.

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bellcool/device.hpp"
#include "bellcool/tensor.hpp"

namespace bellcool {

struct CollapseChannel {
  Operator op;
  double rate;  // GHz, >= 0
};

struct EvolutionResult {
  std::vector<double> times;    // us
  std::vector<Matrix> states;   // Hermitized density matrices at the grid times
  long steps = 0;
  double max_trace_error = 0.0;
  std::string method;
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, long steps, double trace_error)
      : std::runtime_error(what), steps(steps), trace_error(trace_error) {}
  long steps;
  double trace_error;
};

struct NonUniqueSteadyStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// d rho / dt = -i * w * [H, rho] + sum_k w * rate_k (L rho L+ - 1/2 {L+L, rho})
/// with w = kAngularPerGHzUs. Output is Hermitian and traceless.
Matrix lindblad_rhs(const State& rho, const Operator& H,
                    const std::vector<CollapseChannel>& channels);

/// Precomputed generator: K = -i w H - (w/2) sum rate L+L plus the jump list.
class LindbladGenerator {
 public:
  LindbladGenerator(const Operator& H, const std::vector<CollapseChannel>& channels);

  void apply(const Matrix& rho, Matrix& out) const;
  Matrix apply(const Matrix& rho) const;

  /// Column-major vectorized superoperator (sparse), in angular units 1/us.
  Eigen::SparseMatrix<Complex> superoperator() const;

  /// Power-iteration estimate of the spectral radius (1/us).
  double spectral_radius_estimate(int iterations = 25) const;

  int dim() const { return static_cast<int>(k_.rows()); }

 private:
  Matrix k_;                     // non-Hermitian drift
  std::vector<Matrix> jumps_;    // sqrt(w * rate) * L
};

enum class EvolveMethod { Auto, RK4, TRBDF2 };

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::Auto;
  double dt = 0.0;              // us; 0 = choose automatically
  double trace_tol = 1e-10;     // RK4 per-step trace drift bound
  int max_step_halvings = 10;
  bool store_states = true;     // false: keep only the final state
};

/// Integrate from rho0 over t_grid (ascending, t_grid[0] = start).
/// Throws IntegrationError on step-size underflow.
EvolutionResult evolve(const State& rho0, const Operator& H,
                       const std::vector<CollapseChannel>& channels,
                       const std::vector<double>& t_grid, const EvolveOptions& opts = {});

/// Explicit time-dependent Hamiltonian (lab frame). RK4 only; dt required.
EvolutionResult evolve_time_dependent(const State& rho0,
                                      const std::function<Matrix(double)>& H_of_t,
                                      const HilbertSpace& space,
                                      const std::vector<CollapseChannel>& channels,
                                      const std::vector<double>& t_grid, double dt);

/// Solve L(rho) = 0 with unit trace via sparse LU on the superoperator;
/// uniqueness is probed with a second, independent solve. The residual
/// ||L(rho)||_F is verified below 1e-10.
State steady_state(const Operator& H, const std::vector<CollapseChannel>& channels);

/// Collapse channels of the device: photon leakage kappa_pm on the
/// hybridized modes, relaxation gamma_1 (sigma-) and pure dephasing
/// gamma_phi/2 (sigma_z) per qubit.
std::vector<CollapseChannel> device_channels(const DeviceParams& dev, int n_max);

/// Semiclassical steady amplitudes of the hybridized modes under the
/// two-port drive (no qubit back-action):
///   alpha_pm = -i (eps_A e^{-i phi_A} +- eps_B e^{-i phi_B}) / sqrt(2)
///              / ( i (w_pm - w_d) + kappa_pm / 2 )
/// |alpha_pm|^2 are the mean occupations n_pm.
std::pair<Complex, Complex> mode_amplitudes(const DeviceParams& dev,
                                            const DriveParams& drv);

/// The two relative phases in [0, 2 pi) at which |alpha_+| = |alpha_-|
/// (odd-parity drive), found by bisection; symmetric about pi.
std::pair<double, double> odd_parity_phase(const DeviceParams& dev, double omega_d);

}  // namespace bellcool
