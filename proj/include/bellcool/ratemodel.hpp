#pragma once

// Four-level classical rate-equation reduction of the cooling dynamics and
// the nonlinear least-squares extraction of the pump / decay rates.
//
// Levels: {T-, target, other (the opposite-symmetry Bell state), T+}.
//   gamma_p        pump T- -> target
//   gamma_p_prime  weak off-resonant pump target -> T+
//   gamma_1        decay: single-excitation states -> T-, T+ -> target/other
//   gamma_phi      symmetric target <-> other mixing
// All rates are linear frequencies in GHz, times in us.

#include <array>
#include <string>
#include <vector>

#include "bellcool/tensor.hpp"

namespace bellcool {

struct RateModel {
  double gamma_p = 0.0;
  double gamma_p_prime = 0.0;
  double gamma_1 = 0.0;
  double gamma_phi = 0.0;

  bool hierarchy_ok() const {
    return gamma_phi < gamma_1 && gamma_p_prime < gamma_1 && gamma_1 < gamma_p;
  }
};

struct Populations {
  double p_tminus = 1.0;
  double p_target = 0.0;
  double p_other = 0.0;
  double p_tplus = 0.0;

  std::array<double, 4> as_array() const { return {p_tminus, p_target, p_other, p_tplus}; }
  /// Throws std::invalid_argument unless each entry is in [0,1] and the
  /// sum equals 1 within 1e-9.
  void validate() const;
};

/// Population trajectory; columns follow the Populations order.
struct RateTrajectory {
  std::vector<double> t_us;
  std::vector<std::array<double, 4>> populations;
};

/// Time derivative of the four populations; components sum to zero exactly.
std::array<double, 4> rate_rhs(const Populations& p, const RateModel& m);

/// RK4 integration over the given grid.
RateTrajectory evolve_rates(const Populations& p0, const RateModel& m,
                            const std::vector<double>& t_grid);

/// Steady state as the null vector of the 4x4 rate matrix.
Populations rate_steady_state(const RateModel& m);

struct FitDiagnostics {
  bool converged = false;
  int evaluations = 0;
  double residual_norm = 0.0;  // sqrt(sum of squared residuals)
  double r_squared = 0.0;
  std::array<double, 4> stderr_ghz{};  // from a finite-difference Gauss-Newton step
};

struct FitResult {
  RateModel rates;
  FitDiagnostics diagnostics;
};

/// Observed data for fitting: either all four populations or a single
/// fidelity column (the target population, remaining levels marginalized).
struct RateData {
  std::vector<double> t_us;
  std::vector<std::array<double, 4>> populations;  // empty if fidelity-only
  std::vector<double> fidelity;                    // empty if populations given
  Populations p0;                                  // initial condition
};

/// Derivative-free Nelder-Mead on log-rates (negative proposals are
/// impossible by construction). Non-convergence after the iteration cap is
/// reported through diagnostics.converged with the best point so far.
/// Throws std::invalid_argument for fewer than 10 time points.
FitResult fit_rates(const RateData& data, const RateModel& initial_guess);

}  // namespace bellcool
