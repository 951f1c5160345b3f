#pragma once

// Scripted experiments over the lower modules: transmission spectrum,
// qubit avoided crossing, the phase-frequency cooling map, cooling
// dynamics with rate-equation fits, and the parity selection-rule probe.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "bellcool/device.hpp"
#include "bellcool/lindblad.hpp"
#include "bellcool/ratemodel.hpp"

namespace bellcool {

struct SweepAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int points = 0;

  double value(int i) const {
    return min + (max - min) * static_cast<double>(i) / (points - 1);
  }
};

/// Up to two axes; invariants: points >= 2, min < max.
struct SweepGrid {
  std::vector<SweepAxis> axes;
  void validate() const;
};

/// Per-point fidelities {F_S, F_T0, F_T-, F_T+} over a (phi, omega_d) grid.
struct MapResult {
  SweepGrid grid;  // axes[0] = phi (rad), axes[1] = omega_d (GHz)
  std::vector<std::array<double, 4>> values;  // row-major, phi outer
  std::vector<std::uint8_t> failed;
  int failures = 0;
  double tau_us = 0.0;

  const std::array<double, 4>& at(int iphi, int iomega) const {
    return values[static_cast<size_t>(iphi) * grid.axes[1].points + iomega];
  }
};

/// Execution knobs shared by the experiments.
struct SimOptions {
  int n_max = 2;            // truncation for driven evolutions
  double implicit_dt = 0.05;  // us, TR-BDF2 step
  int workers = 0;          // 0 = hardware concurrency
};

struct SpectrumResult {
  std::vector<double> f_ghz;
  std::vector<double> transmission;  // normalized |t|^2
  double peak_plus = 0.0;            // lower-frequency (symmetric) peak
  double peak_minus = 0.0;
  double fwhm_plus = 0.0;
  double fwhm_minus = 0.0;
};

/// Linear-response transmission through the two coupled damped modes
/// (input port on cavity B, output port on cavity A). The probe range must
/// bracket omega_c +- (J + 5 kappa).
SpectrumResult transmission_spectrum(const DeviceParams& dev, double f_min, double f_max,
                                     int points);

struct CrossingResult {
  std::vector<double> omega_qB_ghz;
  std::vector<double> branch1_ghz;  // lower qubit-like branch
  std::vector<double> branch2_ghz;
  double min_gap_ghz = 0.0;
  double min_gap_at_ghz = 0.0;
};

/// Single-excitation qubit-sector eigenfrequencies while sweeping the bare
/// qubit-B frequency across qubit A. The range must bracket the resonance.
CrossingResult avoided_crossing(const DeviceParams& dev, double span_ghz, int points);

/// Evolve |0,0,T-> for tau at every (phi, omega_d) grid point and record
/// the four Bell fidelities. Per-point integration failures are recorded,
/// not fatal.
MapResult phase_frequency_map(const DeviceParams& dev, const SweepGrid& grid,
                              double tau_us, double eps, const SimOptions& opts);

/// Default map grid: 48 phases x 120 frequencies bracketing both bands.
SweepGrid default_map_grid(const DeviceParams& dev, int phi_points = 48,
                           int omega_points = 120);

struct DynamicsResult {
  double omega_d = 0.0;
  double phi = 0.0;
  BellTarget target = BellTarget::T0;
  Branch branch = Branch::Plus;
  bool suppressed = false;  // symmetry-forbidden or undriven-mode configuration
  std::vector<double> tau_us;
  std::vector<std::array<double, 4>> fidelities;  // {F_S, F_T0, F_T-, F_T+}
  std::array<double, 4> steady{};                 // mean over the last 10%
  FitResult fit;
};

/// Fix phi and the branch, place the drive on the target resonance, sweep
/// the drive duration, and fit the four populations to the rate model.
DynamicsResult cooling_dynamics(const DeviceParams& dev, BellTarget target, double phi,
                                Branch branch, double tau_max_us, int points, double eps,
                                const SimOptions& opts);

/// True when the (target, branch, phi) combination cannot pump: the branch
/// mode is essentially undriven at this phase, or parity forbids the
/// transition at the even/odd symmetry points.
bool configuration_suppressed(const DeviceParams& dev, BellTarget target, Branch branch,
                              double phi);

/// Ratio of effective pump rates (suppressed target / favored target) for
/// the branch at this phase, from initial fidelity-growth slopes measured
/// at each target's own resonance with a weakened drive.
double selection_rule_ratio(const DeviceParams& dev, double phi, Branch branch,
                            double eps, const SimOptions& opts);

/// Measured effective pump rate (1/us) for one configuration, from the
/// early fidelity growth slope.
double pump_rate(const DeviceParams& dev, BellTarget target, Branch branch, double phi,
                 double eps, const SimOptions& opts);

/// Scan the drive amplitude until the effective pump rate reaches
/// `target_rate_per_us`; returns the amplitude (GHz). Used to pin the
/// default drive strength so that Gamma_p ~ 5 Gamma_1.
double calibrate_drive_amplitude(const DeviceParams& dev, BellTarget target,
                                 Branch branch, double phi, double target_rate_per_us,
                                 const SimOptions& opts);

/// Default drive amplitudes (GHz) per branch for the calibrated device,
/// fixed by the amplitude scan so the weaker branch pumps at ~5 Gamma_1.
double default_drive_eps(Branch branch);

}  // namespace bellcool
