#pragma once

// Flat key = value configuration (keys namespaced by dots, units fixed by
// the schema: GHz, microseconds, radians). Unknown keys are rejected;
// missing keys take the documented defaults.

#include <cmath>
#include <optional>
#include <string>

#include "bellcool/device.hpp"
#include "bellcool/experiments.hpp"

namespace bellcool {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  // measured reference observables (calibration targets)
  ReferenceObservables observables;

  // device fields; NaN means "from calibration / default"
  double omega_c = 7.114;
  double omega_q = 6.200;
  double omega_q_A = NAN;
  double omega_q_B = NAN;
  double J = NAN;
  double g_A = NAN;
  double g_B = NAN;
  double kappa_plus = 0.00065;
  double kappa_minus = 0.00082;
  double kappa_in_A = 0.00002;
  double kappa_in_B = 0.00002;
  double kappa_out = 0.0004;
  double gamma_1 = 1.5915494309189535e-05;   // T1 = 10 us
  double gamma_phi = 7.957747154594767e-06;  // Tphi = 20 us
  bool calibrate = true;
  bool calibrate_omega_q = true;

  // drive defaults; NaN = per-branch calibrated amplitude / resonant placement
  double drive_eps = NAN;
  double drive_phi = std::numbers::pi;
  double drive_omega_d = NAN;

  // simulation
  int n_max = 3;        // static / dispersive calculations
  int exp_n_max = 2;    // driven evolutions (map, dynamics)
  double implicit_dt = 0.05;
  double rk4_dt = 0.0;  // 0 = automatic
  int workers = 0;      // 0 = hardware concurrency
  unsigned long long seed = 7;

  // experiment presets
  int map_phi_points = 48;
  int map_omega_points = 120;
  double map_omega_min = NAN;  // NaN = auto bracket around the bands
  double map_omega_max = NAN;
  double map_tau = 10.0;
  double dynamics_tau_max = 20.0;
  int dynamics_points = 51;
  int spectrum_points = 2001;
  double spectrum_span = 0.45;
  int crossing_points = 201;
  double crossing_span = 0.06;

  /// Device parameters after calibration and explicit overrides.
  DeviceParams effective_device() const;
  SimOptions sim_options() const;
  double effective_eps(Branch branch) const;
};

/// Parse a config file. Throws ConfigError with the offending line number
/// on malformed input, unknown keys, or out-of-range values.
Config parse_config(const std::string& path);
Config parse_config_text(const std::string& text);

}  // namespace bellcool
