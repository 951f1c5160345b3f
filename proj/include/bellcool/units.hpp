#pragma once

#include <numbers>

namespace bellcool {

// All frequencies, couplings and rates in this codebase are linear
// frequencies in GHz; all times are in microseconds. 1 GHz * 1 us = 1000
// cycles, so the single angular-conversion constant is 2*pi*1000 rad per
// (GHz * us). It is applied exactly once, inside evolution / response
// formulas, never in stored parameters.
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kAngularPerGHzUs = kTwoPi * 1000.0;

/// Decay rate (linear frequency, GHz) equivalent to an exponential
/// lifetime in microseconds: exp(-kAngularPerGHzUs * rate * t).
inline constexpr double rate_from_lifetime_us(double t_us) {
  return 1.0 / (kAngularPerGHzUs * t_us);
}

inline constexpr double lifetime_us_from_rate(double rate_ghz) {
  return 1.0 / (kAngularPerGHzUs * rate_ghz);
}

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace bellcool
