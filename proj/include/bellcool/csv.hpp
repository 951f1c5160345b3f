#pragma once

// Deterministic CSV emission (fixed %.10g formatting, fixed row order) and
// a reader for trajectory files fed to the rate fitter.

#include <string>
#include <vector>

#include "bellcool/ratemodel.hpp"

namespace bellcool {

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  std::string str() const;
  /// Throws std::runtime_error when the path is not writable.
  void write(const std::string& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

std::string format_double(double v);

/// Trajectory CSV: either (t_us, p_tminus, p_target, p_other, p_tplus)
/// or (t_us, fidelity). The header row selects the layout.
RateData read_trajectory_csv(const std::string& path);

}  // namespace bellcool
