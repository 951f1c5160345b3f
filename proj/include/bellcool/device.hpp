#pragma once

// Physical model of the two-cavity / two-qubit device: Hamiltonian
// construction in the lab and drive-rotating frames, hybridized-mode and
// dispersive quantities, two-photon cooling drive placement, and the
// calibration that pins unpublished couplings to measured observables.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bellcool/tensor.hpp"

namespace bellcool {

/// All physical constants of the coupled system. Linear frequencies in GHz.
struct DeviceParams {
  double omega_c = 7.114;     // bare cavity frequency, both cavities
  double omega_q_A = 6.200;   // bare qubit frequencies
  double omega_q_B = 6.200;
  double g_A = 0.088;         // qubit-cavity couplings
  double g_B = 0.088;
  double J = 0.142;           // inter-cavity photon hopping
  double kappa_plus = 0.00065;   // hybridized-mode decay rates
  double kappa_minus = 0.00082;
  double kappa_in_A = 0.00002;   // port couplings (spectrum experiment only)
  double kappa_in_B = 0.00002;
  double kappa_out = 0.0004;
  double gamma_1 = 1.5915494309189535e-05;   // per-qubit relaxation (T1 = 10 us)
  double gamma_phi = 7.957747154594767e-06;  // per-qubit pure dephasing (Tphi = 20 us)

  /// Throws std::invalid_argument when a rate is negative or a coupling
  /// non-positive. Returns false (dispersive warning) when min|Delta|/g < 5.
  bool validate() const;

  double omega_q_mean() const { return 0.5 * (omega_q_A + omega_q_B); }
};

/// Drive controls: a single frequency, per-cavity amplitudes and phases.
struct DriveParams {
  double omega_d = 0.0;  // GHz
  double eps_A = 0.0;    // GHz
  double eps_B = 0.0;
  double phi_A = 0.0;    // radians
  double phi_B = 0.0;

  double phi() const { return phi_B - phi_A; }
  static DriveParams balanced(double omega_d, double eps, double phi) {
    return DriveParams{omega_d, eps, eps, 0.0, phi};
  }
};

/// Derived dispersive quantities. chi_plus/chi_minus are signed
/// (negative = red shift of the effective qubit frequency per photon).
struct DispersiveParams {
  double delta = 0.0;          // XY splitting, closed formula
  double delta_exact = 0.0;    // half the exact S/T0 eigenlevel splitting
  double chi_plus = 0.0;       // cross-Kerr per + photon
  double chi_minus = 0.0;
  double omega_c_plus = 0.0;   // omega_c - J
  double omega_c_minus = 0.0;  // omega_c + J
  double omega_c_plus_dressed = 0.0;   // exact E(1+,T-) - E(0,T-)
  double omega_c_minus_dressed = 0.0;
  double Delta_plus = 0.0;     // omega_q - omega_c_plus
  double Delta_minus = 0.0;
  double omega_q_bar = 0.0;    // mean undriven single-excitation qubit frequency
  double omega_q_dressed = 0.0;  // drive-power-dependent (Stark-shifted)
};

enum class Frame { Lab, DriveRotating };

/// Subsystem layout of the full device space.
HilbertSpace device_space(int n_max);

/// Time-independent part of the device Hamiltonian. In the lab frame the
/// drive is excluded (see drive_term / lab_frame_hamiltonian); in the
/// drive-rotating frame the returned operator is complete and static.
/// Qubit terms enter as omega * (sigma_z + 1)/2 so the ground state sits
/// at zero energy. Asserts Hermiticity of the result.
Operator build_hamiltonian(const DeviceParams& dev, const DriveParams& drv,
                           Frame frame, int n_max);

/// Undriven Hamiltonian (no drive terms) in the lab frame.
Operator bare_hamiltonian(const DeviceParams& dev, int n_max);

/// Total excitation number: photons plus qubit excitations.
Operator excitation_number(const HilbertSpace& space);

/// Explicit time-dependent lab-frame Hamiltonian H(t), t in microseconds.
std::function<Matrix(double)> lab_frame_hamiltonian(const DeviceParams& dev,
                                                    const DriveParams& drv, int n_max);

/// Hybridized-mode frequencies and the (a_A +- a_B)/sqrt(2) relabeling.
struct HybridizedModes {
  double omega_plus;   // omega_c - J
  double omega_minus;  // omega_c + J
  Operator a_plus;
  Operator a_minus;
};
HybridizedModes hybridized_modes(const DeviceParams& dev, int n_max);

/// The four coupled qubit-sector states with their closed-form energies
/// {0, wq - delta, wq + delta, 2 wq}, plus the numerically exact
/// single-excitation eigensystem of the full Hamiltonian for cross-checks.
struct CoupledEigensystem {
  // order: T-, T0, S, T+
  std::array<Vector, 4> qubit_states;   // 4-dim vectors, basis {gg, ge, eg, ee}
  std::array<double, 4> energies;       // closed-form
  // exact single-excitation sector (one total excitation)
  std::vector<double> exact_energies;
  std::vector<Vector> exact_vectors;    // full-space vectors
  // overlap of the exact qubit-like branches with |0,0,T0> and |0,0,S>
  double overlap_T0 = 0.0;
  double overlap_S = 0.0;
  double exact_T0_energy = 0.0;
  double exact_S_energy = 0.0;
};
CoupledEigensystem coupled_eigensystem(const DeviceParams& dev, int n_max);

/// Bell / triplet states as 4-dim qubit vectors, basis {gg, ge, eg, ee}.
Vector bell_state_T_minus();
Vector bell_state_T0();
Vector bell_state_S();
Vector bell_state_T_plus();

/// Full-space pure state |0,0,psi_q>.
Vector vacuum_qubit_state(const HilbertSpace& space, const Vector& qubit_state);

/// delta from the closed formula, chi_pm from exact eigenlevels with
/// n_pm = 0 vs 1, dressed qubit frequency from the drive-displaced frame.
/// Throws std::domain_error when a qubit-mode detuning vanishes.
DispersiveParams dispersive_params(const DeviceParams& dev, const DriveParams& drv,
                                   int n_max = 3);

/// Drive-power-dependent dressed qubit frequency: coherent displacement of
/// each hybridized mode followed by exact diagonalization in the displaced
/// frame. Returns omega_q_bar when the drive is off.
double stark_shift(const DeviceParams& dev, const DriveParams& drv, int n_max = 3);

enum class BellTarget { S, T0 };
enum class Branch { Plus, Minus };

/// Two-photon cooling drive frequency for pumping |0,0,T-> into the target
/// Bell state via the chosen hybridized mode:
///   w_d = 1/2 { w_c_pm + [wq_dressed + 2 chi_pm] -+ delta }
/// (- delta for T0, + delta for S). When `drv` carries a nonzero amplitude
/// the dressed qubit frequency is iterated to self-consistency in w_d.
double drive_frequency(const DispersiveParams& dp, BellTarget target, Branch branch);
double drive_frequency(const DeviceParams& dev, BellTarget target, Branch branch,
                       double eps, double phi, int n_max = 3);

/// Measured observables a calibration must reproduce.
struct ReferenceObservables {
  double two_delta = 0.0027;    // qubit-sector avoided-crossing width
  double band_plus = 6.572;     // cooling band center via the + mode
  double band_minus = 6.713;    // cooling band center via the - mode
  double chi_plus_mag = 0.0025;   // satellite-band offsets (magnitudes)
  double chi_minus_mag = 0.0014;
  double omega_c = 7.114;
  double omega_q = 6.200;
  double kappa_plus = 0.00065;
  double kappa_minus = 0.00082;
};

struct CalibrationEntry {
  std::string name;
  double target;
  double achieved;
  double residual;
  std::string unit;
};

struct CalibrationResult {
  DeviceParams device;
  double J_initial = 0.0;  // two-step closed-form estimate
  double g_initial = 0.0;
  int iterations = 0;
  std::vector<CalibrationEntry> report;
  std::string summary() const;
};

/// Fix J, g (g_A = g_B) and, when allow_omega_q_shift is set, a common bare
/// qubit offset so that the model reproduces the avoided-crossing width and
/// both cooling band centers. Starts from the closed-form two-step estimate
///   J  ~ [w_d(-) - w_d(+)] - (chi-_mag - chi+_mag)
///   g  ~ sqrt(delta * Delta+ * Delta- / J)
/// and polishes with damped Newton on exact eigenlevels. Throws
/// CalibrationError when no physical solution reproduces the observables.
CalibrationResult calibrate(const ReferenceObservables& obs,
                            bool allow_omega_q_shift = true, int n_max = 3);

struct CalibrationError : std::runtime_error {
  explicit CalibrationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bellcool
