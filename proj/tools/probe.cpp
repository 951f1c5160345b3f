// Development probe: prints calibration results, dispersive quantities,
// pump-rate scans and integrator timings. Not part of the shipped surface.

#include <chrono>
#include <cstring>
#include <iostream>

#include "bellcool/device.hpp"
#include "bellcool/experiments.hpp"
#include "bellcool/lindblad.hpp"
#include "bellcool/observables.hpp"
#include "bellcool/units.hpp"

using namespace bellcool;

static double now_s() {
  using clk = std::chrono::steady_clock;
  return std::chrono::duration<double>(clk::now().time_since_epoch()).count();
}

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "calib";

  if (mode == "calib") {
    ReferenceObservables obs;
    auto t0 = now_s();
    auto cal = calibrate(obs, true, 3);
    std::cout << "calibrate took " << now_s() - t0 << " s\n";
    std::cout << cal.summary();
    std::cout << "J_initial " << cal.J_initial << "  g_initial " << cal.g_initial << "\n";

    const auto dp = dispersive_params(cal.device, DriveParams{}, 3);
    std::cout << "delta(formula) " << dp.delta * 1e3 << " MHz, delta_exact "
              << dp.delta_exact * 1e3 << " MHz\n";
    std::cout << "chi_plus " << dp.chi_plus * 1e3 << " MHz, chi_minus "
              << dp.chi_minus * 1e3 << " MHz\n";
    std::cout << "omega_q_bar " << dp.omega_q_bar << ", modes dressed "
              << dp.omega_c_plus_dressed << " / " << dp.omega_c_minus_dressed << "\n";
    std::cout << "bands: T0+ " << drive_frequency(dp, BellTarget::T0, Branch::Plus)
              << "  S+ " << drive_frequency(dp, BellTarget::S, Branch::Plus) << "  T0- "
              << drive_frequency(dp, BellTarget::T0, Branch::Minus) << "  S- "
              << drive_frequency(dp, BellTarget::S, Branch::Minus) << "\n";

    const auto ces = coupled_eigensystem(cal.device, 3);
    std::cout << "overlap T0 " << ces.overlap_T0 << " S " << ces.overlap_S << "\n";

    auto roots = odd_parity_phase(cal.device, 6.572);
    std::cout << "odd parity roots " << rad_to_deg(roots.first) << " deg, "
              << rad_to_deg(roots.second) << " deg\n";
    return 0;
  }

  ReferenceObservables obs;
  const DeviceParams dev = calibrate(obs, true, 3).device;

  if (mode == "stark") {
    for (double eps : {0.02, 0.05, 0.1, 0.15, 0.2}) {
      for (double phi : {0.0, std::numbers::pi}) {
        DriveParams drv = DriveParams::balanced(6.572, eps, phi);
        std::cout << "eps " << eps << " phi " << phi << " stark "
                  << (stark_shift(dev, drv, 3) - dispersive_params(dev, DriveParams{}, 3).omega_q_bar) * 1e3
                  << " MHz\n";
      }
    }
    return 0;
  }

  if (mode == "steptime") {
    // timing of the implicit stepper at map scale (n_max = 2)
    const int n_max = 2;
    const HilbertSpace space = device_space(n_max);
    const DriveParams drv = DriveParams::balanced(6.572, 0.06, 0.0);
    const Operator h = build_hamiltonian(dev, drv, Frame::DriveRotating, n_max);
    const auto channels = device_channels(dev, n_max);
    const State rho0(space, vacuum_qubit_state(space, bell_state_T_minus()));

    for (double dt : {0.2, 0.1, 0.05, 0.025}) {
      EvolveOptions eo;
      eo.method = EvolveMethod::TRBDF2;
      eo.dt = dt;
      eo.store_states = false;
      const double t0 = now_s();
      const auto res = evolve(rho0, h, channels, {0.0, 10.0}, eo);
      const double el = now_s() - t0;
      const auto f = bell_fidelities(qubit_sector(res.states.back(), space));
      std::cout << "dt " << dt << ": " << el << " s, steps " << res.steps << ", F = ["
                << f[0] << ", " << f[1] << ", " << f[2] << ", " << f[3] << "]\n";
    }
    return 0;
  }

  if (mode == "pump") {
    SimOptions opts;
    opts.n_max = 2;
    const double gamma1_ang = kAngularPerGHzUs * dev.gamma_1;
    std::cout << "gamma_1 angular " << gamma1_ang << " /us; target pump "
              << 5.0 * gamma1_ang << " /us\n";
    for (double eps : {0.02, 0.04, 0.06, 0.09, 0.12}) {
      const double t0 = now_s();
      const double rp = pump_rate(dev, BellTarget::T0, Branch::Plus, 0.0, eps, opts);
      const double rm = pump_rate(dev, BellTarget::S, Branch::Minus, std::numbers::pi, eps, opts);
      std::cout << "eps " << eps << ": pump(T0,+,phi=0) " << rp << " /us, pump(S,-,pi) "
                << rm << " /us   (" << now_s() - t0 << " s)\n";
    }
    return 0;
  }

  if (mode == "line") {
    // pump rate vs drive frequency around the predicted resonance
    SimOptions opts;
    opts.n_max = 2;
    for (double eps : {0.03, 0.06, 0.09}) {
      const double wd0 = drive_frequency(dev, BellTarget::T0, Branch::Plus, eps, 0.0, 3);
      const double wd0_n2 = drive_frequency(dev, BellTarget::T0, Branch::Plus, eps, 0.0, 2);
      std::cout << "eps " << eps << " predicted wd (n3) " << wd0 << " (n2) " << wd0_n2
                << "\n";
      for (double off_mhz : {-1.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5}) {
        const double wd = wd0 + off_mhz * 1e-3;
        const HilbertSpace space = device_space(opts.n_max);
        const DriveParams drv = DriveParams::balanced(wd, eps, 0.0);
        const Operator h = build_hamiltonian(dev, drv, Frame::DriveRotating, opts.n_max);
        const State rho0(space, vacuum_qubit_state(space, bell_state_T_minus()));
        EvolveOptions eo;
        eo.method = EvolveMethod::TRBDF2;
        eo.dt = 0.01;
        eo.store_states = false;
        const auto r1 = evolve(rho0, h, device_channels(dev, opts.n_max), {0.0, 0.5}, eo);
        const auto r2 = evolve(rho0, h, device_channels(dev, opts.n_max), {0.0, 1.5}, eo);
        const double f1 = bell_fidelities(qubit_sector(r1.states.back(), space))[1];
        const double f2 = bell_fidelities(qubit_sector(r2.states.back(), space))[1];
        std::cout << "  off " << off_mhz << " MHz: slope " << (f2 - f1) / 1.0 << " /us\n";
      }
    }
    return 0;
  }

  if (mode == "scan") {
    SimOptions opts;
    opts.n_max = 2;
    const double target = 5.0 * kAngularPerGHzUs * dev.gamma_1;
    const double ep = calibrate_drive_amplitude(dev, BellTarget::T0, Branch::Plus, 0.0, target, opts);
    const double em = calibrate_drive_amplitude(dev, BellTarget::S, Branch::Minus, std::numbers::pi, target, opts);
    std::cout << "eps(plus branch) " << ep << ", eps(minus branch) " << em << "\n";
    return 0;
  }

  std::cerr << "unknown probe mode\n";
  return 1;
}
