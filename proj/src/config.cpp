#include "bellcool/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bellcool {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, int line) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config line " + std::to_string(line) + ": expected a number, got '" +
                      v + "'");
  }
}

int parse_int(const std::string& v, int line) {
  const double d = parse_double(v, line);
  if (d != std::floor(d))
    throw ConfigError("config line " + std::to_string(line) + ": expected an integer");
  return static_cast<int>(d);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config line " + std::to_string(line) + ": expected true/false");
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config cfg;

  using Setter = std::function<void(Config&, const std::string&, int)>;
  auto num = [](double Config::* field, double lo, double hi) {
    return Setter([field, lo, hi](Config& c, const std::string& v, int line) {
      const double d = parse_double(v, line);
      if (d < lo || d > hi)
        throw ConfigError("config line " + std::to_string(line) + ": value " + v +
                          " outside allowed range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]");
      c.*field = d;
    });
  };
  auto obs = [](double ReferenceObservables::* field, double lo, double hi) {
    return Setter([field, lo, hi](Config& c, const std::string& v, int line) {
      const double d = parse_double(v, line);
      if (d < lo || d > hi)
        throw ConfigError("config line " + std::to_string(line) + ": value out of range");
      c.observables.*field = d;
    });
  };
  auto integer = [](int Config::* field, int lo, int hi) {
    return Setter([field, lo, hi](Config& c, const std::string& v, int line) {
      const int d = parse_int(v, line);
      if (d < lo || d > hi)
        throw ConfigError("config line " + std::to_string(line) + ": value out of range");
      c.*field = d;
    });
  };
  auto boolean = [](bool Config::* field) {
    return Setter([field](Config& c, const std::string& v, int line) {
      c.*field = parse_bool(v, line);
    });
  };

  const std::map<std::string, Setter> schema = {
      {"device.omega_c", num(&Config::omega_c, 0.1, 100.0)},
      {"device.omega_q", num(&Config::omega_q, 0.1, 100.0)},
      {"device.omega_q_A", num(&Config::omega_q_A, 0.1, 100.0)},
      {"device.omega_q_B", num(&Config::omega_q_B, 0.1, 100.0)},
      {"device.J", num(&Config::J, 1e-6, 10.0)},
      {"device.g_A", num(&Config::g_A, 1e-6, 10.0)},
      {"device.g_B", num(&Config::g_B, 1e-6, 10.0)},
      {"device.kappa_plus", num(&Config::kappa_plus, 0.0, 1.0)},
      {"device.kappa_minus", num(&Config::kappa_minus, 0.0, 1.0)},
      {"device.kappa_in_A", num(&Config::kappa_in_A, 0.0, 1.0)},
      {"device.kappa_in_B", num(&Config::kappa_in_B, 0.0, 1.0)},
      {"device.kappa_out", num(&Config::kappa_out, 0.0, 1.0)},
      {"device.gamma_1", num(&Config::gamma_1, 0.0, 1.0)},
      {"device.gamma_phi", num(&Config::gamma_phi, 0.0, 1.0)},
      {"device.calibrate", boolean(&Config::calibrate)},
      {"device.calibrate_omega_q", boolean(&Config::calibrate_omega_q)},
      {"drive.eps", num(&Config::drive_eps, 0.0, 10.0)},
      {"drive.phi", num(&Config::drive_phi, -100.0, 100.0)},
      {"drive.omega_d", num(&Config::drive_omega_d, 0.1, 100.0)},
      {"simulation.n_max", integer(&Config::n_max, 1, 6)},
      {"simulation.exp_n_max", integer(&Config::exp_n_max, 1, 4)},
      {"simulation.implicit_dt", num(&Config::implicit_dt, 1e-5, 1.0)},
      {"simulation.rk4_dt", num(&Config::rk4_dt, 0.0, 1.0)},
      {"simulation.workers", integer(&Config::workers, 0, 1024)},
      {"simulation.seed",
       Setter([](Config& c, const std::string& v, int line) {
         c.seed = static_cast<unsigned long long>(parse_double(v, line));
       })},
      {"map.phi_points", integer(&Config::map_phi_points, 2, 4096)},
      {"map.omega_points", integer(&Config::map_omega_points, 2, 4096)},
      {"map.omega_min", num(&Config::map_omega_min, 0.1, 100.0)},
      {"map.omega_max", num(&Config::map_omega_max, 0.1, 100.0)},
      {"map.tau", num(&Config::map_tau, 0.01, 1000.0)},
      {"dynamics.tau_max", num(&Config::dynamics_tau_max, 0.01, 1000.0)},
      {"dynamics.points", integer(&Config::dynamics_points, 10, 100000)},
      {"spectrum.points", integer(&Config::spectrum_points, 2, 1000000)},
      {"spectrum.span", num(&Config::spectrum_span, 1e-4, 10.0)},
      {"crossing.points", integer(&Config::crossing_points, 2, 1000000)},
      {"crossing.span", num(&Config::crossing_span, 1e-5, 10.0)},
      {"observables.two_delta", obs(&ReferenceObservables::two_delta, 1e-6, 1.0)},
      {"observables.band_plus", obs(&ReferenceObservables::band_plus, 0.1, 100.0)},
      {"observables.band_minus", obs(&ReferenceObservables::band_minus, 0.1, 100.0)},
      {"observables.chi_plus", obs(&ReferenceObservables::chi_plus_mag, 0.0, 1.0)},
      {"observables.chi_minus", obs(&ReferenceObservables::chi_minus_mag, 0.0, 1.0)},
  };

  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line) + ": expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty())
      throw ConfigError("config line " + std::to_string(line) + ": empty value");
    const auto it = schema.find(key);
    if (it == schema.end())
      throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key +
                        "'");
    it->second(cfg, value, line);
  }

  // cross-field sanity: keep the observables block consistent with overrides
  cfg.observables.omega_c = cfg.omega_c;
  cfg.observables.omega_q = cfg.omega_q;
  cfg.observables.kappa_plus = cfg.kappa_plus;
  cfg.observables.kappa_minus = cfg.kappa_minus;
  if (!std::isnan(cfg.map_omega_min) && !std::isnan(cfg.map_omega_max) &&
      !(cfg.map_omega_min < cfg.map_omega_max))
    throw ConfigError("config: map.omega_min must be < map.omega_max");
  return cfg;
}

Config parse_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config_text(ss.str());
}

DeviceParams Config::effective_device() const {
  DeviceParams dev;
  if (calibrate && std::isnan(J) && std::isnan(g_A) && std::isnan(g_B)) {
    dev = bellcool::calibrate(observables, calibrate_omega_q, n_max).device;
  } else {
    dev.omega_c = omega_c;
    dev.omega_q_A = dev.omega_q_B = omega_q;
    if (!std::isnan(J)) dev.J = J;
    if (!std::isnan(g_A)) dev.g_A = g_A;
    if (!std::isnan(g_B)) dev.g_B = g_B;
    if (std::isnan(g_A) != std::isnan(g_B)) {
      const double g = std::isnan(g_A) ? g_B : g_A;
      dev.g_A = dev.g_B = g;
    }
  }
  if (!std::isnan(omega_q_A)) dev.omega_q_A = omega_q_A;
  if (!std::isnan(omega_q_B)) dev.omega_q_B = omega_q_B;
  dev.kappa_plus = kappa_plus;
  dev.kappa_minus = kappa_minus;
  dev.kappa_in_A = kappa_in_A;
  dev.kappa_in_B = kappa_in_B;
  dev.kappa_out = kappa_out;
  dev.gamma_1 = gamma_1;
  dev.gamma_phi = gamma_phi;
  dev.validate();
  return dev;
}

SimOptions Config::sim_options() const {
  SimOptions opts;
  opts.n_max = exp_n_max;
  opts.implicit_dt = implicit_dt;
  opts.workers = workers;
  return opts;
}

double Config::effective_eps(Branch branch) const {
  return std::isnan(drive_eps) ? default_drive_eps(branch) : drive_eps;
}

}  // namespace bellcool
