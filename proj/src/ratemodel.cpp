#include "bellcool/ratemodel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "bellcool/units.hpp"

namespace bellcool {

void Populations::validate() const {
  double sum = 0.0;
  for (double p : as_array()) {
    if (p < -1e-12 || p > 1.0 + 1e-12)
      throw std::invalid_argument("Populations: entry outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("Populations: sum deviates from 1");
}

std::array<double, 4> rate_rhs(const Populations& p, const RateModel& m) {
  const double w = kAngularPerGHzUs;
  const double gp = w * m.gamma_p;
  const double gpp = w * m.gamma_p_prime;
  const double g1 = w * m.gamma_1;
  const double gphi = w * m.gamma_phi;

  std::array<double, 4> d;
  d[0] = -gp * p.p_tminus + g1 * (p.p_target + p.p_other);
  d[1] = gp * p.p_tminus - (g1 + gpp) * p.p_target - gphi * (p.p_target - p.p_other) +
         g1 * p.p_tplus;
  d[2] = -g1 * p.p_other + gphi * (p.p_target - p.p_other) + g1 * p.p_tplus;
  d[3] = gpp * p.p_target - 2.0 * g1 * p.p_tplus;
  return d;
}

namespace {

Eigen::Matrix4d rate_matrix(const RateModel& m) {
  // columns act on (T-, target, other, T+); built so each column sums to zero
  const double w = kAngularPerGHzUs;
  const double gp = w * m.gamma_p;
  const double gpp = w * m.gamma_p_prime;
  const double g1 = w * m.gamma_1;
  const double gphi = w * m.gamma_phi;
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  a(0, 0) = -gp;
  a(1, 0) = gp;
  a(0, 1) = g1;
  a(1, 1) = -(g1 + gpp + gphi);
  a(2, 1) = gphi;
  a(3, 1) = gpp;
  a(0, 2) = g1;
  a(1, 2) = gphi;
  a(2, 2) = -(g1 + gphi);
  a(1, 3) = g1;
  a(2, 3) = g1;
  a(3, 3) = -2.0 * g1;
  return a;
}

std::array<double, 4> step_rk4(const Eigen::Matrix4d& a, const std::array<double, 4>& p,
                               double h) {
  const Eigen::Vector4d v(p[0], p[1], p[2], p[3]);
  const Eigen::Vector4d k1 = a * v;
  const Eigen::Vector4d k2 = a * (v + 0.5 * h * k1);
  const Eigen::Vector4d k3 = a * (v + 0.5 * h * k2);
  const Eigen::Vector4d k4 = a * (v + h * k3);
  const Eigen::Vector4d out = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return {out(0), out(1), out(2), out(3)};
}

}  // namespace

RateTrajectory evolve_rates(const Populations& p0, const RateModel& m,
                            const std::vector<double>& t_grid) {
  p0.validate();
  const Eigen::Matrix4d a = rate_matrix(m);
  // resolve the fastest rate comfortably
  const double amax = a.cwiseAbs().maxCoeff();
  const double dt_max = amax > 0.0 ? 0.1 / amax : 1e9;

  RateTrajectory traj;
  std::array<double, 4> p = p0.as_array();
  traj.t_us.push_back(t_grid.front());
  traj.populations.push_back(p);
  for (size_t seg = 0; seg + 1 < t_grid.size(); ++seg) {
    const double span = t_grid[seg + 1] - t_grid[seg];
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_max)));
    const double h = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) p = step_rk4(a, p, h);
    traj.t_us.push_back(t_grid[seg + 1]);
    traj.populations.push_back(p);
  }
  return traj;
}

Populations rate_steady_state(const RateModel& m) {
  Eigen::Matrix4d a = rate_matrix(m);
  // replace the first row with the normalization constraint
  Eigen::Matrix4d b = a;
  b.row(0).setOnes();
  Eigen::Vector4d rhs(1.0, 0.0, 0.0, 0.0);
  const Eigen::Vector4d p = b.fullPivLu().solve(rhs);
  return Populations{p(0), p(1), p(2), p(3)};
}

namespace {

double sum_squared_residuals(const RateData& data, const RateModel& m) {
  const RateTrajectory model = evolve_rates(data.p0, m, data.t_us);
  double ss = 0.0;
  if (!data.populations.empty()) {
    for (size_t i = 0; i < data.t_us.size(); ++i)
      for (int c = 0; c < 4; ++c) {
        const double r = model.populations[i][c] - data.populations[i][c];
        ss += r * r;
      }
  } else {
    for (size_t i = 0; i < data.t_us.size(); ++i) {
      const double r = model.populations[i][1] - data.fidelity[i];
      ss += r * r;
    }
  }
  return ss;
}

}  // namespace

FitResult fit_rates(const RateData& data, const RateModel& guess) {
  const size_t npts = data.t_us.size();
  if (npts < 10)
    throw std::invalid_argument("fit_rates: need at least 10 time points");
  if (!data.populations.empty() && data.populations.size() != npts)
    throw std::invalid_argument("fit_rates: population rows do not match time grid");
  if (data.populations.empty() && data.fidelity.size() != npts)
    throw std::invalid_argument("fit_rates: fidelity column does not match time grid");

  // log-parameterization keeps every proposal positive
  auto pack = [](const RateModel& m) {
    return std::array<double, 4>{std::log(std::max(m.gamma_p, 1e-12)),
                                 std::log(std::max(m.gamma_p_prime, 1e-12)),
                                 std::log(std::max(m.gamma_1, 1e-12)),
                                 std::log(std::max(m.gamma_phi, 1e-12))};
  };
  auto unpack = [](const std::array<double, 4>& x) {
    return RateModel{std::exp(x[0]), std::exp(x[1]), std::exp(x[2]), std::exp(x[3])};
  };

  int evals = 0;
  auto cost = [&](const std::array<double, 4>& x) {
    ++evals;
    return sum_squared_residuals(data, unpack(x));
  };

  // Nelder-Mead simplex
  constexpr int n = 4;
  std::array<std::array<double, 4>, n + 1> simplex;
  std::array<double, n + 1> f;
  simplex[0] = pack(guess);
  f[0] = cost(simplex[0]);
  for (int i = 0; i < n; ++i) {
    simplex[i + 1] = simplex[0];
    simplex[i + 1][i] += 0.5;
    f[i + 1] = cost(simplex[i + 1]);
  }

  const int max_evals = 4000;
  const double ftol = 1e-14;
  auto order = [&]() {
    std::array<int, n + 1> idx;
    for (int i = 0; i <= n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
    std::array<std::array<double, 4>, n + 1> s2;
    std::array<double, n + 1> f2;
    for (int i = 0; i <= n; ++i) {
      s2[i] = simplex[idx[i]];
      f2[i] = f[idx[i]];
    }
    simplex = s2;
    f = f2;
  };

  bool converged = false;
  while (evals < max_evals) {
    order();
    if (std::abs(f[n] - f[0]) <= ftol * (std::abs(f[0]) + ftol)) {
      converged = true;
      break;
    }
    std::array<double, 4> centroid{};
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < 4; ++d) centroid[d] += simplex[i][d] / n;

    auto blend = [&](double coef) {
      std::array<double, 4> x;
      for (int d = 0; d < 4; ++d) x[d] = centroid[d] + coef * (simplex[n][d] - centroid[d]);
      return x;
    };
    const auto xr = blend(-1.0);
    const double fr = cost(xr);
    if (fr < f[0]) {
      const auto xe = blend(-2.0);
      const double fe = cost(xe);
      if (fe < fr) {
        simplex[n] = xe;
        f[n] = fe;
      } else {
        simplex[n] = xr;
        f[n] = fr;
      }
    } else if (fr < f[n - 1]) {
      simplex[n] = xr;
      f[n] = fr;
    } else {
      const auto xc = blend(fr < f[n] ? -0.5 : 0.5);
      const double fc = cost(xc);
      if (fc < std::min(fr, f[n])) {
        simplex[n] = xc;
        f[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int d = 0; d < 4; ++d)
            simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
          f[i] = cost(simplex[i]);
        }
      }
    }
  }
  order();

  FitResult out;
  out.rates = unpack(simplex[0]);
  out.diagnostics.converged = converged;
  out.diagnostics.evaluations = evals;
  const double ss = f[0];
  out.diagnostics.residual_norm = std::sqrt(ss);

  // R^2 against the observed series
  double mean = 0.0;
  size_t count = 0;
  auto each_obs = [&](auto&& fn) {
    if (!data.populations.empty()) {
      for (const auto& row : data.populations)
        for (double v : row) fn(v);
    } else {
      for (double v : data.fidelity) fn(v);
    }
  };
  each_obs([&](double v) {
    mean += v;
    ++count;
  });
  mean /= static_cast<double>(count);
  double ss_tot = 0.0;
  each_obs([&](double v) { ss_tot += (v - mean) * (v - mean); });
  out.diagnostics.r_squared = ss_tot > 0.0 ? 1.0 - ss / ss_tot : 1.0;

  // standard errors from a finite-difference Gauss-Newton Jacobian in the
  // (linear) rate variables
  const int nobs = static_cast<int>(data.populations.empty() ? npts : 4 * npts);
  const int dof = std::max(1, nobs - 4);
  const double sigma2 = ss / dof;
  Eigen::MatrixXd jac(nobs, 4);
  const RateModel best = out.rates;
  auto predict = [&](const RateModel& m) {
    const RateTrajectory model = evolve_rates(data.p0, m, data.t_us);
    Eigen::VectorXd y(nobs);
    int k = 0;
    for (size_t i = 0; i < npts; ++i) {
      if (!data.populations.empty())
        for (int c = 0; c < 4; ++c) y(k++) = model.populations[i][c];
      else
        y(k++) = model.populations[i][1];
    }
    return y;
  };
  const Eigen::VectorXd y0 = predict(best);
  const std::array<double, 4> base = {best.gamma_p, best.gamma_p_prime, best.gamma_1,
                                      best.gamma_phi};
  for (int j = 0; j < 4; ++j) {
    RateModel m = best;
    const double h = std::max(1e-10, 1e-4 * base[j]);
    (j == 0 ? m.gamma_p : j == 1 ? m.gamma_p_prime : j == 2 ? m.gamma_1 : m.gamma_phi) +=
        h;
    jac.col(j) = (predict(m) - y0) / h;
  }
  const Eigen::Matrix4d jtj = jac.transpose() * jac;
  const Eigen::Matrix4d cov = sigma2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
  for (int j = 0; j < 4; ++j)
    out.diagnostics.stderr_ghz[j] = std::sqrt(std::max(0.0, cov(j, j)));
  return out;
}

}  // namespace bellcool
