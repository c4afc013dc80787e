#include "sdecert/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "sdecert/error.hpp"

namespace sdecert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// mean log(1 + θx); this is ξ at the profile optimum for fixed θ
double profile_xi(std::span<const double> x, double theta) {
  double s = 0.0;
  for (double v : x) s += std::log1p(theta * v);
  return s / static_cast<double>(x.size());
}

double profile_loglik(std::span<const double> x, double theta) {
  const double n = static_cast<double>(x.size());
  if (theta == 0.0) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    return -n * std::log(mean) - n;
  }
  const double xi = profile_xi(x, theta);
  if (!std::isfinite(xi)) return -kInf;
  const double scale = xi / theta;
  if (!(scale > 0.0)) return -kInf;
  return -n * std::log(scale) - n - n * xi;
}

// θ with profile_xi(θ) == target on (lo, hi); profile_xi is increasing in θ
double solve_theta(std::span<const double> x, double target, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (profile_xi(x, mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double gpd_cdf(double xi, double beta, double x) {
  if (!(beta > 0.0)) throw Error("gpd_cdf: scale must be positive");
  if (!(x >= 0.0)) throw Error("gpd_cdf: x must be nonnegative");
  if (xi == 0.0) return -std::expm1(-x / beta);
  const double z = xi * x / beta;
  if (z < -1.0) throw Error("gpd_cdf: x = " + std::to_string(x) + " lies beyond the upper endpoint");
  if (z == -1.0) return 1.0;
  return -std::expm1(-std::log1p(z) / xi);
}

double gpd_quantile(double xi, double beta, double p) {
  if (!(beta > 0.0)) throw Error("gpd_quantile: scale must be positive");
  if (!(p >= 0.0 && p < 1.0)) throw Error("gpd_quantile: p must lie in [0, 1)");
  const double log_tail = std::log1p(-p);
  if (xi == 0.0) return -beta * log_tail;
  return beta * std::expm1(-xi * log_tail) / xi;
}

double select_threshold(std::span<const double> samples, double exceedance_fraction, std::size_t min_exceedances) {
  if (samples.empty()) throw Error("select_threshold: no samples");
  if (!(exceedance_fraction > 0.0 && exceedance_fraction < 1.0)) {
    throw Error("select_threshold: exceedance fraction must lie in (0, 1)");
  }
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - exceedance_fraction) * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  const double threshold = sorted[rank - 1];
  const auto above = static_cast<std::size_t>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), threshold));
  if (above < std::max<std::size_t>(min_exceedances, 1)) {
    throw Error("select_threshold: only " + std::to_string(above) + " samples exceed the threshold " +
                std::to_string(threshold) + " (need " + std::to_string(std::max<std::size_t>(min_exceedances, 1)) +
                ")");
  }
  return threshold;
}

std::vector<double> exceedances_over(std::span<const double> samples, double threshold) {
  std::vector<double> out;
  for (double v : samples) {
    if (v > threshold) out.push_back(v - threshold);
  }
  return out;
}

GpdFit fit_gpd_pwm(std::span<const double> exceedances) {
  if (exceedances.size() < 2) throw Error("fit_gpd_pwm: need at least two exceedances");
  std::vector<double> sorted(exceedances.begin(), exceedances.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double a0 = 0.0;
  double a1 = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double p = (static_cast<double>(i + 1) - 0.35) / n;
    a0 += sorted[i];
    a1 += (1.0 - p) * sorted[i];
  }
  a0 /= n;
  a1 /= n;
  const double denom = a0 - 2.0 * a1;
  if (!(std::abs(denom) > 0.0)) throw Error("fit_gpd_pwm: degenerate moments");
  GpdFit fit;
  fit.xi = 2.0 - a0 / denom;
  fit.scale = 2.0 * a0 * a1 / denom;
  fit.n_exceedances = sorted.size();
  fit.log_likelihood = gpd_log_likelihood(sorted, fit.xi, fit.scale);
  fit.converged = fit.scale > 0.0;
  return fit;
}

double gpd_log_likelihood(std::span<const double> exceedances, double xi, double scale) {
  if (!(scale > 0.0)) return -kInf;
  const double n = static_cast<double>(exceedances.size());
  double s = 0.0;
  if (xi == 0.0) {
    for (double v : exceedances) s += v;
    return -n * std::log(scale) - s / scale;
  }
  for (double v : exceedances) {
    const double z = xi * v / scale;
    if (!(z > -1.0)) return -kInf;
    s += std::log1p(z);
  }
  return -n * std::log(scale) - (1.0 + 1.0 / xi) * s;
}

GpdFit fit_gpd(std::span<const double> exceedances, double threshold, std::size_t min_exceedances) {
  const std::size_t n = exceedances.size();
  if (n < std::max<std::size_t>(min_exceedances, 2)) {
    throw Error("fit_gpd: " + std::to_string(n) + " exceedances, need at least " +
                std::to_string(std::max<std::size_t>(min_exceedances, 2)));
  }
  const auto [min_it, max_it] = std::minmax_element(exceedances.begin(), exceedances.end());
  const double x_min = *min_it;
  const double x_max = *max_it;
  if (!(x_min > 0.0) || !std::isfinite(x_max)) throw Error("fit_gpd: exceedances must be positive and finite");
  if (x_min == x_max) throw Error("fit_gpd: all exceedances are equal, GPD fit is degenerate");

  // θ range giving ξ in [kGpdXiLower, kGpdXiUpper]
  const double theta_floor = -1.0 / x_max;
  const double theta_lo = solve_theta(exceedances, kGpdXiLower, theta_floor, 0.0);
  double hi = 1.0 / x_max;
  while (profile_xi(exceedances, hi) < kGpdXiUpper && hi < 1e300) hi *= 4.0;
  const double theta_hi = solve_theta(exceedances, kGpdXiUpper, 0.0, hi);

  // coarse scan: linear on the negative side, geometric on the positive side
  std::vector<double> grid;
  constexpr int kSide = 120;
  for (int i = 0; i <= kSide; ++i) grid.push_back(theta_lo * (1.0 - static_cast<double>(i) / kSide));
  const double pos_lo = 1e-8 / x_max;
  for (int i = 0; i <= kSide; ++i) {
    grid.push_back(pos_lo * std::pow(theta_hi / pos_lo, static_cast<double>(i) / kSide));
  }
  try {
    const GpdFit pwm = fit_gpd_pwm(exceedances);
    const double theta_pwm = pwm.xi / pwm.scale;
    if (pwm.scale > 0.0 && theta_pwm > theta_lo && theta_pwm < theta_hi) grid.push_back(theta_pwm);
  } catch (const Error&) {
  }
  std::sort(grid.begin(), grid.end());

  std::size_t best = 0;
  double best_ll = -kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ll = profile_loglik(exceedances, grid[i]);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }
  if (!std::isfinite(best_ll)) throw Error("fit_gpd: likelihood is not finite anywhere on the search range");

  const double a = grid[best == 0 ? 0 : best - 1];
  const double b = grid[std::min(best + 1, grid.size() - 1)];
  double theta = grid[best];
  double ll = best_ll;
  if (a < b) {
    const auto neg = [&](double t) { return -profile_loglik(exceedances, t); };
    const auto [t_opt, f_opt] = boost::math::tools::brent_find_minima(neg, a, b, 50);
    if (-f_opt >= ll) {
      theta = t_opt;
      ll = -f_opt;
    }
  }

  GpdFit fit;
  fit.threshold = threshold;
  fit.n_exceedances = n;
  fit.log_likelihood = ll;
  if (theta == 0.0) {
    fit.xi = 0.0;
    fit.scale = std::accumulate(exceedances.begin(), exceedances.end(), 0.0) / static_cast<double>(n);
  } else {
    fit.xi = profile_xi(exceedances, theta);
    fit.scale = fit.xi / theta;
  }
  const double edge = 1e-6 * (theta_hi - theta_lo);
  fit.converged = std::isfinite(fit.xi) && fit.scale > 0.0 && theta > theta_lo + edge && theta < theta_hi - edge;
  return fit;
}

double gpd_upper_endpoint(const GpdFit& fit) {
  if (!(fit.xi < 0.0)) {
    throw EstimatorFailure("fitted GPD shape ξ = " + std::to_string(fit.xi) + " ≥ 0 has no finite upper endpoint",
                           kCouplingRemedy);
  }
  if (!(fit.scale > 0.0)) throw Error("gpd_upper_endpoint: scale must be positive");
  return fit.threshold - fit.scale / fit.xi;
}

std::vector<GpdDiagnosticRow> gpd_diagnostic(std::span<const double> exceedances, const GpdFit& fit) {
  std::vector<double> sorted(exceedances.begin(), exceedances.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<GpdDiagnosticRow> rows;
  rows.reserve(sorted.size());
  const double endpoint = fit.xi < 0.0 ? -fit.scale / fit.xi : kInf;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double x = sorted[i];
    const double fitted = x >= endpoint ? 1.0 : gpd_cdf(fit.xi, fit.scale, x);
    rows.push_back({x, static_cast<double>(i + 1) / n, fitted});
  }
  return rows;
}

}  // namespace sdecert
