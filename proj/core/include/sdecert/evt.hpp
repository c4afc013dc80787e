#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdecert {

/// Generalized Pareto fit to the exceedances over a threshold V.
struct GpdFit {
  double threshold = 0.0;
  double xi = 0.0;
  double scale = 0.0;
  std::size_t n_exceedances = 0;
  double log_likelihood = 0.0;
  /// False when the optimum sits on the ξ search boundary.
  bool converged = false;
};

inline constexpr std::size_t kGpdMinExceedances = 30;
inline constexpr double kGpdXiLower = -1.0;
inline constexpr double kGpdXiUpper = 5.0;

/// F(x) = 1 − (1 + ξx/β)^{−1/ξ}, or 1 − e^{−x/β} for ξ = 0.
/// Throws for x < 0 or, when ξ < 0, x beyond the endpoint −β/ξ.
double gpd_cdf(double xi, double beta, double x);

/// Inverse of gpd_cdf for p in [0, 1).
double gpd_quantile(double xi, double beta, double p);

/// Lower empirical (1 − fraction) quantile: the order statistic at ⌈(1 − fraction)n⌉.
/// Throws unless at least `min_exceedances` samples lie strictly above it.
double select_threshold(std::span<const double> samples, double exceedance_fraction,
                        std::size_t min_exceedances = 1);

/// Samples strictly above `threshold`, shifted by it.
std::vector<double> exceedances_over(std::span<const double> samples, double threshold);

/// Probability-weighted-moment estimate; used to seed the likelihood search.
GpdFit fit_gpd_pwm(std::span<const double> exceedances);

/// Maximum likelihood over ξ ∈ [−1, 5] via the profile likelihood in θ = ξ/ζ.
/// Throws for fewer than `min_exceedances` points, nonpositive values, or all-equal data.
GpdFit fit_gpd(std::span<const double> exceedances, double threshold = 0.0,
               std::size_t min_exceedances = kGpdMinExceedances);

/// Log-likelihood of positive exceedances under GPD(ξ, ζ); −∞ outside the support.
double gpd_log_likelihood(std::span<const double> exceedances, double xi, double scale);

/// V − ζ/ξ. Throws EstimatorFailure when ξ ≥ 0 (no finite endpoint).
double gpd_upper_endpoint(const GpdFit& fit);

struct GpdDiagnosticRow {
  double exceedance;
  double empirical_cdf;
  double fitted_cdf;
};

/// Empirical CDF (i/n on the sorted data) next to the fitted CDF.
std::vector<GpdDiagnosticRow> gpd_diagnostic(std::span<const double> exceedances, const GpdFit& fit);

}  // namespace sdecert
