#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "sdecert/error.hpp"
#include "sdecert/evt.hpp"

using namespace sdecert;

namespace {

std::vector<double> gpd_draws(double xi, double scale, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> out(n);
  for (double& x : out) x = oracle::gpd_sample(xi, scale, u(gen));
  return out;
}

}  // namespace

TEST(GpdCdf, SpecValues) {
  EXPECT_NEAR(gpd_cdf(0.0, 2.0, 2.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(gpd_cdf(0.0, 2.0, 2.0), 0.632121, 1e-6);
  EXPECT_DOUBLE_EQ(gpd_cdf(-0.5, 1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(gpd_cdf(1.0, 1.0, 1.0), 0.5);
  EXPECT_EQ(gpd_cdf(-0.3, 1.0, 0.0), 0.0);
}

TEST(GpdCdf, OutsideSupportThrows) {
  EXPECT_THROW(gpd_cdf(0.1, 1.0, -0.5), Error);
  EXPECT_THROW(gpd_cdf(-0.5, 1.0, 2.5), Error);
}

TEST(GpdCdf, Monotone) {
  for (double xi : {-0.8, -0.2, 0.0, 0.3, 2.0}) {
    double prev = 0.0;
    const double top = xi < 0.0 ? -1.0 / xi : 30.0;
    for (int i = 0; i <= 400; ++i) {
      const double x = top * i / 400.0;
      const double f = gpd_cdf(xi, 1.0, x);
      ASSERT_GE(f, prev) << xi << " " << x;
      prev = f;
    }
  }
}

// F_ξ − F_0 = ½ ξ t² e^{−t} + O(ξ²) with t = x/β, and t²e^{−t}/2 peaks at 2e^{−2} ≈ 0.271.
TEST(GpdCdf, SmallShapeApproachesExponential) {
  for (double xi : {1e-6, -1e-6, 1e-9, -1e-9}) {
    double worst = 0.0;
    for (double x = 0.0; x <= 40.0; x += 0.01) worst = std::max(worst, std::abs(gpd_cdf(xi, 1.0, x) - gpd_cdf(0.0, 1.0, x)));
    EXPECT_LE(worst, 0.28 * std::abs(xi) + 1e-12) << xi;
    EXPECT_GE(worst, 0.26 * std::abs(xi)) << xi;
  }
}

TEST(GpdQuantile, InvertsCdf) {
  for (double xi : {-0.5, -0.1822, 0.0, 0.4}) {
    for (double p : {0.0, 0.1, 0.5, 0.9, 0.999}) {
      EXPECT_NEAR(gpd_cdf(xi, 0.7, gpd_quantile(xi, 0.7, p)), p, 1e-12);
    }
  }
}

TEST(SelectThreshold, RankedIntegers) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_EQ(select_threshold(v, 0.05), 95.0);
  EXPECT_EQ(exceedances_over(v, 95.0).size(), 5u);
  EXPECT_EQ(exceedances_over(v, 95.0).front(), 1.0);
}

TEST(SelectThreshold, Degenerate) {
  const std::vector<double> same(50, 1.5);
  EXPECT_THROW(select_threshold(same, 0.05), Error);
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_THROW(select_threshold(v, 0.05, 30), Error);
}

TEST(FitGpd, RecoversRingTailParameters) {
  std::vector<double> xi, zeta;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto fit = fit_gpd(gpd_draws(-0.1822, 0.0326, 5000, seed));
    EXPECT_TRUE(fit.converged);
    xi.push_back(fit.xi);
    zeta.push_back(fit.scale);
  }
  EXPECT_NEAR(oracle::median(xi), -0.1822, 0.05);
  EXPECT_NEAR(oracle::median(zeta), 0.0326, 0.15 * 0.0326);
}

TEST(FitGpd, ConsistentInSampleSize) {
  auto spread = [](std::size_t n) {
    std::vector<double> err;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      err.push_back(std::abs(fit_gpd(gpd_draws(-0.3, 1.0, n, 100 + seed)).xi + 0.3));
    }
    return oracle::median(err);
  };
  EXPECT_LT(spread(100000), spread(1000));
}

TEST(FitGpd, HeavyTailAndExponential) {
  const auto heavy = fit_gpd(gpd_draws(0.5, 2.0, 20000, 7));
  EXPECT_NEAR(heavy.xi, 0.5, 0.05);
  EXPECT_NEAR(heavy.scale, 2.0, 0.15);
  const auto expo = fit_gpd(gpd_draws(0.0, 1.0, 20000, 8));
  EXPECT_NEAR(expo.xi, 0.0, 0.03);
}

TEST(FitGpd, LikelihoodIsMaximal) {
  const auto x = gpd_draws(-0.2, 0.5, 3000, 9);
  const auto fit = fit_gpd(x);
  EXPECT_NEAR(fit.log_likelihood, gpd_log_likelihood(x, fit.xi, fit.scale), 1e-9);
  for (double dxi : {-0.02, 0.02}) {
    for (double ds : {0.98, 1.02}) {
      EXPECT_LE(gpd_log_likelihood(x, fit.xi + dxi, fit.scale * ds), fit.log_likelihood + 1e-9);
    }
  }
}

TEST(FitGpd, InputErrors) {
  EXPECT_THROW(fit_gpd(std::vector<double>(10, 1.0)), Error);
  EXPECT_THROW(fit_gpd(std::vector<double>(40, 0.3)), Error);
  std::vector<double> bad = gpd_draws(-0.2, 1.0, 40, 1);
  bad[3] = -0.1;
  EXPECT_THROW(fit_gpd(bad), Error);
}

TEST(FitGpd, PwmSeedIsReasonable) {
  const auto pwm = fit_gpd_pwm(gpd_draws(-0.25, 1.0, 20000, 10));
  EXPECT_NEAR(pwm.xi, -0.25, 0.05);
  EXPECT_NEAR(pwm.scale, 1.0, 0.1);
}

TEST(Endpoint, SpecValues) {
  GpdFit f;
  f.threshold = 1.48;
  f.scale = 0.0326;
  f.xi = -0.1822;
  const double v = gpd_upper_endpoint(f);
  EXPECT_NEAR(v, 1.48 + 0.0326 / 0.1822, 1e-14);
  // the published 1.65893 is 1.658924 rounded up in the last digit
  EXPECT_NEAR(v, 1.65893, 1e-5);
  EXPECT_NEAR(1.0 - 1.0 / v, 0.3972, 5e-5);

  GpdFit g;
  g.threshold = 1.0;
  g.scale = 0.5;
  g.xi = -0.5;
  EXPECT_DOUBLE_EQ(gpd_upper_endpoint(g), 2.0);

  GpdFit heavy;
  heavy.xi = 0.1;
  heavy.scale = 1.0;
  try {
    gpd_upper_endpoint(heavy);
    FAIL() << "expected failure";
  } catch (const EstimatorFailure& e) {
    EXPECT_EQ(e.remedy(), kCouplingRemedy);
  }
}

TEST(Endpoint, CoversObservedData) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<double> v = gpd_draws(-0.3, 0.2, 4000, 200 + seed);
    for (double& x : v) x += 1.0;
    const double thr = select_threshold(v, 0.05, 30);
    const auto exc = exceedances_over(v, thr);
    const auto fit = fit_gpd(exc, thr);
    if (!(fit.xi < 0.0) || !fit.converged) continue;
    EXPECT_GE(gpd_upper_endpoint(fit), *std::max_element(v.begin(), v.end())) << seed;
  }
}

TEST(Diagnostic, RowsAreSortedAndBounded) {
  const auto x = gpd_draws(-0.2, 1.0, 500, 11);
  const auto fit = fit_gpd(x);
  const auto rows = gpd_diagnostic(x, fit);
  ASSERT_EQ(rows.size(), x.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i - 1].exceedance, rows[i].exceedance);
    EXPECT_LE(rows[i - 1].empirical_cdf, rows[i].empirical_cdf);
  }
  EXPECT_DOUBLE_EQ(rows.back().empirical_cdf, 1.0);
  double ks = 0.0;
  for (const auto& r : rows) ks = std::max(ks, std::abs(r.empirical_cdf - r.fitted_cdf));
  EXPECT_LT(ks, 0.07);
}
