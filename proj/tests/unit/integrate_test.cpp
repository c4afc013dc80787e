#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sdecert/error.hpp"
#include "sdecert/integrate.hpp"
#include "sdecert/models.hpp"

using namespace sdecert;

namespace {

StateVec scalar(double v) { return StateVec::Constant(1, v); }

ModelPtr linear_model(double a, double s) {
  FunctionModel::Spec spec;
  spec.drift = [a](ConstVecRef x, VecRef out) { out[0] = a * x[0]; };
  spec.diffusion = [s](ConstVecRef, MatRef out) { out(0, 0) = s; };
  spec.constant_diffusion = true;
  return std::make_shared<FunctionModel>(spec);
}

ModelPtr geometric_noise() {
  FunctionModel::Spec spec;
  spec.drift = [](ConstVecRef, VecRef out) { out[0] = 0.0; };
  spec.diffusion = [](ConstVecRef x, MatRef out) { out(0, 0) = x[0]; };
  spec.diffusion_diagonal_derivative = [](ConstVecRef, VecRef out) { out[0] = 1.0; };
  return std::make_shared<FunctionModel>(spec);
}

}  // namespace

TEST(EmStep, SpecExamples) {
  EXPECT_DOUBLE_EQ(em_step(*linear_model(0.0, 1.0), scalar(0.0), 0.1, scalar(0.3))[0], 0.3);
  EXPECT_DOUBLE_EQ(em_step(*linear_model(-1.0, 0.0), scalar(1.0), 0.1, scalar(0.0))[0], 0.9);
  RingModel ring;
  const StateVec x = em_step(ring, Eigen::Vector2d(1.0, 0.0), 0.01, Eigen::Vector2d::Zero());
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], -0.01, 1e-15);
}

TEST(EmStep, DivergenceCarriesTime) {
  const auto m = linear_model(1e308, 0.0);
  try {
    em_step(*m, scalar(10.0), 1.0, scalar(0.0), 2.5);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_DOUBLE_EQ(e.time(), 3.5);
  }
}

TEST(MilsteinStep, GeometricNoiseCorrection) {
  const auto m = geometric_noise();
  EXPECT_NEAR(milstein_step(*m, scalar(1.0), 0.01, scalar(0.1))[0], 1.1, 1e-15);
  EXPECT_NEAR(milstein_step(*m, scalar(1.0), 0.01, scalar(0.2))[0], 1.215, 1e-15);
}

TEST(MilsteinStep, EqualsEmForConstantNoise) {
  RingModel ring;
  const Eigen::Vector2d x(0.4, -1.3);
  const Eigen::Vector2d dw(0.07, -0.02);
  EXPECT_EQ(milstein_step(ring, x, 0.01, dw), em_step(ring, x, 0.01, dw));
}

TEST(MilsteinStep, RejectsStateDependentNoiseWithoutDerivative) {
  FunctionModel::Spec spec;
  spec.drift = [](ConstVecRef, VecRef out) { out[0] = 0.0; };
  spec.diffusion = [](ConstVecRef x, MatRef out) { out(0, 0) = x[0]; };
  FunctionModel m(spec);
  EXPECT_THROW(milstein_step(m, scalar(1.0), 0.01, scalar(0.1)), Error);
}

TEST(Stepper, MatchesFreeFunctions) {
  auto ring = std::make_shared<RingModel>();
  Stepper s(ring, Scheme::EulerMaruyama);
  StateVec x = Eigen::Vector2d(0.2, 0.9);
  const Eigen::Vector2d dw(0.01, 0.03);
  const StateVec expect = em_step(*ring, x, 0.001, dw);
  s.step(x, 0.001, dw);
  EXPECT_TRUE(x.isApprox(expect, 1e-15));

  const auto g = geometric_noise();
  Stepper ms(g, Scheme::Milstein);
  StateVec y = scalar(1.0);
  ms.step(y, 0.01, scalar(0.2));
  EXPECT_NEAR(y[0], 1.215, 1e-15);
}

TEST(StepCount, RequiresMultiple) {
  EXPECT_EQ(step_count(1.0, 0.1), 10);
  EXPECT_EQ(step_count(10.0, 0.0008), 12500);
  EXPECT_THROW(step_count(1.0009, 0.002), Error);
}

TEST(RichardsonConstant, Orders) {
  EXPECT_DOUBLE_EQ(richardson_constant(1.0), 1.0);
  EXPECT_NEAR(richardson_constant(0.5), 1.0 / (std::sqrt(2.0) - 1.0), 1e-14);
  RingModel ring;
  EXPECT_EQ(default_strong_order(Scheme::EulerMaruyama, ring), 1.0);
  EXPECT_EQ(default_strong_order(Scheme::EulerMaruyama, *geometric_noise()), 0.5);
  EXPECT_EQ(default_strong_order(Scheme::Milstein, *geometric_noise()), 1.0);
}

TEST(PairedFineCoarse, DriftFreeIsExact) {
  FunctionModel::Spec spec;
  spec.dim = 3;
  spec.noise_dim = 3;
  spec.drift = [](ConstVecRef, VecRef out) { out.setZero(); };
  spec.diffusion = [](ConstVecRef, MatRef out) { out = Eigen::Matrix3d::Identity() * 0.25; };
  spec.constant_diffusion = true;
  auto free = std::make_shared<FunctionModel>(spec);
  NoiseStream a(3, 0);
  const StateVec x0 = Eigen::Vector3d(0.5, 0.0, -0.25);
  // use dyadic step so both paths accumulate sums of identical floating point terms
  const auto out = paired_fine_coarse(free, Scheme::EulerMaruyama, x0, 0.125, 2.0, a);
  EXPECT_TRUE(out.fine.isApprox(out.coarse, 1e-14));
}

TEST(PairedFineCoarse, DeterministicDecay) {
  NoiseStream s(1, 0);
  const auto out = paired_fine_coarse(linear_model(-1.0, 0.0), Scheme::EulerMaruyama, scalar(1.0), 0.1, 1.0, s);
  EXPECT_NEAR(out.fine[0], std::pow(0.9, 10), 1e-14);
  EXPECT_NEAR(out.coarse[0], std::pow(0.8, 5), 1e-14);
  EXPECT_NEAR(std::abs(out.fine[0] - out.coarse[0]), 0.34868 - 0.32768, 1e-5);
  EXPECT_NEAR(std::abs(out.fine[0] - out.coarse[0]), std::pow(0.9, 10) - std::pow(0.8, 5), 1e-12);
}

TEST(PairedFineCoarse, CoarseIncrementIsSumOfFine) {
  // With f ≡ 0 and σ = 1, each state is the running sum of its own increments.
  const auto m = linear_model(0.0, 1.0);
  NoiseStream s(9, 4);
  std::vector<double> fine;
  Stepper st(m, Scheme::EulerMaruyama);
  const auto out = paired_fine_coarse(st, scalar(0.0), 0.01, 0.1, s,
                                      [&](std::int64_t, const StateVec& x) { fine.push_back(x[0]); });
  ASSERT_EQ(fine.size(), 10u);
  NoiseStream r(9, 4);
  double sum = 0.0;
  for (int k = 0; k < 10; ++k) sum += std::sqrt(0.01) * r.normal();
  EXPECT_NEAR(out.coarse[0], sum, 1e-14);
  EXPECT_NEAR(fine.back(), sum, 1e-14);
}

TEST(PairedFineCoarse, ReplayIsBitIdentical) {
  auto ring = std::make_shared<RingModel>();
  NoiseStream a(77, 5);
  NoiseStream b(77, 5);
  const auto x = paired_fine_coarse(ring, Scheme::EulerMaruyama, Eigen::Vector2d(1.0, 0.0), 0.001, 1.0, a);
  const auto y = paired_fine_coarse(ring, Scheme::EulerMaruyama, Eigen::Vector2d(1.0, 0.0), 0.001, 1.0, b);
  EXPECT_EQ(x.fine, y.fine);
  EXPECT_EQ(x.coarse, y.coarse);
}

TEST(PairedFineCoarse, RejectsHorizonOffTheCoarseGrid) {
  NoiseStream s(1, 0);
  EXPECT_THROW(paired_fine_coarse(linear_model(-1.0, 1.0), Scheme::EulerMaruyama, scalar(0.0), 0.1, 0.3, s), Error);
}

TEST(Simulate, OrnsteinUhlenbeckStationaryVariance) {
  const double h = 0.1;
  auto m = make_ornstein_uhlenbeck(1.0, 1.0);
  Stepper st(m, Scheme::EulerMaruyama);
  NoiseStream s(11, 0);
  const std::int64_t steps = 2'000'000;
  const auto traj = simulate(st, scalar(0.0), h, steps, s, 1);
  ASSERT_EQ(traj.states.size(), static_cast<std::size_t>(steps + 1));
  EXPECT_DOUBLE_EQ(traj.times[1], h);
  double s2 = 0.0;
  std::int64_t n = 0;
  for (std::size_t i = 1000; i < traj.states.size(); ++i, ++n) s2 += traj.states[i][0] * traj.states[i][0];
  const double var = s2 / static_cast<double>(n);
  const double exact = 1.0 / (2.0 - h);
  // AR(1) with coefficient 0.9: effective sample size n (1−ρ²)/(1+ρ²)
  const double rho = 1.0 - h;
  const double se = exact * std::sqrt(2.0 * (1.0 + rho * rho) / ((1.0 - rho * rho) * static_cast<double>(n)));
  EXPECT_NEAR(var, exact, 3.0 * se);
}

namespace {

LangevinModel harmonic_langevin(double gamma, double sigma) {
  return LangevinModel(std::make_shared<HarmonicPotential>(1, 2.0), gamma, sigma);
}

}  // namespace

TEST(LangevinTwoStep, CovarianceScalesWithSigmaSquared) {
  const auto a = langevin_two_step_density(harmonic_langevin(0.7, 0.5), Eigen::Vector2d(0.3, -0.2), 0.01);
  const auto b = langevin_two_step_density(harmonic_langevin(0.7, 1.0), Eigen::Vector2d(0.3, -0.2), 0.01);
  EXPECT_TRUE(b.covariance.isApprox(4.0 * a.covariance, 1e-13));
  EXPECT_TRUE(a.mean.isApprox(b.mean, 1e-15));
}

TEST(LangevinTwoStep, VarianceIdentities) {
  const double h = 0.01;
  const double s = 0.8;
  const auto frictionless = langevin_two_step_density(harmonic_langevin(0.0, s), Eigen::Vector2d(0.1, 0.4), h);
  EXPECT_NEAR(frictionless.covariance(1, 1), 2.0 * s * s * h, 1e-15);
  for (double gamma : {0.0, 0.5, 3.0}) {
    const auto g = langevin_two_step_density(harmonic_langevin(gamma, s), Eigen::Vector2d(0.1, 0.4), h);
    EXPECT_NEAR(g.covariance(0, 0), s * s * h * h * h, 1e-18);
    EXPECT_NEAR(g.covariance(0, 1), g.covariance(1, 0), 1e-18);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.covariance);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(LangevinTwoStep, RejectsZeroNoise) {
  EXPECT_THROW(langevin_two_step_density(harmonic_langevin(1.0, 0.0), Eigen::Vector2d(0.0, 0.0), 0.01), Error);
}

TEST(LangevinTwoStep, MatchesMonteCarloOfTwoSteps) {
  const double h = 0.05;
  LangevinModel m(std::make_shared<RingPotential>(), 1.0, 0.5);
  const StateVec x0 = (StateVec(4) << 0.7, -0.4, 0.3, 0.9).finished();
  const auto g = langevin_two_step_density(m, x0, h);
  NoiseStream s(21, 0);
  const int n = 1'000'000;
  StateVec sum = StateVec::Zero(4);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(4, 4);
  StateVec dw(2);
  for (int i = 0; i < n; ++i) {
    s.fill_normal(dw, std::sqrt(h));
    StateVec x = em_step(m, x0, h, dw);
    s.fill_normal(dw, std::sqrt(h));
    x = em_step(m, x, h, dw);
    const StateVec d = x - g.mean;
    sum += d;
    sq += d * d.transpose();
  }
  const StateVec mean_dev = sum / n;
  const Eigen::MatrixXd cov = sq / n - mean_dev * mean_dev.transpose();
  for (int i = 0; i < 4; ++i) {
    EXPECT_LT(std::abs(mean_dev[i]), 4.0 * std::sqrt(g.covariance(i, i) / n)) << i;
    for (int j = 0; j < 4; ++j) {
      const double ref = g.covariance(i, j);
      const double scale = std::sqrt(g.covariance(i, i) * g.covariance(j, j));
      if (std::abs(ref) > 0.1 * scale) {
        EXPECT_NEAR(cov(i, j), ref, 0.05 * std::abs(ref)) << i << "," << j;
      } else {
        EXPECT_NEAR(cov(i, j), ref, 0.05 * scale) << i << "," << j;
      }
    }
  }
}

TEST(GaussianQuadraticForm, MatchesDirectInverse) {
  Eigen::Matrix2d c;
  c << 2.0, 0.3, 0.3, 0.5;
  GaussianQuadraticForm q(c);
  const Eigen::Vector2d d(0.4, -1.1);
  EXPECT_NEAR(q.mahalanobis_squared(d), d.dot(c.inverse() * d), 1e-13);
  StateVec w(2);
  q.whiten(d, w);
  EXPECT_NEAR(w.squaredNorm(), q.mahalanobis_squared(d), 1e-13);
}

TEST(EmStepDensity, MeanAndCovariance) {
  RingModel ring(0.5);
  const auto g = em_step_density(ring, Eigen::Vector2d(1.0, 0.0), 0.01);
  EXPECT_NEAR(g.mean[1], -0.01, 1e-15);
  EXPECT_TRUE(g.covariance.isApprox(0.0025 * Eigen::Matrix2d::Identity()));
}
