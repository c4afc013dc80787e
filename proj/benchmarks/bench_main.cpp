#include <cmath>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "sdecert/coupling.hpp"
#include "sdecert/evt.hpp"
#include "sdecert/integrate.hpp"
#include "sdecert/models.hpp"
#include "sdecert/random.hpp"

using namespace sdecert;

static void BM_PhiloxNormals(benchmark::State& state) {
  NoiseStream s(1, 0);
  StateVec out(64);
  for (auto _ : state) {
    s.fill_normal(out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * out.size());
}
BENCHMARK(BM_PhiloxNormals);

static void BM_RingEulerStep(benchmark::State& state) {
  Stepper st(std::make_shared<RingModel>(), Scheme::EulerMaruyama);
  NoiseStream s(2, 0);
  StateVec x = Eigen::Vector2d(1.0, 0.0);
  StateVec dw(2);
  const double h = 0.0008;
  for (auto _ : state) {
    s.fill_normal(dw, std::sqrt(h));
    st.step(x, h, dw);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_RingEulerStep);

// One mixed-policy coupling run on the ring model, horizon T = 10.
static void BM_RingCouplingTime(benchmark::State& state) {
  CouplingPolicy p;
  p.kind = CouplingKind::Mixed;
  PairCoupler c(std::make_shared<RingModel>(), 0.0008, p);
  std::uint64_t id = 0;
  for (auto _ : state) {
    NoiseStream s(3, id++);
    benchmark::DoNotOptimize(c.coupling_time(Eigen::Vector2d(1.5, -0.5), Eigen::Vector2d(-1.0, 1.2), 10.0, s));
  }
}
BENCHMARK(BM_RingCouplingTime)->Unit(benchmark::kMillisecond);

static void BM_FitGpd(benchmark::State& state) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (double& v : x) v = gpd_quantile(-0.18, 0.03, u(gen));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gpd(x));
}
BENCHMARK(BM_FitGpd)->Arg(1000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
