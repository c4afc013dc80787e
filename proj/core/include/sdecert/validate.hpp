#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sdecert/box.hpp"
#include "sdecert/integrate.hpp"
#include "sdecert/model.hpp"

namespace sdecert {

/// Histogram masses on a regular grid over a box; the first axis varies fastest.
struct DensityGrid {
  OmegaBox box;
  std::vector<int> resolution;
  std::vector<double> mass;
  double outside_mass = 0.0;
  std::int64_t samples = 0;

  std::size_t cells() const { return mass.size(); }
  StateVec cell_center(std::size_t index) const;
  double cell_volume() const;
};

/// Streaming histogram. `axes` selects the coordinates that are binned (all when empty).
class DensityAccumulator {
 public:
  DensityAccumulator(OmegaBox box, std::vector<int> resolution, std::vector<int> axes = {});

  void add(ConstVecRef x);
  void merge(const DensityAccumulator& other);
  DensityGrid finish() const;

  std::int64_t samples() const noexcept { return total_; }

 private:
  OmegaBox box_;
  std::vector<int> resolution_;
  std::vector<int> axes_;
  std::vector<std::int64_t> counts_;
  std::int64_t outside_ = 0;
  std::int64_t total_ = 0;
};

DensityGrid empirical_density_grid(std::span<const StateVec> samples, const OmegaBox& box,
                                   std::vector<int> resolution);

struct DensitySimulation {
  Scheme scheme = Scheme::EulerMaruyama;
  double h = 0.0;
  std::int64_t burn_in_steps = 0;
  /// Steps per chain after burn-in; every step is binned.
  std::int64_t steps = 0;
  std::int64_t chains = 1;
  std::optional<StateVec> initial_state;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  OmegaBox box;
  std::vector<int> resolution;
  std::vector<int> axes;
};

/// Long-run histogram of the numerical chain; independent of the worker count.
DensityGrid simulate_density(const ModelPtr& model, const DensitySimulation& config);

using DensityFunction = std::function<double(ConstVecRef)>;

/// ∫_box f by adaptive Gauss–Kronrod quadrature (1-D, or nested for 2-D boxes).
double integrate_on_box(const DensityFunction& f, const OmegaBox& box, double tolerance = 1e-10);

struct AnalyticMasses {
  std::vector<double> mass;
  double outside_mass = 0.0;
};

/// Per-cell masses of f/K on the grid of `like` (midpoint rule, rescaled so the cells
/// carry exactly the quadrature mass of the box). `total_normalizer` is ∫f over the
/// whole space; when omitted the box is assumed to carry all the mass.
AnalyticMasses analytic_cell_masses(const DensityFunction& f, const DensityGrid& like,
                                    std::optional<double> total_normalizer = std::nullopt);

/// ½ Σ|a − b| + ½ (outside_a + outside_b)
double tv_distance(std::span<const double> a, double outside_a, std::span<const double> b, double outside_b);
double tv_distance(const DensityGrid& a, const DensityGrid& b);
double tv_distance(const DensityGrid& grid, const AnalyticMasses& analytic);

struct SampleSizeTv {
  double samples;
  double tv;
};

/// Intercept a of the least-squares fit tv = a + b·n^{−1/2}.
double infinite_sample_extrapolation(std::span<const SampleSizeTv> points);

}  // namespace sdecert
