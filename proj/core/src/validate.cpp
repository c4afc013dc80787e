#include "sdecert/validate.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sdecert/error.hpp"
#include "sdecert/parallel.hpp"

namespace sdecert {

StateVec DensityGrid::cell_center(std::size_t index) const {
  StateVec c(box.dim());
  for (Eigen::Index a = 0; a < box.dim(); ++a) {
    const auto n = static_cast<std::size_t>(resolution[static_cast<std::size_t>(a)]);
    const auto i = index % n;
    index /= n;
    const double w = (box.upper()[a] - box.lower()[a]) / static_cast<double>(n);
    c[a] = box.lower()[a] + (static_cast<double>(i) + 0.5) * w;
  }
  return c;
}

double DensityGrid::cell_volume() const {
  double v = 1.0;
  for (Eigen::Index a = 0; a < box.dim(); ++a) {
    v *= (box.upper()[a] - box.lower()[a]) / resolution[static_cast<std::size_t>(a)];
  }
  return v;
}

DensityAccumulator::DensityAccumulator(OmegaBox box, std::vector<int> resolution, std::vector<int> axes)
    : box_(std::move(box)), resolution_(std::move(resolution)), axes_(std::move(axes)) {
  if (static_cast<Eigen::Index>(resolution_.size()) != box_.dim()) {
    throw DimensionError("density grid: one resolution per box axis required");
  }
  if (!axes_.empty() && static_cast<Eigen::Index>(axes_.size()) != box_.dim()) {
    throw DimensionError("density grid: projection axes must match the box dimension");
  }
  std::size_t cells = 1;
  for (int r : resolution_) {
    if (r < 1) throw Error("density grid: resolution must be positive");
    cells *= static_cast<std::size_t>(r);
  }
  counts_.assign(cells, 0);
}

void DensityAccumulator::add(ConstVecRef x) {
  ++total_;
  std::size_t index = 0;
  std::size_t stride = 1;
  for (Eigen::Index a = 0; a < box_.dim(); ++a) {
    const auto ai = static_cast<std::size_t>(a);
    const Eigen::Index src = axes_.empty() ? a : axes_[ai];
    if (src < 0 || src >= x.size()) throw DimensionError("density grid: projection axis out of range");
    const double lo = box_.lower()[a];
    const double hi = box_.upper()[a];
    const double v = x[src];
    if (!(v >= lo && v < hi)) {
      ++outside_;
      return;
    }
    auto i = static_cast<std::size_t>((v - lo) / (hi - lo) * resolution_[ai]);
    i = std::min(i, static_cast<std::size_t>(resolution_[ai] - 1));
    index += i * stride;
    stride *= static_cast<std::size_t>(resolution_[ai]);
  }
  ++counts_[index];
}

void DensityAccumulator::merge(const DensityAccumulator& other) {
  if (!(other.box_ == box_) || other.resolution_ != resolution_ || other.axes_ != axes_) {
    throw Error("density grid: cannot merge histograms on different grids");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  outside_ += other.outside_;
  total_ += other.total_;
}

DensityGrid DensityAccumulator::finish() const {
  if (total_ == 0) throw Error("density grid: no samples");
  DensityGrid g;
  g.box = box_;
  g.resolution = resolution_;
  g.samples = total_;
  const double n = static_cast<double>(total_);
  g.mass.resize(counts_.size());
  for (std::size_t i = 0; i < counts_.size(); ++i) g.mass[i] = static_cast<double>(counts_[i]) / n;
  g.outside_mass = static_cast<double>(outside_) / n;
  return g;
}

DensityGrid empirical_density_grid(std::span<const StateVec> samples, const OmegaBox& box,
                                   std::vector<int> resolution) {
  if (samples.empty()) throw Error("empirical_density_grid: no samples");
  DensityAccumulator acc(box, std::move(resolution));
  for (const auto& s : samples) acc.add(s);
  return acc.finish();
}

DensityGrid simulate_density(const ModelPtr& model, const DensitySimulation& config) {
  if (!model) throw Error("simulate_density: model is null");
  if (!(config.h > 0.0)) throw Error("simulate_density: h must be positive");
  if (config.steps < 1 || config.chains < 1 || config.burn_in_steps < 0) {
    throw Error("simulate_density: invalid step or chain counts");
  }
  const StateVec x0 = config.initial_state.value_or(model->default_initial_state());
  model->check_state(x0);
  const std::uint64_t seed = derive_seed(config.seed, seed_purpose::kDensity);
  const double scale = std::sqrt(config.h);

  std::vector<DensityAccumulator> parts(static_cast<std::size_t>(config.chains),
                                        DensityAccumulator(config.box, config.resolution, config.axes));
  parallel_for(parts.size(), config.workers, [&](std::size_t c) {
    Stepper stepper(model, config.scheme);
    NoiseStream stream(seed, c);
    StateVec x = x0;
    StateVec dw(model->noise_dim());
    for (std::int64_t k = 0; k < config.burn_in_steps + config.steps; ++k) {
      stream.fill_normal(dw, scale);
      stepper.step(x, config.h, dw);
      if (k >= config.burn_in_steps) parts[c].add(x);
      if ((k & 0xfff) == 0 && !x.allFinite()) {
        throw DivergenceError(static_cast<double>(k + 1) * config.h, model->name() + ": diverged");
      }
    }
    if (!x.allFinite()) throw DivergenceError(static_cast<double>(config.steps) * config.h, model->name() + ": diverged");
  });
  for (std::size_t c = 1; c < parts.size(); ++c) parts[0].merge(parts[c]);
  return parts[0].finish();
}

double integrate_on_box(const DensityFunction& f, const OmegaBox& box, double tolerance) {
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned kDepth = 15;
  if (box.dim() == 1) {
    StateVec x(1);
    return gauss_kronrod<double, 61>::integrate(
        [&](double t) {
          x[0] = t;
          return f(x);
        },
        box.lower()[0], box.upper()[0], kDepth, tolerance);
  }
  if (box.dim() == 2) {
    StateVec x(2);
    return gauss_kronrod<double, 61>::integrate(
        [&](double s) {
          return gauss_kronrod<double, 61>::integrate(
              [&](double t) {
                x[0] = s;
                x[1] = t;
                return f(x);
              },
              box.lower()[1], box.upper()[1], kDepth, tolerance);
        },
        box.lower()[0], box.upper()[0], kDepth, tolerance);
  }
  throw Error("integrate_on_box: quadrature supports 1-D and 2-D boxes; project the density first");
}

AnalyticMasses analytic_cell_masses(const DensityFunction& f, const DensityGrid& like,
                                    std::optional<double> total_normalizer) {
  const double inside = integrate_on_box(f, like.box);
  if (!(inside > 0.0) || !std::isfinite(inside)) throw Error("analytic density has no mass on the box");
  const double total = total_normalizer.value_or(inside);
  if (!(total >= inside * (1.0 - 1e-9))) throw Error("total normalizer is smaller than the mass on the box");

  AnalyticMasses out;
  out.mass.resize(like.cells());
  double sum = 0.0;
  for (std::size_t i = 0; i < like.cells(); ++i) {
    out.mass[i] = f(like.cell_center(i));
    sum += out.mass[i];
  }
  if (!(sum > 0.0)) throw Error("analytic density vanishes at every cell center");
  const double inside_fraction = std::min(1.0, inside / total);
  for (double& m : out.mass) m *= inside_fraction / sum;
  out.outside_mass = 1.0 - inside_fraction;
  return out;
}

double tv_distance(std::span<const double> a, double outside_a, std::span<const double> b, double outside_b) {
  if (a.size() != b.size()) throw DimensionError("tv_distance: mass vectors of different length");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return std::min(1.0, 0.5 * s + 0.5 * (outside_a + outside_b));
}

double tv_distance(const DensityGrid& a, const DensityGrid& b) {
  if (!(a.box == b.box) || a.resolution != b.resolution) throw Error("tv_distance: grids differ");
  return tv_distance(a.mass, a.outside_mass, b.mass, b.outside_mass);
}

double tv_distance(const DensityGrid& grid, const AnalyticMasses& analytic) {
  return tv_distance(grid.mass, grid.outside_mass, analytic.mass, analytic.outside_mass);
}

double infinite_sample_extrapolation(std::span<const SampleSizeTv> points) {
  if (points.size() < 2) throw Error("infinite_sample_extrapolation: need at least two points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    if (!(p.samples > 0.0)) throw Error("infinite_sample_extrapolation: sample sizes must be positive");
    const double x = 1.0 / std::sqrt(p.samples);
    sx += x;
    sy += p.tv;
    sxx += x * x;
    sxy += x * p.tv;
  }
  const double n = static_cast<double>(points.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 1e-300) || std::abs(denom) <= 1e-12 * n * sxx) {
    throw Error("infinite_sample_extrapolation: sample sizes must be distinct");
  }
  const double slope = (n * sxy - sx * sy) / denom;
  return (sy - slope * sx) / n;
}

}  // namespace sdecert
