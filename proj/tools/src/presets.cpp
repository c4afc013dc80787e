#include "sdecert_app/presets.hpp"

#include "sdecert/error.hpp"

namespace sdecert::app {

Scale parse_scale(const std::string& text) {
  if (text == "desk") return Scale::Desk;
  if (text == "paper") return Scale::Paper;
  throw Error("unknown scale '" + text + "' (expected desk or paper)");
}

std::string to_string(Scale scale) { return scale == Scale::Desk ? "desk" : "paper"; }

std::vector<std::string> preset_names() {
  return {"ring", "double-well", "langevin-ring", "lorenz96", "lorenz96-d5", "fhn", "fhn-n40"};
}

namespace {

struct Counts {
  std::int64_t segments;
  std::int64_t pairs;
  std::int64_t replicates;
  std::int64_t tail_pairs;
  std::int64_t validate_steps;
};

void apply(RunConfig& c, const Counts& n) {
  c.finite_error.segments = n.segments;
  c.contraction.pairs = n.pairs;
  c.contraction.replicates = n.replicates;
  c.tail.pairs = n.tail_pairs;
  c.validate.steps = n.validate_steps;
}

}  // namespace

Preset make_preset(const std::string& name, Scale scale) {
  const bool paper = scale == Scale::Paper;
  Preset p;
  p.name = name;
  if (name == "ring") {
    p.description = "gradient flow with rotation towards the unit circle, σ = 0.5";
    p.config = default_config("ring");
    p.config.omega = OmegaBox::cube(2, -2.0, 2.0);
    p.config.tail.horizon = 40.0;
    p.config.validate.extrapolation_fractions = {0.125, 0.25, 0.5, 1.0};
    apply(p.config, paper ? Counts{1000000, 20000, 1000, 100000, 800000000} : Counts{100000, 2000, 200, 10000, 12500000});
    p.stages = {"certify", "rough", "validate"};
    p.reference = {{"finite_time_error", 0.00141635}, {"epsilon", 1e-7},  {"threshold", 1.48},
                   {"xi", -0.1822},                   {"zeta", 0.0326},    {"alpha", 0.3972},
                   {"bound", 0.002350},               {"gamma", 0.1378},  {"rough_bound", 0.00189377},
                   {"tv_infinite_sample", 0.001534}};
    p.cost = paper ? "about 10 CPU-days" : "about 15 CPU-minutes";
  } else if (name == "double-well") {
    p.description = "asymmetric double well, r = 5, σ = 1.2, distance |x − y|^0.45";
    p.config = default_config("double-well");
    p.config.omega = OmegaBox::cube(1, -2.0, 4.0);
    p.config.distance.exponent = 0.45;
    p.config.tail.horizon = 200.0;
    apply(p.config, paper ? Counts{800000, 20000, 1000, 100000, 2000000000} : Counts{8000, 1000, 100, 10000, 50000000});
    p.stages = {"certify", "rough", "validate"};
    p.reference = {{"finite_time_error", 0.167345}, {"alpha", 0.2019}, {"bound", 0.2097}, {"tv", 0.05906}};
    p.cost = paper ? "about 20 CPU-days" : "about 15 CPU-minutes";
  } else if (name == "langevin-ring") {
    p.description = "underdamped Langevin dynamics in the ring potential, γ = 1, σ = 0.5";
    p.config = default_config("langevin-ring");
    p.config.omega = OmegaBox::product(OmegaBox::cube(2, -3.0, 3.0), OmegaBox::cube(2, -6.0, 6.0));
    p.config.tail.horizon = 160.0;
    if (paper) {
      p.config.validate.resolution = {512, 512};
      p.config.validate.chains = 80;
    }
    apply(p.config, paper ? Counts{800000, 20000, 1000, 100000, 10000000000} : Counts{8000, 1000, 50, 10000, 12500000});
    p.stages = {"certify", "rough", "validate"};
    p.reference = {{"finite_time_error", 0.0111313}, {"alpha", 0.3727}, {"bound", 0.017745},
                   {"gamma", 0.07067},               {"rough_bound", 0.011832}};
    p.cost = paper ? "cluster scale (the density run alone is 8e11 steps)" : "about 20 CPU-minutes";
  } else if (name == "lorenz96") {
    p.description = "Lorenz-96, D = 4, F = 8, σ = 3";
    p.config = default_config("lorenz96");
    p.config.omega = OmegaBox::cube(4, -16.0, 19.0);
    p.config.tail.horizon = 30.0;
    apply(p.config, paper ? Counts{800000, 20000, 1000, 100000, 1} : Counts{8000, 1000, 50, 5000, 1});
    p.stages = {"certify", "rough"};
    p.reference = {{"finite_time_error", 0.144864}, {"alpha", 0.7081}, {"bound", 0.4963}};
    p.cost = paper ? "about 100 CPU-days" : "about 30 CPU-minutes";
  } else if (name == "lorenz96-d5") {
    p.description = "Lorenz-96, D = 5: finite-time error at h = 1e-5, tail rate at h = 1e-4";
    p.config = default_config("lorenz96");
    p.config.params["D"] = 5.0;
    p.config.h = 1e-5;
    p.config.omega = OmegaBox::cube(5, -16.0, 19.0);
    p.config.tail.h = 1e-4;
    p.config.tail.horizon = 40.0;
    apply(p.config, paper ? Counts{800000, 1, 1, 100000, 1} : Counts{800, 1, 1, 2000, 1});
    p.stages = {"rough"};
    p.reference = {{"finite_time_error", 0.11946}, {"gamma", 0.12541}, {"inverse_one_minus_exp", 3.1892}};
    p.cost = paper ? "about 200 CPU-days" : "about 20 CPU-minutes";
  } else if (name == "fhn") {
    p.description = "two FitzHugh-Nagumo neurons, μ = 0.1";
    p.config = default_config("fhn");
    p.config.omega = OmegaBox::cube(4, -6.0, 6.0);
    p.config.tail.horizon = 12.0;
    apply(p.config, paper ? Counts{800000, 40000, 1000, 100000, 1} : Counts{8000, 2000, 50, 10000, 1});
    p.stages = {"certify", "rough"};
    p.reference = {{"finite_time_error", 0.0105652}, {"alpha", 0.5197},      {"bound", 0.0220},
                   {"gamma", 0.50741},               {"rough_bound", 0.01351}};
    p.cost = paper ? "about 50 CPU-days" : "about 20 CPU-minutes";
  } else if (name == "fhn-n40") {
    p.description = "forty FitzHugh-Nagumo neurons, μ = 0.1 (rough estimate only)";
    p.config = default_config("fhn");
    p.config.params["N"] = 40.0;
    p.config.omega = OmegaBox::cube(80, -6.0, 6.0);
    p.config.tail.horizon = 20.0;
    apply(p.config, paper ? Counts{800000, 1, 1, 100000, 1} : Counts{800, 1, 1, 1000, 1});
    p.stages = {"rough"};
    p.reference = {{"finite_time_error", 0.0443737}, {"gamma", 0.31612}, {"rough_bound", 0.07243}};
    p.cost = paper ? "about 100 CPU-days" : "about 10 CPU-minutes";
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw Error("unknown example '" + name + "' (known: " + known + ")");
  }
  p.config.output = "sdecert-" + name + "-" + to_string(scale);
  return p;
}

}  // namespace sdecert::app
