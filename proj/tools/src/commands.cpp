#include "sdecert_app/commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>

#include "sdecert/catalog.hpp"
#include "sdecert/error.hpp"
#include "sdecert/models.hpp"
#include "sdecert/records.hpp"

namespace sdecert::app {

namespace {

class PartialDivergence : public Error {
 public:
  using Error::Error;
};

Json to_json_vec(ConstVecRef v) { return std::vector<double>(v.begin(), v.end()); }

Json box_json(const OmegaBox& b, const std::string& source) {
  return {{"lower", to_json_vec(b.lower())}, {"upper", to_json_vec(b.upper())}, {"source", source}};
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::ostream& log(RunContext& ctx) { return *ctx.log; }

// Ω for the coupling stages: explicit, else derived from the finite-error run, else the catalog box.
OmegaBox coupling_omega(RunContext& ctx) {
  if (ctx.config.omega) {
    ctx.results["omega"] = box_json(*ctx.config.omega, "config");
    return *ctx.config.omega;
  }
  if (ctx.derived) {
    ctx.results["omega"] = box_json(ctx.derived->omega, "finite-error envelope");
    return ctx.derived->omega;
  }
  const OmegaBox box = omega_or_default(ctx.config);
  ctx.results["omega"] = box_json(box, "catalog default");
  return box;
}

double resolve_epsilon(RunContext& ctx) {
  if (ctx.config.epsilon) {
    ctx.results["epsilon"] = {{"value", *ctx.config.epsilon}, {"source", "config"}};
    return *ctx.config.epsilon;
  }
  if (ctx.derived) {
    ctx.results["epsilon"] = {{"value", ctx.derived->epsilon}, {"source", "1 / unit-time samples"}};
    return ctx.derived->epsilon;
  }
  ctx.warnings.push_back("no samples to derive ε from; using ε = 0");
  ctx.results["epsilon"] = {{"value", 0.0}, {"source", "none"}};
  return 0.0;
}

void derive_omega(RunContext& ctx) {
  if (ctx.derived || !ctx.finite || ctx.finite->envelope.samples == 0) return;
  try {
    ctx.derived = derive_omega_and_epsilon(ctx.finite->envelope, ctx.config.omega_margin);
  } catch (const Error& e) {
    ctx.warnings.push_back(std::string("could not derive Ω from the envelope: ") + e.what());
    return;
  }
  if (ctx.config.omega) {
    const Envelope& env = ctx.finite->envelope;
    if (!ctx.config.omega->contains(env.lower) || !ctx.config.omega->contains(env.upper)) {
      ctx.warnings.push_back("the finite-error trajectories left the configured Ω; ε may be too small");
    }
  }
}

}  // namespace

RunContext::RunContext(RunConfig c, unsigned w, std::ostream* l) : config(std::move(c)), workers(w), log(l) {
  model = build_model(config);
  out_dir = config.output;
}

void stage_finite_error(RunContext& ctx) {
  if (ctx.finite) return;
  const RunConfig& c = ctx.config;
  FiniteTimeConfig fc;
  fc.scheme = c.scheme;
  fc.strong_order = c.strong_order;
  fc.h = c.h;
  fc.T = c.T;
  fc.segments = c.finite_error.segments;
  fc.chains = c.finite_error.chains;
  fc.burn_in_segments = c.finite_error.burn_in_segments;
  fc.seed = c.seed;
  fc.workers = ctx.workers;
  log(ctx) << "finite-error: " << fc.segments << " segments of T = " << fc.T << " at h = " << fc.h << "\n";
  Timer timer;
  ctx.finite = finite_time_error(ctx.model, fc);
  const FiniteTimeResult& r = *ctx.finite;
  log(ctx) << "finite-error: E = " << r.error << " ± " << r.std_error << " (" << timer.seconds() << " s)\n";

  Json j = {{"E", r.error},
            {"std_error", r.std_error},
            {"richardson_c", r.richardson_c},
            {"strong_order", c.strong_order.value_or(default_strong_order(c.scheme, *ctx.model))},
            {"segments_requested", r.segments_requested},
            {"segments_done", r.segments_done},
            {"unit_time_samples", r.envelope.samples}};
  if (r.envelope.samples > 0) {
    j["envelope"] = {{"lower", to_json_vec(r.envelope.lower)}, {"upper", to_json_vec(r.envelope.upper)}};
  }
  j["diverged"] = r.diverged;
  if (r.diverged) j["divergence"] = r.divergence;
  ctx.results["finite_error"] = j;
  if (r.diverged) throw PartialDivergence(r.divergence);
  derive_omega(ctx);
}

void stage_contraction(RunContext& ctx) {
  if (ctx.contraction) return;
  const RunConfig& c = ctx.config;
  const OmegaBox omega = coupling_omega(ctx);
  ContractionConfig cc;
  cc.policy = c.coupling;
  cc.distance = c.distance;
  cc.h = c.h;
  cc.T = c.T;
  cc.pairs = c.contraction.pairs;
  cc.replicates = c.contraction.replicates;
  cc.seed = c.seed;
  cc.workers = ctx.workers;
  log(ctx) << "contraction: " << cc.pairs << " pairs × " << cc.replicates << " replicates, "
           << to_string(cc.policy.kind) << " coupling\n";
  Timer timer;
  const auto samples = sample_contraction_ratios(ctx.model, omega, cc);
  write_file(ctx.out_dir / "pairs.csv", [&](std::ostream& out) { write_pairs_csv(out, samples); });

  std::int64_t coupled = 0;
  std::int64_t diverged = 0;
  for (const auto& s : samples) {
    coupled += s.coupled;
    diverged += s.diverged;
  }
  Json j = {{"pairs", cc.pairs},
            {"replicates", cc.replicates},
            {"coupled_fraction", static_cast<double>(coupled) / static_cast<double>(cc.pairs * cc.replicates)},
            {"diverged_runs", diverged},
            {"distance", {{"cap", c.distance.cap}, {"exponent", c.distance.exponent}}}};
  ctx.results["contraction"] = j;
  const ContractionEstimate est = contraction_rate(samples, c.contraction.exceedance_fraction,
                                                   static_cast<std::size_t>(c.contraction.min_exceedances));
  j["max_r"] = est.max_r;
  j["alpha"] = est.alpha;
  if (est.fit) {
    j["threshold"] = est.threshold;
    j["xi"] = est.fit->xi;
    j["zeta"] = est.fit->scale;
    j["n_exceedances"] = est.fit->n_exceedances;
    j["log_likelihood"] = est.fit->log_likelihood;
    j["fit_converged"] = est.fit->converged;
    j["v_max"] = est.endpoint;
    const auto rows = gpd_diagnostic(est.exceedances, *est.fit);
    write_file(ctx.out_dir / "gpd_diagnostic.csv", [&](std::ostream& out) { write_gpd_diagnostic_csv(out, rows); });
  }
  if (!est.note.empty()) j["note"] = est.note;
  ctx.results["contraction"] = j;
  ctx.contraction = est;
  log(ctx) << "contraction: α_Ω = " << est.alpha << " (" << timer.seconds() << " s)\n";
}

void stage_tail_rate(RunContext& ctx) {
  if (ctx.tail) return;
  const RunConfig& c = ctx.config;
  const OmegaBox omega = coupling_omega(ctx);
  TailConfig tc;
  tc.policy = c.coupling;
  tc.h = c.tail.h.value_or(c.h);
  tc.T = c.tail.horizon.value_or(4.0 * c.T);
  tc.pairs = c.tail.pairs;
  tc.seed = c.seed;
  tc.workers = ctx.workers;
  log(ctx) << "tail-rate: " << tc.pairs << " pairs up to t = " << tc.T << " at h = " << tc.h << "\n";
  Timer timer;
  const auto outcomes = sample_coupling_times(ctx.model, omega, tc);
  std::int64_t coupled = 0;
  std::int64_t diverged = 0;
  for (const auto& o : outcomes) {
    coupled += o.coupled ? 1 : 0;
    diverged += o.diverged ? 1 : 0;
  }
  Json j = {{"pairs", tc.pairs},
            {"h", tc.h},
            {"horizon", tc.T},
            {"coupled_fraction", static_cast<double>(coupled) / static_cast<double>(tc.pairs)},
            {"diverged_runs", diverged},
            {"window", {c.tail.window_lower, c.tail.window_upper}}};
  ctx.results["tail_rate"] = j;
  const TailRateResult tail = survival_and_tail_rate(outcomes, tc.h, {c.tail.window_lower, c.tail.window_upper});
  write_file(ctx.out_dir / "survival.csv", [&](std::ostream& out) { write_survival_csv(out, tail); });
  j["gamma"] = tail.gamma;
  j["intercept"] = tail.intercept;
  j["points_used"] = tail.points_used;
  j["exp_minus_gamma_T"] = std::exp(-tail.gamma * c.T);
  j["inverse_one_minus_exp"] = 1.0 / -std::expm1(-tail.gamma * c.T);
  ctx.results["tail_rate"] = j;
  ctx.tail = tail;
  log(ctx) << "tail-rate: γ = " << tail.gamma << " (" << timer.seconds() << " s)\n";
}

void stage_certify(RunContext& ctx) {
  stage_finite_error(ctx);
  const double eps = resolve_epsilon(ctx);
  stage_contraction(ctx);
  const CertifiedBound b = certified_bound(ctx.finite->error, eps, ctx.contraction->alpha, ctx.config.distance.cap);
  ctx.results["certified"] = {{"bound", b.bound}, {"E", b.finite_time_error}, {"epsilon", b.epsilon}, {"alpha", b.alpha}};
  log(ctx) << "certify: d_w(π, π̂) ≤ " << b.bound << "\n";
}

void stage_rough(RunContext& ctx) {
  stage_finite_error(ctx);
  const double eps = resolve_epsilon(ctx);
  stage_tail_rate(ctx);
  const CertifiedBound b = rough_bound(ctx.finite->error, eps, ctx.tail->gamma, ctx.config.T, ctx.config.distance.cap);
  ctx.results["rough"] = {{"bound", b.bound},       {"E", b.finite_time_error}, {"epsilon", b.epsilon},
                          {"gamma", *b.gamma},      {"T", *b.T},                 {"exp_minus_gamma_T", b.alpha}};
  log(ctx) << "rough: d_w(π, π̂) ≈ " << b.bound << "\n";
}

void stage_validate(RunContext& ctx) {
  const RunConfig& c = ctx.config;
  const SdeModel& model = *ctx.model;
  if (!model.has_analytic_density()) throw Error("validate: model '" + c.model + "' has no analytic invariant density");

  // analytic density in the binned coordinates
  DensityFunction density;
  if (c.validate.axes.empty()) {
    density = [m = ctx.model](ConstVecRef x) { return m->density_unnormalized(x); };
  } else if (const auto* lang = dynamic_cast<const LangevinModel*>(&model)) {
    const auto d = static_cast<int>(lang->spatial_dim());
    bool spatial = static_cast<int>(c.validate.axes.size()) == d;
    for (int i = 0; spatial && i < d; ++i) spatial = c.validate.axes[static_cast<std::size_t>(i)] == i;
    if (!spatial) throw Error("validate: Langevin projections are supported onto the position coordinates only");
    const double beta = 2.0 * lang->gamma() / (lang->sigma() * lang->sigma());
    density = [m = ctx.model, lang, beta](ConstVecRef x) { return std::exp(-beta * lang->potential().value(x)); };
  } else {
    throw Error("validate: no projected analytic density for model '" + c.model + "'");
  }

  const Eigen::Index vdim = c.validate.axes.empty() ? model.dim() : static_cast<Eigen::Index>(c.validate.axes.size());
  OmegaBox box;
  if (c.validate.box) {
    box = *c.validate.box;
  } else if (c.validate.axes.empty()) {
    box = omega_or_default(c);
  } else {
    throw Error("validate: set validate.box when projecting");
  }
  std::vector<int> resolution = c.validate.resolution;
  if (resolution.empty()) resolution.assign(static_cast<std::size_t>(vdim), 100);

  auto run = [&](std::int64_t steps, std::uint64_t seed) {
    DensitySimulation ds;
    ds.scheme = c.scheme;
    ds.h = c.h;
    ds.burn_in_steps = c.validate.burn_in_steps;
    ds.steps = steps;
    ds.chains = c.validate.chains;
    ds.seed = seed;
    ds.workers = ctx.workers;
    ds.box = box;
    ds.resolution = resolution;
    ds.axes = c.validate.axes;
    return simulate_density(ctx.model, ds);
  };

  log(ctx) << "validate: " << c.validate.chains << " chains × " << c.validate.steps << " steps\n";
  Timer timer;
  const DensityGrid grid = run(c.validate.steps, c.seed);

  // ∫ over a box three times as wide stands in for the whole-space normalizer
  const OmegaBox wide(box.lower() - box.width(), box.upper() + box.width());
  const double total = integrate_on_box(density, wide);
  const AnalyticMasses analytic = analytic_cell_masses(density, grid, total);
  const double tv = tv_distance(grid, analytic);
  write_file(ctx.out_dir / "density_grid.csv",
             [&](std::ostream& out) { write_density_grid_csv(out, grid, &analytic); });

  Json j = {{"samples", grid.samples},
            {"resolution", resolution},
            {"box", box_json(box, c.validate.box ? "config" : "omega")},
            {"tv", tv},
            {"empirical_outside_mass", grid.outside_mass},
            {"analytic_outside_mass", analytic.outside_mass}};

  std::vector<SampleSizeTv> points;
  Json runs = Json::array();
  for (std::size_t i = 0; i < c.validate.extrapolation_fractions.size(); ++i) {
    const double f = c.validate.extrapolation_fractions[i];
    const auto steps = std::max<std::int64_t>(1, std::llround(f * static_cast<double>(c.validate.steps)));
    double value = tv;
    std::int64_t n = grid.samples;
    if (steps != c.validate.steps) {
      const DensityGrid g = run(steps, derive_seed(c.seed, 0x45585452ULL + i));
      value = tv_distance(g, analytic);
      n = g.samples;
    }
    points.push_back({static_cast<double>(n), value});
    runs.push_back({{"samples", n}, {"tv", value}});
  }
  if (points.size() >= 2) {
    j["extrapolation"] = runs;
    j["tv_infinite_sample"] = infinite_sample_extrapolation(points);
  }
  ctx.results["validate"] = j;
  log(ctx) << "validate: TV = " << tv << " (" << timer.seconds() << " s)\n";
}

void run_stage(RunContext& ctx, const std::string& stage) {
  if (stage == "finite-error") {
    stage_finite_error(ctx);
  } else if (stage == "contraction") {
    stage_contraction(ctx);
  } else if (stage == "tail-rate") {
    stage_tail_rate(ctx);
  } else if (stage == "certify") {
    stage_certify(ctx);
  } else if (stage == "rough") {
    stage_rough(ctx);
  } else if (stage == "validate") {
    stage_validate(ctx);
  } else {
    throw Error("unknown stage '" + stage + "'");
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json make_summary(const std::string& command, const RunContext& ctx, const std::string& status,
                  const std::string& timestamp) {
  Json s;
  s["tool"] = "sdecert";
  s["version"] = "0.1.0";
  s["command"] = command;
  s["status"] = status;
  s["seed"] = ctx.config.seed;
  s["config_hash"] = config_hash(ctx.config);
  s["config"] = config_to_json(ctx.config);
  s["results"] = ctx.results;
  s["warnings"] = ctx.warnings;
  s["timestamp"] = timestamp;
  return s;
}

int run_pipeline(const std::string& command, const std::vector<std::string>& stages, const RunConfig& config,
                 unsigned workers, std::ostream& log, std::ostream& err, const Json& extra) {
  try {
    validate_config(config);
  } catch (const Error& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }
  RunContext ctx(config, workers, &log);
  std::string status = "ok";
  int code = kOk;
  std::string remedy;
  try {
    for (const auto& stage : stages) run_stage(ctx, stage);
  } catch (const EstimatorFailure& e) {
    status = "estimator-failure";
    remedy = e.remedy();
    err << "estimator failure: " << e.what() << "\n";
    code = kEstimatorFailure;
  } catch (const PartialDivergence& e) {
    status = "diverged";
    err << "divergence: " << e.what() << " (partial results written)\n";
    code = kDiverged;
  } catch (const DivergenceError& e) {
    status = "diverged";
    err << "divergence: " << e.what() << "\n";
    code = kDiverged;
  } catch (const std::exception& e) {
    status = "error";
    err << "error: " << e.what() << "\n";
    code = kRuntimeError;
  }
  Json summary = make_summary(command, ctx, status, utc_timestamp());
  if (!remedy.empty()) summary["remedy"] = remedy;
  for (const auto& [k, v] : extra.items()) summary[k] = v;
  try {
    write_file(ctx.out_dir / "summary.json", [&](std::ostream& out) { out << summary.dump(2) << "\n"; });
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  log << "summary: " << (ctx.out_dir / "summary.json").string() << "\n";
  return code;
}

}  // namespace sdecert::app
