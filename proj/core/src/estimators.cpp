#include "sdecert/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

#include "sdecert/error.hpp"
#include "sdecert/parallel.hpp"

namespace sdecert {

double CappedDistance::operator()(ConstVecRef x, ConstVecRef y) const {
  if (x.size() != y.size()) throw DimensionError("capped distance: vectors of different length");
  const double norm = (x - y).norm();
  const double powered = exponent == 1.0 ? norm : std::pow(norm, exponent);
  return std::min(cap, powered);
}

void CappedDistance::validate() const {
  if (!(cap > 0.0)) throw Error("distance cap must be positive");
  if (!(exponent > 0.0) || !std::isfinite(exponent)) throw Error("distance exponent must be positive");
}

double capped_distance(const CappedDistance& d, ConstVecRef x, ConstVecRef y) { return d(x, y); }

void Envelope::add(ConstVecRef x) {
  if (samples == 0) {
    lower = x;
    upper = x;
  } else {
    lower = lower.cwiseMin(x);
    upper = upper.cwiseMax(x);
  }
  ++samples;
}

void Envelope::merge(const Envelope& other) {
  if (other.samples == 0) return;
  if (samples == 0) {
    *this = other;
    return;
  }
  lower = lower.cwiseMin(other.lower);
  upper = upper.cwiseMax(other.upper);
  samples += other.samples;
}

namespace {

struct ChainResult {
  std::vector<double> values;
  Envelope envelope;
  bool diverged = false;
  std::string divergence;
};

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) throw Error(std::string(what) + " must be positive and finite");
}

// Draws (x, y) uniformly from Ω×Ω, redrawing exact ties.
std::pair<StateVec, StateVec> draw_pair(const OmegaBox& omega, NoiseStream& stream) {
  StateVec x(omega.dim());
  StateVec y(omega.dim());
  do {
    omega.sample_uniform(stream, x);
    omega.sample_uniform(stream, y);
  } while (x == y);
  return {std::move(x), std::move(y)};
}

void finish_sample(ContractionSample& s) {
  const double uncoupled = static_cast<double>(s.replicates - s.coupled);
  s.r = uncoupled / (s.distance * static_cast<double>(s.replicates));
  s.v = s.r < 1.0 ? 1.0 / (1.0 - s.r) : std::numeric_limits<double>::infinity();
}

void validate_contraction(const ContractionConfig& c) {
  require_positive(c.h, "h");
  require_positive(c.T, "T");
  step_count(c.T, c.h);
  c.distance.validate();
  if (c.pairs < 1 || c.replicates < 1) throw Error("contraction: pairs and replicates must be at least 1");
}

}  // namespace

FiniteTimeResult finite_time_error(const ModelPtr& model, const FiniteTimeConfig& config) {
  if (!model) throw Error("finite_time_error: model is null");
  require_positive(config.h, "h");
  require_positive(config.T, "T");
  step_count(config.T, 2.0 * config.h);
  if (config.segments < 1) throw Error("finite_time_error: need at least one segment");
  if (config.chains < 1) throw Error("finite_time_error: need at least one chain");
  if (config.burn_in_segments < 0) throw Error("finite_time_error: burn-in must be nonnegative");

  const StateVec x0 = config.initial_state.value_or(model->default_initial_state());
  model->check_state(x0);
  const double order = config.strong_order.value_or(default_strong_order(config.scheme, *model));
  const double c = richardson_constant(order);
  const std::int64_t chains = std::min(config.chains, config.segments);
  const auto unit_steps = std::max<std::int64_t>(1, std::llround(1.0 / config.h));
  const std::uint64_t seed = derive_seed(config.seed, seed_purpose::kFiniteTime);

  std::vector<ChainResult> results(static_cast<std::size_t>(chains));
  parallel_for(results.size(), config.workers, [&](std::size_t k) {
    const auto ki = static_cast<std::int64_t>(k);
    const std::int64_t count = config.segments / chains + (ki < config.segments % chains ? 1 : 0);
    ChainResult& out = results[k];
    out.values.reserve(static_cast<std::size_t>(count));
    Stepper stepper(model, config.scheme);
    NoiseStream stream(seed, k);
    StateVec x = x0;
    try {
      for (std::int64_t b = 0; b < config.burn_in_segments; ++b) {
        x = paired_fine_coarse(stepper, x, config.h, config.T, stream).fine;
      }
      for (std::int64_t i = 0; i < count; ++i) {
        FineCoarsePair pair = paired_fine_coarse(stepper, x, config.h, config.T, stream,
                                                 [&](std::int64_t step, const StateVec& state) {
                                                   if (step % unit_steps == 0) out.envelope.add(state);
                                                 });
        out.values.push_back(c * (pair.fine - pair.coarse).norm());
        x = std::move(pair.fine);
      }
    } catch (const DivergenceError& e) {
      out.diverged = true;
      out.divergence = "chain " + std::to_string(k) + ": " + e.what();
    }
  });

  FiniteTimeResult result;
  result.richardson_c = c;
  result.segments_requested = config.segments;
  for (auto& chain : results) {
    result.values.insert(result.values.end(), chain.values.begin(), chain.values.end());
    result.envelope.merge(chain.envelope);
    if (chain.diverged && !result.diverged) {
      result.diverged = true;
      result.divergence = chain.divergence;
    }
  }
  result.segments_done = static_cast<std::int64_t>(result.values.size());
  if (!result.values.empty()) {
    const double n = static_cast<double>(result.values.size());
    double sum = 0.0;
    for (double v : result.values) sum += v;
    result.error = sum / n;
    double ss = 0.0;
    for (double v : result.values) ss += (v - result.error) * (v - result.error);
    result.std_error = result.values.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  }
  return result;
}

std::vector<ContractionSample> sample_contraction_ratios(const ModelPtr& model, const OmegaBox& omega,
                                                         const ContractionConfig& config) {
  if (!model) throw Error("sample_contraction_ratios: model is null");
  validate_contraction(config);
  if (omega.dim() != model->dim()) throw DimensionError("contraction: Ω has the wrong dimension");
  PairCoupler(model, config.h, config.policy);  // validates the policy up front

  const std::uint64_t pair_seed = derive_seed(config.seed, seed_purpose::kPairs);
  const std::uint64_t run_seed = derive_seed(config.seed, seed_purpose::kCoupling);
  const auto M = config.replicates;
  std::vector<ContractionSample> samples(static_cast<std::size_t>(config.pairs));
  parallel_for(samples.size(), config.workers, [&](std::size_t i) {
    NoiseStream pair_stream(pair_seed, i);
    auto [x, y] = draw_pair(omega, pair_stream);
    PairCoupler coupler(model, config.h, config.policy);
    ContractionSample& s = samples[i];
    s.distance = config.distance(x, y);
    s.replicates = M;
    for (std::int64_t j = 0; j < M; ++j) {
      NoiseStream stream(run_seed, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(M) +
                                       static_cast<std::uint64_t>(j));
      const CouplingOutcome o = coupler.coupling_time(x, y, config.T, stream);
      if (o.coupled) ++s.coupled;
      if (o.diverged) ++s.diverged;
    }
    s.x = std::move(x);
    s.y = std::move(y);
    finish_sample(s);
  });
  return samples;
}

std::vector<ContractionSample> sample_contraction_ratios(const OmegaBox& omega, const ContractionConfig& config,
                                                         const PairSimulator& simulate) {
  validate_contraction(config);
  if (!simulate) throw Error("sample_contraction_ratios: simulator is empty");
  const std::uint64_t pair_seed = derive_seed(config.seed, seed_purpose::kPairs);
  const std::uint64_t run_seed = derive_seed(config.seed, seed_purpose::kCoupling);
  const auto M = config.replicates;
  std::vector<ContractionSample> samples(static_cast<std::size_t>(config.pairs));
  parallel_for(samples.size(), config.workers, [&](std::size_t i) {
    NoiseStream pair_stream(pair_seed, i);
    auto [x, y] = draw_pair(omega, pair_stream);
    ContractionSample& s = samples[i];
    s.distance = config.distance(x, y);
    s.replicates = M;
    for (std::int64_t j = 0; j < M; ++j) {
      NoiseStream stream(run_seed, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(M) +
                                       static_cast<std::uint64_t>(j));
      const CouplingOutcome o = simulate(i, j, x, y, stream);
      if (o.coupled) ++s.coupled;
      if (o.diverged) ++s.diverged;
    }
    s.x = std::move(x);
    s.y = std::move(y);
    finish_sample(s);
  });
  return samples;
}

ContractionEstimate contraction_rate(std::span<const ContractionSample> samples, double exceedance_fraction,
                                     std::size_t min_exceedances) {
  if (samples.empty()) throw Error("contraction_rate: no samples");
  ContractionEstimate est;
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) {
    est.max_r = std::max(est.max_r, s.r);
    v.push_back(s.v);
  }
  if (est.max_r >= 1.0) {
    throw EstimatorFailure("max r_i = " + std::to_string(est.max_r) + " ≥ 1, no contraction on Ω", kCouplingRemedy);
  }
  if (est.max_r == 0.0) {
    est.note = "every replicate coupled before T; α_Ω = 0 without a tail fit";
    return est;
  }
  try {
    est.threshold = select_threshold(v, exceedance_fraction, min_exceedances);
  } catch (const Error& e) {
    throw EstimatorFailure(std::string("too few v_i above the threshold (") + e.what() + ")",
                           "increase the number of pairs");
  }
  est.exceedances = exceedances_over(v, est.threshold);
  try {
    est.fit = fit_gpd(est.exceedances, est.threshold, min_exceedances);
  } catch (const EstimatorFailure&) {
    throw;
  } catch (const Error& e) {
    throw EstimatorFailure(std::string("GPD fit failed: ") + e.what(), kCouplingRemedy);
  }
  est.endpoint = gpd_upper_endpoint(*est.fit);
  est.alpha = 1.0 - 1.0 / est.endpoint;
  return est;
}

std::vector<CouplingOutcome> sample_coupling_times(const ModelPtr& model, const OmegaBox& omega,
                                                   const TailConfig& config) {
  if (!model) throw Error("sample_coupling_times: model is null");
  require_positive(config.h, "h");
  require_positive(config.T, "T");
  step_count(config.T, config.h);
  if (config.pairs < 1) throw Error("sample_coupling_times: need at least one pair");
  if (omega.dim() != model->dim()) throw DimensionError("tail rate: Ω has the wrong dimension");
  PairCoupler(model, config.h, config.policy);

  const std::uint64_t pair_seed = derive_seed(config.seed, seed_purpose::kTail);
  const std::uint64_t run_seed = derive_seed(config.seed, seed_purpose::kTailCoupling);
  std::vector<CouplingOutcome> outcomes(static_cast<std::size_t>(config.pairs));
  parallel_for(outcomes.size(), config.workers, [&](std::size_t i) {
    NoiseStream pair_stream(pair_seed, i);
    const auto [x, y] = draw_pair(omega, pair_stream);
    PairCoupler coupler(model, config.h, config.policy);
    NoiseStream stream(run_seed, i);
    outcomes[i] = coupler.coupling_time(x, y, config.T, stream);
  });
  return outcomes;
}

TailRateResult survival_and_tail_rate(std::span<const CouplingOutcome> outcomes, double grid_step,
                                      SurvivalWindow window) {
  if (outcomes.empty()) throw Error("survival_and_tail_rate: no outcomes");
  require_positive(grid_step, "survival grid step");
  if (!(window.lower > 0.0 && window.lower < window.upper && window.upper <= 1.0)) {
    throw Error("survival_and_tail_rate: window must satisfy 0 < lower < upper ≤ 1");
  }
  double horizon = std::numeric_limits<double>::infinity();
  std::vector<double> taus;
  for (const auto& o : outcomes) {
    horizon = std::min(horizon, o.horizon);
    if (o.coupled) taus.push_back(o.tau);
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw Error("survival_and_tail_rate: invalid horizon");
  std::sort(taus.begin(), taus.end());

  TailRateResult out;
  const double n = static_cast<double>(outcomes.size());
  const auto K = static_cast<std::int64_t>(std::floor(horizon / grid_step + 1e-9));
  const double tol = 1e-9 * grid_step;
  std::size_t met = 0;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::int64_t k = 0; k <= K; ++k) {
    const double t = static_cast<double>(k) * grid_step;
    while (met < taus.size() && taus[met] <= t + tol) ++met;
    const double s = (n - static_cast<double>(met)) / n;
    out.t.push_back(t);
    out.survival.push_back(s);
    if (s >= window.lower && s <= window.upper && s > 0.0) {
      const double y = std::log(s);
      st += t;
      sy += y;
      stt += t * t;
      sty += t * y;
      ++out.points_used;
    }
  }
  const double m = static_cast<double>(out.points_used);
  const double denom = m * stt - st * st;
  if (out.points_used < 2 || !(denom > 0.0)) {
    throw EstimatorFailure("survival curve has fewer than two points inside [" + std::to_string(window.lower) +
                               ", " + std::to_string(window.upper) + "]",
                           kCouplingRemedy);
  }
  const double slope = (m * sty - st * sy) / denom;
  out.intercept = (sy - slope * st) / m;
  out.gamma = -slope;
  return out;
}

std::string_view to_string(BoundMode mode) { return mode == BoundMode::Certified ? "certified" : "rough"; }

CertifiedBound certified_bound(double E, double epsilon, double alpha, double cap) {
  if (!(E >= 0.0) || !(epsilon >= 0.0)) throw Error("certified_bound: E and ε must be nonnegative");
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("certified_bound: α_Ω must lie in [0, 1)");
  CertifiedBound b;
  b.finite_time_error = E;
  b.epsilon = epsilon;
  b.alpha = alpha;
  b.mode = BoundMode::Certified;
  b.bound = (std::min(E, cap) + 2.0 * epsilon) / (1.0 - alpha);
  return b;
}

CertifiedBound rough_bound(double E, double epsilon, double gamma, double T, double cap) {
  if (!(E >= 0.0) || !(epsilon >= 0.0)) throw Error("rough_bound: E and ε must be nonnegative");
  if (!(gamma > 0.0)) throw Error("rough_bound: γ must be positive");
  if (!(T > 0.0)) throw Error("rough_bound: T must be positive");
  CertifiedBound b;
  b.finite_time_error = E;
  b.epsilon = epsilon;
  b.alpha = std::exp(-gamma * T);
  b.gamma = gamma;
  b.T = T;
  b.mode = BoundMode::Rough;
  b.bound = (std::min(E, cap) + 2.0 * epsilon) / -std::expm1(-gamma * T);
  return b;
}

OmegaEstimate derive_omega_and_epsilon(std::span<const StateVec> samples, double margin) {
  if (samples.empty()) throw Error("derive_omega_and_epsilon: no samples");
  Envelope env;
  for (const auto& s : samples) {
    if (s.size() != samples.front().size()) throw DimensionError("derive_omega_and_epsilon: ragged samples");
    env.add(s);
  }
  return derive_omega_and_epsilon(env, margin);
}

OmegaEstimate derive_omega_and_epsilon(const Envelope& envelope, double margin) {
  if (envelope.samples < 1) throw Error("derive_omega_and_epsilon: no samples");
  if (!(margin >= 0.0)) throw Error("derive_omega_and_epsilon: margin must be nonnegative");
  const StateVec pad = margin * (envelope.upper - envelope.lower);
  return {OmegaBox(envelope.lower - pad, envelope.upper + pad), 1.0 / static_cast<double>(envelope.samples)};
}

}  // namespace sdecert
