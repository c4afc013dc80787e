#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdecert/box.hpp"
#include "sdecert/coupling.hpp"
#include "sdecert/evt.hpp"
#include "sdecert/integrate.hpp"
#include "sdecert/model.hpp"

namespace sdecert {

/// d(x, y) = min{cap, ‖x − y‖^q}.
struct CappedDistance {
  double cap = 1.0;
  double exponent = 1.0;

  double operator()(ConstVecRef x, ConstVecRef y) const;
  void validate() const;

  friend bool operator==(const CappedDistance&, const CappedDistance&) = default;
};

double capped_distance(const CappedDistance& d, ConstVecRef x, ConstVecRef y);

// ---------------------------------------------------------------------------
// finite-time error

struct FiniteTimeConfig {
  Scheme scheme = Scheme::EulerMaruyama;
  /// Strong order of the scheme on this model; default_strong_order() when unset.
  std::optional<double> strong_order;
  double h = 0.0;
  double T = 0.0;
  /// Total number of length-T segments, split evenly over the chains.
  std::int64_t segments = 1;
  /// Independent chains; fixed by config so results do not depend on `workers`.
  std::int64_t chains = 8;
  /// Segments run (and discarded) at the start of each chain.
  std::int64_t burn_in_segments = 1;
  std::optional<StateVec> initial_state;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Componentwise bounding box of states seen at unit-time spacing.
struct Envelope {
  StateVec lower;
  StateVec upper;
  std::int64_t samples = 0;

  void add(ConstVecRef x);
  void merge(const Envelope& other);
};

struct FiniteTimeResult {
  /// Mean of c·‖X^h_T − X^{2h}_T‖ over completed segments.
  double error = 0.0;
  double std_error = 0.0;
  double richardson_c = 1.0;
  std::int64_t segments_done = 0;
  std::int64_t segments_requested = 0;
  /// Per-segment values in chain order.
  std::vector<double> values;
  Envelope envelope;
  /// Set when any chain diverged; `error` then covers the completed segments only.
  bool diverged = false;
  std::string divergence;
};

/// Chained common-noise extrapolation: each segment starts where the previous fine
/// trajectory ended, so segment starts sample the numerical invariant measure.
FiniteTimeResult finite_time_error(const ModelPtr& model, const FiniteTimeConfig& config);

// ---------------------------------------------------------------------------
// contraction rate

struct ContractionConfig {
  CouplingPolicy policy;
  CappedDistance distance;
  double h = 0.0;
  double T = 0.0;
  std::int64_t pairs = 1;
  std::int64_t replicates = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct ContractionSample {
  StateVec x;
  StateVec y;
  double distance = 0.0;
  std::int64_t replicates = 0;
  std::int64_t coupled = 0;
  /// Replicates that left the finite range; counted as uncoupled.
  std::int64_t diverged = 0;
  /// P̂[τ_c > T] / d(x, y)
  double r = 0.0;
  /// 1 / (1 − r), +∞ for r ≥ 1
  double v = 1.0;
};

/// Simulates one replicate for pair `pair`; used to swap in test policies.
using PairSimulator =
    std::function<CouplingOutcome(std::size_t pair, std::int64_t replicate, ConstVecRef x, ConstVecRef y,
                                  NoiseStream& stream)>;

std::vector<ContractionSample> sample_contraction_ratios(const ModelPtr& model, const OmegaBox& omega,
                                                         const ContractionConfig& config);
std::vector<ContractionSample> sample_contraction_ratios(const OmegaBox& omega, const ContractionConfig& config,
                                                         const PairSimulator& simulate);

struct ContractionEstimate {
  double alpha = 0.0;
  double max_r = 0.0;
  double threshold = 0.0;
  double endpoint = 1.0;
  std::optional<GpdFit> fit;
  std::vector<double> exceedances;
  std::string note;
};

/// α_Ω = 1 − 1/v_max from a GPD fit to the upper tail of v_i.
/// Throws EstimatorFailure when max r_i ≥ 1 or the fitted shape is ξ ≥ 0.
ContractionEstimate contraction_rate(std::span<const ContractionSample> samples, double exceedance_fraction = 0.05,
                                     std::size_t min_exceedances = kGpdMinExceedances);

// ---------------------------------------------------------------------------
// tail rate

struct TailConfig {
  CouplingPolicy policy;
  double h = 0.0;
  double T = 0.0;
  std::int64_t pairs = 1;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// One coupling run per uniformly drawn pair in Ω×Ω.
std::vector<CouplingOutcome> sample_coupling_times(const ModelPtr& model, const OmegaBox& omega,
                                                   const TailConfig& config);

struct SurvivalWindow {
  double lower = 0.01;
  double upper = 0.5;
};

struct TailRateResult {
  std::vector<double> t;
  std::vector<double> survival;
  double gamma = 0.0;
  double intercept = 0.0;
  std::size_t points_used = 0;
};

/// S(t) = fraction with τ_c > t on the grid t_k = k·grid_step up to the horizon,
/// then γ = −slope of the least-squares line through (t, log S) for S in the window.
TailRateResult survival_and_tail_rate(std::span<const CouplingOutcome> outcomes, double grid_step,
                                      SurvivalWindow window = {});

// ---------------------------------------------------------------------------
// bounds

enum class BoundMode { Certified, Rough };

std::string_view to_string(BoundMode mode);

struct CertifiedBound {
  double finite_time_error = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  std::optional<double> gamma;
  std::optional<double> T;
  double bound = 0.0;
  BoundMode mode = BoundMode::Certified;
};

/// (min{E, cap} + 2ε) / (1 − α)
CertifiedBound certified_bound(double E, double epsilon, double alpha, double cap = 1.0);
/// (min{E, cap} + 2ε) / (1 − e^{−γT})
CertifiedBound rough_bound(double E, double epsilon, double gamma, double T, double cap = 1.0);

struct OmegaEstimate {
  OmegaBox omega;
  double epsilon = 0.0;
};

/// Bounding box of the samples widened by `margin`·width per side; ε = 1/count.
OmegaEstimate derive_omega_and_epsilon(std::span<const StateVec> samples, double margin = 0.05);
OmegaEstimate derive_omega_and_epsilon(const Envelope& envelope, double margin = 0.05);

}  // namespace sdecert
