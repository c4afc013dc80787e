#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdecert/box.hpp"
#include "sdecert/coupling.hpp"
#include "sdecert/estimators.hpp"
#include "sdecert/integrate.hpp"
#include "sdecert/model.hpp"

namespace sdecert::app {

using Json = nlohmann::ordered_json;

struct FiniteErrorSettings {
  std::int64_t segments = 1000;
  std::int64_t chains = 8;
  std::int64_t burn_in_segments = 1;
  friend bool operator==(const FiniteErrorSettings&, const FiniteErrorSettings&) = default;
};

struct ContractionSettings {
  std::int64_t pairs = 200;
  std::int64_t replicates = 50;
  double exceedance_fraction = 0.05;
  std::int64_t min_exceedances = 30;
  friend bool operator==(const ContractionSettings&, const ContractionSettings&) = default;
};

struct TailSettings {
  std::int64_t pairs = 1000;
  /// Coupling horizon for the survival curve; defaults to 4T.
  std::optional<double> horizon;
  /// Step size for the tail runs; defaults to h.
  std::optional<double> h;
  double window_lower = 0.01;
  double window_upper = 0.5;
  friend bool operator==(const TailSettings&, const TailSettings&) = default;
};

struct ValidateSettings {
  /// Histogram box in the binned coordinates; defaults to Ω (or the catalog box).
  std::optional<OmegaBox> box;
  std::vector<int> resolution;
  /// Coordinates to bin; all when empty.
  std::vector<int> axes;
  std::int64_t steps = 1000000;
  std::int64_t burn_in_steps = 10000;
  std::int64_t chains = 8;
  /// Fractions of `steps` for the n^{−1/2} extrapolation; a single full run when empty.
  std::vector<double> extrapolation_fractions;
  friend bool operator==(const ValidateSettings&, const ValidateSettings&) = default;
};

struct RunConfig {
  std::string model = "ring";
  ParamMap params;
  Scheme scheme = Scheme::EulerMaruyama;
  std::optional<double> strong_order;
  double h = 0.0;
  double T = 0.0;
  CouplingPolicy coupling;
  CappedDistance distance;
  /// Explicit Ω; derived from the finite-error run (certify) or the catalog box otherwise.
  std::optional<OmegaBox> omega;
  /// Explicit ε; 1 / (unit-time samples of the finite-error run) otherwise.
  std::optional<double> epsilon;
  double omega_margin = 0.05;
  FiniteErrorSettings finite_error;
  ContractionSettings contraction;
  TailSettings tail;
  ValidateSettings validate;
  std::uint64_t seed = 1;
  /// 0 means: SDECERT_WORKERS, else the hardware thread count.
  unsigned workers = 0;
  std::string output = "sdecert-out";

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Catalog defaults for `model` (h, T, coupling kind, validation grid).
RunConfig default_config(const std::string& model);

/// Reads a config; missing keys take the defaults of the named model. Unknown keys throw.
RunConfig config_from_json(const Json& j);
Json config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);

/// Throws sdecert::Error describing the first violated constraint.
void validate_config(const RunConfig& c);

/// FNV-1a 64 of the canonical config JSON without `workers` and `output`.
std::string config_hash(const RunConfig& c);

unsigned resolve_workers(unsigned requested);

ModelPtr build_model(const RunConfig& c);
/// Explicit Ω, else the catalog default box.
OmegaBox omega_or_default(const RunConfig& c);

}  // namespace sdecert::app
