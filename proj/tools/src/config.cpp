#include "sdecert_app/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "sdecert/catalog.hpp"
#include "sdecert/error.hpp"

namespace sdecert::app {

namespace {

// Reads an object field by field and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(where_ + ": expected an object");
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <class T>
  void get(const std::string& key, T& out) {
    if (const Json* v = find(key)) {
      try {
        out = v->get<T>();
      } catch (const nlohmann::json::exception&) {
        throw Error(where_ + "." + key + ": wrong type");
      }
    }
  }

  // "auto" or null → nullopt
  void get_auto(const std::string& key, std::optional<double>& out) {
    if (const Json* v = find(key)) {
      if (v->is_null() || (v->is_string() && v->get<std::string>() == "auto")) {
        out.reset();
      } else if (v->is_number()) {
        out = v->get<double>();
      } else {
        throw Error(where_ + "." + key + ": expected a number or \"auto\"");
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw Error(where_ + ": unknown key '" + key + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

Json auto_or(const std::optional<double>& v) { return v ? Json(*v) : Json("auto"); }

Json box_to_json(const OmegaBox& b) {
  Json j;
  j["lower"] = std::vector<double>(b.lower().begin(), b.lower().end());
  j["upper"] = std::vector<double>(b.upper().begin(), b.upper().end());
  return j;
}

std::optional<OmegaBox> box_from_json(const Json& j, const std::string& where) {
  if (j.is_null() || (j.is_string() && j.get<std::string>() == "auto")) return std::nullopt;
  ObjectReader r(j, where);
  std::vector<double> lo;
  std::vector<double> hi;
  r.get("lower", lo);
  r.get("upper", hi);
  r.finish();
  if (lo.empty() || lo.size() != hi.size()) throw Error(where + ": lower and upper must be nonempty and equal length");
  return OmegaBox(Eigen::Map<const StateVec>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                  Eigen::Map<const StateVec>(hi.data(), static_cast<Eigen::Index>(hi.size())));
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

RunConfig default_config(const std::string& model) {
  const ModelCatalogEntry& entry = catalog_entry(model);
  RunConfig c;
  c.model = entry.name;
  c.params = entry.default_params;
  c.h = entry.default_h;
  c.T = entry.default_T;
  c.coupling.kind = model == "langevin-ring" ? CouplingKind::LangevinMixed : CouplingKind::Mixed;
  if (model == "ring") {
    c.validate.box = OmegaBox::cube(2, -2.0, 2.0);
    c.validate.resolution = {256, 256};
  } else if (model == "double-well") {
    c.validate.box = OmegaBox::cube(1, -2.0, 4.0);
    c.validate.resolution = {200};
  } else if (model == "langevin-ring") {
    c.validate.box = OmegaBox::cube(2, -3.0, 3.0);
    c.validate.resolution = {256, 256};
    c.validate.axes = {0, 1};
  }
  return c;
}

RunConfig config_from_json(const Json& j) {
  ObjectReader top(j, "config");
  std::string model = "ring";
  Json params = Json::object();
  if (const Json* m = top.find("model")) {
    if (m->is_string()) {
      model = m->get<std::string>();
    } else {
      ObjectReader mr(*m, "config.model");
      mr.get("name", model);
      if (const Json* p = mr.find("params")) params = *p;
      mr.finish();
    }
  }
  RunConfig c = default_config(model);
  if (!params.is_object()) throw Error("config.model.params: expected an object");
  for (const auto& [key, value] : params.items()) {
    if (!value.is_number()) throw Error("config.model.params." + key + ": expected a number");
    c.params[key] = value.get<double>();
  }

  if (const Json* s = top.find("scheme")) {
    if (!s->is_string()) throw Error("config.scheme: expected a string");
    c.scheme = parse_scheme(s->get<std::string>());
  }
  top.get_auto("strong_order", c.strong_order);
  top.get("h", c.h);
  top.get("T", c.T);

  if (const Json* cj = top.find("coupling")) {
    ObjectReader r(*cj, "config.coupling");
    if (const Json* k = r.find("kind")) {
      if (!k->is_string()) throw Error("config.coupling.kind: expected a string");
      c.coupling.kind = parse_coupling_kind(k->get<std::string>());
    }
    r.get_auto("switch_threshold", c.coupling.switch_threshold);
    if (const Json* lj = r.find("langevin")) {
      ObjectReader lr(*lj, "config.coupling.langevin");
      lr.get_auto("q_switch", c.coupling.q_switch);
      lr.get("window_multiplier", c.coupling.window_multiplier);
      lr.finish();
    }
    r.finish();
  }
  if (const Json* dj = top.find("distance")) {
    ObjectReader r(*dj, "config.distance");
    r.get("cap", c.distance.cap);
    r.get("exponent", c.distance.exponent);
    r.finish();
  }
  if (const Json* o = top.find("omega")) c.omega = box_from_json(*o, "config.omega");
  top.get_auto("epsilon", c.epsilon);
  top.get("omega_margin", c.omega_margin);

  if (const Json* fj = top.find("finite_error")) {
    ObjectReader r(*fj, "config.finite_error");
    r.get("segments", c.finite_error.segments);
    r.get("chains", c.finite_error.chains);
    r.get("burn_in_segments", c.finite_error.burn_in_segments);
    r.finish();
  }
  if (const Json* cj = top.find("contraction")) {
    ObjectReader r(*cj, "config.contraction");
    r.get("pairs", c.contraction.pairs);
    r.get("replicates", c.contraction.replicates);
    r.get("exceedance_fraction", c.contraction.exceedance_fraction);
    r.get("min_exceedances", c.contraction.min_exceedances);
    r.finish();
  }
  if (const Json* tj = top.find("tail")) {
    ObjectReader r(*tj, "config.tail");
    r.get("pairs", c.tail.pairs);
    r.get_auto("horizon", c.tail.horizon);
    r.get_auto("h", c.tail.h);
    if (const Json* w = r.find("window")) {
      if (!w->is_array() || w->size() != 2) throw Error("config.tail.window: expected [lower, upper]");
      c.tail.window_lower = (*w)[0].get<double>();
      c.tail.window_upper = (*w)[1].get<double>();
    }
    r.finish();
  }
  if (const Json* vj = top.find("validate")) {
    ObjectReader r(*vj, "config.validate");
    if (const Json* b = r.find("box")) c.validate.box = box_from_json(*b, "config.validate.box");
    r.get("resolution", c.validate.resolution);
    r.get("axes", c.validate.axes);
    r.get("steps", c.validate.steps);
    r.get("burn_in_steps", c.validate.burn_in_steps);
    r.get("chains", c.validate.chains);
    r.get("extrapolation_fractions", c.validate.extrapolation_fractions);
    r.finish();
  }
  top.get("seed", c.seed);
  top.get("workers", c.workers);
  top.get("output", c.output);
  top.finish();
  return c;
}

Json config_to_json(const RunConfig& c) {
  Json j;
  Json params = Json::object();
  for (const auto& [k, v] : c.params) params[k] = v;
  j["model"] = {{"name", c.model}, {"params", params}};
  j["scheme"] = std::string(to_string(c.scheme));
  j["strong_order"] = auto_or(c.strong_order);
  j["h"] = c.h;
  j["T"] = c.T;
  j["coupling"] = {{"kind", std::string(to_string(c.coupling.kind))},
                   {"switch_threshold", auto_or(c.coupling.switch_threshold)},
                   {"langevin",
                    {{"q_switch", auto_or(c.coupling.q_switch)}, {"window_multiplier", c.coupling.window_multiplier}}}};
  j["distance"] = {{"cap", c.distance.cap}, {"exponent", c.distance.exponent}};
  j["omega"] = c.omega ? box_to_json(*c.omega) : Json("auto");
  j["epsilon"] = auto_or(c.epsilon);
  j["omega_margin"] = c.omega_margin;
  j["finite_error"] = {{"segments", c.finite_error.segments},
                       {"chains", c.finite_error.chains},
                       {"burn_in_segments", c.finite_error.burn_in_segments}};
  j["contraction"] = {{"pairs", c.contraction.pairs},
                      {"replicates", c.contraction.replicates},
                      {"exceedance_fraction", c.contraction.exceedance_fraction},
                      {"min_exceedances", c.contraction.min_exceedances}};
  j["tail"] = {{"pairs", c.tail.pairs},
               {"horizon", auto_or(c.tail.horizon)},
               {"h", auto_or(c.tail.h)},
               {"window", {c.tail.window_lower, c.tail.window_upper}}};
  j["validate"] = {{"box", c.validate.box ? box_to_json(*c.validate.box) : Json("auto")},
                   {"resolution", c.validate.resolution},
                   {"axes", c.validate.axes},
                   {"steps", c.validate.steps},
                   {"burn_in_steps", c.validate.burn_in_steps},
                   {"chains", c.validate.chains},
                   {"extrapolation_fractions", c.validate.extrapolation_fractions}};
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output"] = c.output;
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  Json j;
  try {
    j = Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::exception& e) {
    throw Error("config file " + path + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void validate_config(const RunConfig& c) {
  const ModelCatalogEntry& entry = catalog_entry(c.model);
  const ParamMap resolved = resolve_params(entry, c.params);
  const ModelPtr model = entry.build(resolved);
  const Eigen::Index dim = model->dim();

  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw Error(std::string(what) + " must be positive and finite");
  };
  positive(c.h, "h");
  positive(c.T, "T");
  try {
    step_count(c.T, 2.0 * c.h);
  } catch (const Error&) {
    throw Error("T = " + std::to_string(c.T) + " must be an integer multiple of 2h = " + std::to_string(2.0 * c.h));
  }
  if (c.strong_order) positive(*c.strong_order, "strong_order");
  if (c.coupling.switch_threshold && !(*c.coupling.switch_threshold >= 0.0)) {
    throw Error("coupling.switch_threshold must be nonnegative");
  }
  if (c.coupling.q_switch && !(*c.coupling.q_switch >= 0.0)) throw Error("coupling.langevin.q_switch must be nonnegative");
  if (!(c.coupling.window_multiplier >= 0.0)) throw Error("coupling.langevin.window_multiplier must be nonnegative");
  PairCoupler(model, c.h, c.coupling);
  c.distance.validate();
  if (c.omega && c.omega->dim() != dim) throw Error("omega must have dimension " + std::to_string(dim));
  if (c.epsilon && !(*c.epsilon >= 0.0 && *c.epsilon < 1.0)) throw Error("epsilon must lie in [0, 1)");
  if (!(c.omega_margin >= 0.0)) throw Error("omega_margin must be nonnegative");
  if (c.finite_error.segments < 1 || c.finite_error.chains < 1 || c.finite_error.burn_in_segments < 0) {
    throw Error("finite_error: segments and chains must be ≥ 1, burn_in_segments ≥ 0");
  }
  if (c.contraction.pairs < 1 || c.contraction.replicates < 1 || c.contraction.min_exceedances < 2) {
    throw Error("contraction: pairs and replicates must be ≥ 1, min_exceedances ≥ 2");
  }
  if (!(c.contraction.exceedance_fraction > 0.0 && c.contraction.exceedance_fraction < 1.0)) {
    throw Error("contraction.exceedance_fraction must lie in (0, 1)");
  }
  if (c.tail.pairs < 1) throw Error("tail.pairs must be ≥ 1");
  if (c.tail.h) positive(*c.tail.h, "tail.h");
  if (c.tail.horizon) {
    positive(*c.tail.horizon, "tail.horizon");
    step_count(*c.tail.horizon, c.tail.h.value_or(c.h));
  }
  if (!(c.tail.window_lower > 0.0 && c.tail.window_lower < c.tail.window_upper && c.tail.window_upper <= 1.0)) {
    throw Error("tail.window must satisfy 0 < lower < upper ≤ 1");
  }
  const auto& v = c.validate;
  const auto vdim = v.axes.empty() ? dim : static_cast<Eigen::Index>(v.axes.size());
  for (int a : v.axes) {
    if (a < 0 || a >= dim) throw Error("validate.axes entries must lie in [0, " + std::to_string(dim) + ")");
  }
  if (v.box && v.box->dim() != vdim) throw Error("validate.box must have dimension " + std::to_string(vdim));
  if (!v.resolution.empty() && static_cast<Eigen::Index>(v.resolution.size()) != vdim) {
    throw Error("validate.resolution needs one entry per binned axis");
  }
  for (int r : v.resolution) {
    if (r < 1) throw Error("validate.resolution entries must be ≥ 1");
  }
  if (v.steps < 1 || v.burn_in_steps < 0 || v.chains < 1) throw Error("validate: invalid step or chain counts");
  for (double f : v.extrapolation_fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw Error("validate.extrapolation_fractions must lie in (0, 1]");
  }
}

std::string config_hash(const RunConfig& c) {
  Json j = config_to_json(c);
  j.erase("workers");
  j.erase("output");
  std::ostringstream s;
  s << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(j.dump());
  return s.str();
}

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SDECERT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ModelPtr build_model(const RunConfig& c) {
  const ModelCatalogEntry& entry = catalog_entry(c.model);
  return entry.build(resolve_params(entry, c.params));
}

OmegaBox omega_or_default(const RunConfig& c) {
  if (c.omega) return *c.omega;
  const ModelCatalogEntry& entry = catalog_entry(c.model);
  return entry.default_omega(resolve_params(entry, c.params));
}

}  // namespace sdecert::app
