#include "sdecert/catalog.hpp"

#include <array>
#include <cmath>
#include <memory>

#include "sdecert/error.hpp"
#include "sdecert/models.hpp"

namespace sdecert {

// ---------------------------------------------------------------- catalog

namespace {

int integer_param(const ParamMap& p, const char* key) {
  const double v = p.at(key);
  if (v != std::round(v)) throw Error(std::string("parameter ") + key + " must be an integer");
  return static_cast<int>(v);
}

std::vector<ModelCatalogEntry> build_catalog() {
  std::vector<ModelCatalogEntry> c;

  c.push_back({"ring", "planar gradient flow towards the unit circle with rotation", {{"sigma", 0.5}}, 0.0008,
               10.0, [](const ParamMap&) { return OmegaBox::cube(2, -2.0, 2.0); },
               [](const ParamMap& p) { return std::make_shared<RingModel>(p.at("sigma")); }});

  c.push_back({"double-well", "asymmetric 1-D double well with quadratic tails", {{"r", 5.0}, {"sigma", 1.2}},
               0.0025, 50.0, [](const ParamMap&) { return OmegaBox::cube(1, -2.0, 4.0); },
               [](const ParamMap& p) { return std::make_shared<DoubleWellModel>(p.at("r"), p.at("sigma")); }});

  c.push_back({"langevin-ring", "underdamped Langevin dynamics in the ring potential",
               {{"gamma", 1.0}, {"sigma", 0.5}}, 0.001, 40.0,
               [](const ParamMap&) {
                 return OmegaBox::product(OmegaBox::cube(2, -3.0, 3.0), OmegaBox::cube(2, -6.0, 6.0));
               },
               [](const ParamMap& p) {
                 return std::make_shared<LangevinModel>(std::make_shared<RingPotential>(), p.at("gamma"),
                                                        p.at("sigma"));
               }});

  c.push_back({"lorenz96", "stochastically forced Lorenz-96", {{"D", 4.0}, {"F", 8.0}, {"sigma", 3.0}}, 1e-4, 3.0,
               [](const ParamMap& p) { return OmegaBox::cube(integer_param(p, "D"), -16.0, 19.0); },
               [](const ParamMap& p) {
                 return std::make_shared<Lorenz96Model>(integer_param(p, "D"), p.at("F"), p.at("sigma"));
               }});

  c.push_back({"fhn", "ring of FitzHugh-Nagumo neurons with mean-field coupling",
               {{"N", 2.0}, {"mu", 0.1}, {"d_u", 0.03}, {"w", 0.3}, {"sigma", 0.6}, {"a", 1.05}}, 5e-4, 3.0,
               [](const ParamMap& p) { return OmegaBox::cube(2 * integer_param(p, "N"), -6.0, 6.0); },
               [](const ParamMap& p) {
                 FitzHughNagumoModel::Params fp;
                 fp.neurons = integer_param(p, "N");
                 fp.mu = p.at("mu");
                 fp.d_u = p.at("d_u");
                 fp.w = p.at("w");
                 fp.sigma = p.at("sigma");
                 fp.a = p.at("a");
                 return std::make_shared<FitzHughNagumoModel>(fp);
               }});
  return c;
}

}  // namespace

std::span<const ModelCatalogEntry> model_catalog() {
  static const std::vector<ModelCatalogEntry> catalog = build_catalog();
  return catalog;
}

const ModelCatalogEntry& catalog_entry(std::string_view name) {
  for (const auto& entry : model_catalog()) {
    if (entry.name == name) return entry;
  }
  std::string known;
  for (const auto& entry : model_catalog()) known += (known.empty() ? "" : ", ") + entry.name;
  throw Error("unknown model '" + std::string(name) + "' (known: " + known + ")");
}

ParamMap resolve_params(const ModelCatalogEntry& entry, const ParamMap& overrides) {
  ParamMap resolved = entry.default_params;
  for (const auto& [key, value] : overrides) {
    auto it = resolved.find(key);
    if (it == resolved.end()) throw Error("model '" + entry.name + "' has no parameter '" + key + "'");
    if (!std::isfinite(value)) throw Error("parameter '" + key + "' must be finite");
    it->second = value;
  }
  return resolved;
}

ModelPtr make_model(std::string_view name, const ParamMap& overrides) {
  const auto& entry = catalog_entry(name);
  return entry.build(resolve_params(entry, overrides));
}

}  // namespace sdecert
