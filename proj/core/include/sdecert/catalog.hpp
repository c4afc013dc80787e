#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sdecert/box.hpp"
#include "sdecert/model.hpp"

namespace sdecert {

/// Built-in benchmark system with the settings it is usually run at.
struct ModelCatalogEntry {
  std::string name;
  std::string summary;
  ParamMap default_params;
  double default_h = 0.0;
  double default_T = 0.0;
  std::function<OmegaBox(const ParamMap& resolved)> default_omega;
  std::function<ModelPtr(const ParamMap& resolved)> build;
};

std::span<const ModelCatalogEntry> model_catalog();

/// Throws sdecert::Error for unknown names.
const ModelCatalogEntry& catalog_entry(std::string_view name);

/// Defaults overlaid with `overrides`; unknown parameter names are rejected.
ParamMap resolve_params(const ModelCatalogEntry& entry, const ParamMap& overrides);

ModelPtr make_model(std::string_view name, const ParamMap& overrides = {});

}  // namespace sdecert
