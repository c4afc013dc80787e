#pragma once

#include <string>
#include <vector>

#include "sdecert_app/config.hpp"

namespace sdecert::app {

enum class Scale { Desk, Paper };

Scale parse_scale(const std::string& text);
std::string to_string(Scale scale);

/// Packaged configuration for one of the benchmark studies.
struct Preset {
  std::string name;
  std::string description;
  RunConfig config;
  /// Pipeline stages run by `reproduce`, in order.
  std::vector<std::string> stages;
  /// Published values the run is compared against.
  Json reference;
  /// Rough single-core cost at this scale.
  std::string cost;
};

std::vector<std::string> preset_names();
Preset make_preset(const std::string& name, Scale scale);

}  // namespace sdecert::app
