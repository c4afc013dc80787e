#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sdecert/catalog.hpp"
#include "sdecert/error.hpp"
#include "sdecert_app/commands.hpp"
#include "sdecert_app/config.hpp"
#include "sdecert_app/presets.hpp"

using namespace sdecert;
using namespace sdecert::app;

namespace {

struct CommonFlags {
  std::string config_path;
  std::string model;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  std::string scale = "desk";
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_scale) {
  cmd->add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--model", f.model, "catalog model to use when no config is given");
  cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
  cmd->add_option("--workers", f.workers, "worker threads (default: SDECERT_WORKERS or all cores)");
  cmd->add_option("--out", f.out, "output directory (overrides the config)");
  if (with_scale) {
    cmd->add_option("--scale", f.scale, "preset scale")->check(CLI::IsMember({"desk", "paper"}));
  }
}

RunConfig base_config(const CommonFlags& f) {
  RunConfig c;
  if (!f.config_path.empty()) {
    c = load_config(f.config_path);
    if (!f.model.empty() && f.model != c.model) throw Error("--model conflicts with the model in --config");
  } else {
    c = default_config(f.model.empty() ? "ring" : f.model);
  }
  return c;
}

void apply_overrides(RunConfig& c, const CommonFlags& f) {
  if (f.seed) c.seed = *f.seed;
  if (!f.out.empty()) c.output = f.out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sdecert: Wasserstein-distance certificates for the invariant measure of SDE integrators"};
  app.require_subcommand(1);

  CommonFlags flags;
  const std::vector<std::pair<std::string, std::string>> pipeline_commands = {
      {"finite-error", "finite-time error by common-noise extrapolation"},
      {"contraction", "contraction rate α_Ω from coupling runs and a GPD tail fit"},
      {"tail-rate", "exponential tail rate γ of the coupling time"},
      {"certify", "Ω and ε, finite-time error, contraction rate, certified bound"},
      {"rough", "finite-time error and tail rate, rough bound"},
      {"validate", "histogram of the numerical chain against the analytic density"},
  };
  std::vector<CLI::App*> pipeline;
  for (const auto& [name, help] : pipeline_commands) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_common(cmd, flags, false);
    pipeline.push_back(cmd);
  }

  std::string example;
  CLI::App* reproduce = app.add_subcommand("reproduce", "run a packaged benchmark study");
  reproduce->add_option("example", example, "study name")->required()->check(CLI::IsMember(preset_names()));
  add_common(reproduce, flags, true);

  CLI::App* show = app.add_subcommand("show-config", "print the resolved configuration as JSON");
  std::string show_example;
  show->add_option("--example", show_example, "print a packaged study instead")->check(CLI::IsMember(preset_names()));
  add_common(show, flags, true);

  CLI::App* list = app.add_subcommand("list", "list catalog models and packaged studies");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigError;
  }

  try {
    if (list->parsed()) {
      for (const auto& entry : model_catalog()) std::cout << "model  " << entry.name << "  " << entry.summary << "\n";
      for (const auto& name : preset_names()) {
        std::cout << "study  " << name << "  " << make_preset(name, Scale::Desk).description << "\n";
      }
      return kOk;
    }
    if (show->parsed()) {
      RunConfig c = show_example.empty() ? base_config(flags) : make_preset(show_example, parse_scale(flags.scale)).config;
      apply_overrides(c, flags);
      if (flags.workers > 0) c.workers = flags.workers;
      std::cout << config_to_json(c).dump(2) << "\n";
      return kOk;
    }
    if (reproduce->parsed()) {
      const Preset p = make_preset(example, parse_scale(flags.scale));
      RunConfig c = p.config;
      if (!flags.config_path.empty()) throw Error("reproduce takes its configuration from the packaged study");
      apply_overrides(c, flags);
      const unsigned workers = resolve_workers(flags.workers > 0 ? flags.workers : c.workers);
      std::cerr << "reproduce " << p.name << " (" << to_string(parse_scale(flags.scale)) << " scale, " << p.cost
                << ", " << workers << " workers)\n";
      const Json extra = {{"example", p.name}, {"scale", flags.scale}, {"reference", p.reference}};
      return run_pipeline("reproduce " + p.name, p.stages, c, workers, std::cerr, std::cerr, extra);
    }
    for (CLI::App* cmd : pipeline) {
      if (!cmd->parsed()) continue;
      RunConfig c = base_config(flags);
      apply_overrides(c, flags);
      const unsigned workers = resolve_workers(flags.workers > 0 ? flags.workers : c.workers);
      return run_pipeline(cmd->get_name(), {cmd->get_name()}, c, workers, std::cerr, std::cerr);
    }
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
