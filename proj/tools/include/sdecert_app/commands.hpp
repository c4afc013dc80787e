#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdecert/estimators.hpp"
#include "sdecert/validate.hpp"
#include "sdecert_app/config.hpp"

namespace sdecert::app {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kConfigError = 2,
  kEstimatorFailure = 3,
  kDiverged = 4,
};

/// State shared by the pipeline stages of one invocation.
struct RunContext {
  RunConfig config;
  ModelPtr model;
  unsigned workers = 1;
  std::filesystem::path out_dir;
  std::ostream* log = nullptr;

  std::optional<FiniteTimeResult> finite;
  std::optional<OmegaEstimate> derived;
  std::optional<ContractionEstimate> contraction;
  std::optional<TailRateResult> tail;
  Json results = Json::object();
  Json warnings = Json::array();

  RunContext(RunConfig c, unsigned workers, std::ostream* log);
};

void stage_finite_error(RunContext& ctx);
void stage_contraction(RunContext& ctx);
void stage_tail_rate(RunContext& ctx);
/// Ω/ε (explicit or derived) → finite-time error → contraction rate → (E + 2ε)/(1 − α).
void stage_certify(RunContext& ctx);
/// Finite-time error and tail rate → (E + 2ε)/(1 − e^{−γT}).
void stage_rough(RunContext& ctx);
void stage_validate(RunContext& ctx);

void run_stage(RunContext& ctx, const std::string& stage);

/// Runs `stages`, then writes summary.json into the output directory.
/// Returns an ExitCode; failures are reported in the summary and on `err`.
int run_pipeline(const std::string& command, const std::vector<std::string>& stages, const RunConfig& config,
                 unsigned workers, std::ostream& log, std::ostream& err, const Json& extra = Json::object());

/// Summary document; `timestamp` is the only field that varies between identical runs.
Json make_summary(const std::string& command, const RunContext& ctx, const std::string& status,
                  const std::string& timestamp);

std::string utc_timestamp();

}  // namespace sdecert::app
