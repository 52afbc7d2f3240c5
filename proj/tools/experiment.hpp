#pragma once

// Experiment plumbing behind the ops_ftrl command-line tool: configuration,
// JSON reports and per-round CSV traces. Kept out of main.cpp so the tests
// can drive it directly.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "ops_ftrl/algorithms.hpp"
#include "ops_ftrl/market_data.hpp"
#include "ops_ftrl/metrics.hpp"
#include "ops_ftrl/verify.hpp"

namespace ops_ftrl::cli {

inline constexpr int kReportSchemaVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBoundViolated = 2;

struct CsvSource {
  std::filesystem::path path;
  CsvMode mode = CsvMode::kRelatives;
};

struct ExperimentConfig {
  AlgoKind algo = AlgoKind::kGradualVariation;
  std::variant<GeneratorSpec, CsvSource> source;
  // Rounds to run from a CSV source, and the aa horizon. Defaults to the
  // number of rounds available.
  std::optional<std::size_t> horizon;
  bool truncate_horizon = false;
  double eta = kMaxAverageEta;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> trace_out;
};

struct Experiment {
  MarketHistory history;
  std::size_t learner_horizon = 0;
};

// Loads or generates the market and applies the horizon policy:
//   horizon <  rounds  -> the first `horizon` rounds are used
//   horizon == rounds  -> all rounds
//   horizon >  rounds  -> ConfigError unless truncate_horizon; then all rounds
//                         run and aa keeps the declared horizon
// Also rejects avg learning rates above 1/(2 sqrt 2).
Experiment prepare(const ExperimentConfig& config);

nlohmann::json config_to_json(const ExperimentConfig& config);
// wall_seconds lands in report["timing"], the only nondeterministic field.
nlohmann::json make_report(const ExperimentConfig& config, const ScoredRun& run,
                           double wall_seconds);
void write_trace_csv(std::ostream& out, const ScoredRun& run);

// Runs the experiment, writes the report (stdout when no --out) and the
// optional trace. Returns kExitOk, or kExitBoundViolated when the measured
// regret exceeds the theorem bound. Throws on configuration and I/O errors.
int cmd_run(const ExperimentConfig& config, std::ostream& stdout_sink);

nlohmann::json suite_to_json(const verify::SuiteReport& report);
// Prints one line per check and the first counterexample of each failing
// check. Returns kExitOk when every check passed, kExitBoundViolated when a
// bounds check failed, kExitError otherwise.
int cmd_verify(const std::string& suite, std::size_t trials, std::uint64_t seed,
               std::ostream& log, const std::optional<std::filesystem::path>& out = {});

}  // namespace ops_ftrl::cli
