#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "experiment.hpp"
#include "ops_ftrl/errors.hpp"

namespace {

using namespace ops_ftrl;
using namespace ops_ftrl::cli;

struct SourceFlags {
  std::string gen;
  std::string data;
  std::string mode = "relatives";
  std::size_t d = 2;
  std::optional<std::size_t> T;
  std::uint64_t seed = 0;
  std::vector<double> base;
  std::size_t winner = 0;
  double epsilon = 0.1;
  double kelly_ratio = 2.0;
};

void add_source_flags(CLI::App* cmd, SourceFlags& f, bool allow_csv) {
  auto* gen = cmd->add_option("--gen", f.gen,
                              "Generator: constant, single_winner, iid_uniform, "
                              "two_asset_alternating, adversarial_kelly");
  if (allow_csv) {
    auto* data = cmd->add_option("--data", f.data, "CSV file of price relatives or prices");
    gen->excludes(data);
    cmd->add_option("--mode", f.mode, "CSV interpretation: relatives or raw_prices")
        ->capture_default_str();
  }
  cmd->add_option("--d", f.d, "Number of assets (generators)")->capture_default_str();
  cmd->add_option("--T", f.T, "Horizon");
  cmd->add_option("--seed", f.seed, "Generator seed")->capture_default_str();
  cmd->add_option("--base", f.base, "constant: raw relative vector");
  cmd->add_option("--winner", f.winner, "single_winner: winning asset")
      ->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "two_asset_alternating: losing relative")
      ->capture_default_str();
  cmd->add_option("--kelly-ratio", f.kelly_ratio, "adversarial_kelly: swing factor")
      ->capture_default_str();
}

GeneratorSpec generator_spec(const SourceFlags& f) {
  GeneratorSpec spec;
  spec.kind = parse_market_kind(f.gen);
  spec.d = f.d;
  if (!f.T) throw ConfigError("--T is required with --gen");
  spec.T = *f.T;
  spec.seed = f.seed;
  spec.base = f.base;
  spec.winner = f.winner;
  spec.epsilon = f.epsilon;
  spec.kelly_ratio = f.kelly_ratio;
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log-barrier optimistic FTRL for online portfolio selection"};
  app.require_subcommand(1);

  SourceFlags run_src;
  std::string algo = "gv";
  double eta = kMaxAverageEta;
  std::string run_out;
  std::string trace_out;
  bool truncate = false;
  auto* run = app.add_subcommand("run", "Run one algorithm and score it against its bound");
  run->add_option("--algo", algo, "gv, smallloss, avg or aa")->capture_default_str();
  add_source_flags(run, run_src, true);
  run->add_option("--eta", eta, "avg: constant learning rate, at most 1/(2 sqrt 2)");
  run->add_option("--out", run_out, "JSON report path (default stdout)");
  run->add_option("--trace-out", trace_out, "Per-round CSV trace path");
  run->add_flag("--truncate-horizon", truncate,
                "Allow --T beyond the CSV length; all rows run under the declared T");

  SourceFlags gen_src;
  std::string gen_out;
  auto* gen = app.add_subcommand("generate", "Write a synthetic market as CSV");
  add_source_flags(gen, gen_src, false);
  gen->add_option("--out", gen_out, "CSV path (default stdout)");

  std::string suite;
  std::size_t trials = 100;
  std::uint64_t verify_seed = 0;
  std::string verify_out;
  auto* ver = app.add_subcommand("verify", "Run a randomized property suite");
  ver->add_option("suite", suite, "lemmas, solver or bounds")->required();
  ver->add_option("--trials", trials, "Trials per check")->capture_default_str();
  ver->add_option("--seed", verify_seed, "Suite seed")->capture_default_str();
  ver->add_option("--out", verify_out, "JSON summary path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) {
      ExperimentConfig config;
      config.algo = parse_algo_kind(algo);
      if (!run_src.data.empty()) {
        config.source = CsvSource{run_src.data, parse_csv_mode(run_src.mode)};
        config.horizon = run_src.T;
      } else if (!run_src.gen.empty()) {
        config.source = generator_spec(run_src);
      } else {
        throw ConfigError("one of --gen or --data is required");
      }
      config.truncate_horizon = truncate;
      config.eta = eta;
      if (!run_out.empty()) config.out = run_out;
      if (!trace_out.empty()) config.trace_out = trace_out;
      return cmd_run(config, std::cout);
    }
    if (*gen) {
      if (gen_src.gen.empty()) throw ConfigError("--gen is required");
      const MarketHistory history = generate(generator_spec(gen_src));
      if (gen_out.empty()) {
        write_csv(std::cout, history);
      } else {
        save_csv(gen_out, history);
      }
      return kExitOk;
    }
    std::optional<std::filesystem::path> out;
    if (!verify_out.empty()) out = verify_out;
    return cmd_verify(suite, trials, verify_seed, std::cout, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
