#include "experiment.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>

#include "ops_ftrl/errors.hpp"

namespace ops_ftrl::cli {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw InputError("write to '" + path.string() + "' failed");
}

}  // namespace

Experiment prepare(const ExperimentConfig& config) {
  if (config.algo == AlgoKind::kAverageOptimism &&
      (!(config.eta > 0.0) || config.eta > kMaxAverageEta * (1.0 + 1e-15))) {
    throw ConfigError("--eta must lie in (0, 1/(2*sqrt(2))] for avg");
  }

  MarketHistory history = std::visit(
      [](const auto& src) -> MarketHistory {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, GeneratorSpec>) {
          return generate(src);
        } else {
          return load_csv(src.path, src.mode);
        }
      },
      config.source);

  const std::size_t available = history.horizon();
  std::size_t horizon = config.horizon.value_or(available);
  if (horizon == 0) throw ConfigError("--T must be positive");
  if (horizon > available) {
    if (!config.truncate_horizon) {
      throw ConfigError("horizon T = " + std::to_string(horizon) + " exceeds the " +
                        std::to_string(available) +
                        " rounds of data; pass --truncate-horizon to run all "
                        "available rounds under the declared horizon");
    }
  } else if (horizon < available) {
    history = history.prefix(horizon);
  }
  if (config.algo == AlgoKind::kAggregating && horizon < 2) {
    throw ConfigError("aa needs a horizon T >= 2");
  }
  return Experiment{std::move(history), horizon};
}

json config_to_json(const ExperimentConfig& config) {
  json j;
  j["algo"] = std::string(to_string(config.algo));
  std::visit(
      [&](const auto& src) {
        using T = std::decay_t<decltype(src)>;
        if constexpr (std::is_same_v<T, GeneratorSpec>) {
          json s;
          s["type"] = "generator";
          s["kind"] = std::string(to_string(src.kind));
          s["d"] = src.d;
          s["T"] = src.T;
          s["seed"] = src.seed;
          s["winner"] = src.winner;
          s["epsilon"] = src.epsilon;
          s["kelly_ratio"] = src.kelly_ratio;
          s["base"] = src.base;
          j["source"] = std::move(s);
        } else {
          j["source"] = json{{"type", "csv"},
                             {"path", src.path.generic_string()},
                             {"mode", std::string(to_string(src.mode))}};
        }
      },
      config.source);
  j["horizon"] = config.horizon ? json(*config.horizon) : json(nullptr);
  j["truncate_horizon"] = config.truncate_horizon;
  j["eta"] = config.algo == AlgoKind::kAverageOptimism ? json(config.eta) : json(nullptr);
  return j;
}

json make_report(const ExperimentConfig& config, const ScoredRun& run,
                 double wall_seconds) {
  json summary;
  summary["d"] = run.d;
  summary["T"] = run.T;
  summary["cumulative_loss"] = run.trace.cumulative_loss;
  summary["comparator_loss"] = run.trace.comparator_loss;
  summary["comparator_gap"] = run.trace.comparator_gap;
  summary["comparator"] = std::vector<double>(run.trace.comparator.weights().begin(),
                                              run.trace.comparator.weights().end());
  summary["domain_trimmed"] = run.trace.domain_trimmed;
  summary["regret"] = run.trace.regret;
  summary["V_T"] = run.stats.gradual_variation;
  summary["L_star"] = run.stats.l_star;
  summary["Q_T"] = run.stats.second_order;
  summary["statistic_name"] = run.statistic_name;
  summary["statistic"] = run.statistic;
  summary["bound"] = run.bound;
  summary["compliant"] = run.compliant;

  json histogram = json::object();
  std::size_t total = 0;
  std::size_t max_iters = 0;
  for (const auto& [iters, count] : run.newton_histogram) {
    histogram[std::to_string(iters)] = count;
    total += iters * count;
    max_iters = std::max(max_iters, iters);
  }
  summary["newton_iterations"] = {
      {"histogram", histogram}, {"total", total}, {"max", max_iters}};

  if (run.aggregate) {
    const auto& agg = *run.aggregate;
    summary["aggregate"] = {{"expert_count", agg.expert_count},
                            {"expert_etas", agg.expert_etas},
                            {"expert_losses", agg.expert_losses},
                            {"expert_q", agg.expert_q},
                            {"log_wealth", agg.log_wealth},
                            {"mean_expert_log_wealth", agg.mean_expert_log_wealth}};
  }

  json rounds = json::array();
  for (const auto& r : run.rounds) {
    rounds.push_back({{"t", r.t},
                      {"loss", r.loss},
                      {"cumulative_loss", r.cumulative_loss},
                      {"eta", optional_number(r.eta)},
                      {"statistic", r.statistic}});
  }

  json report;
  report["schema_version"] = kReportSchemaVersion;
  report["config"] = config_to_json(config);
  report["summary"] = std::move(summary);
  report["rounds"] = std::move(rounds);
  report["timing"] = {{"wall_seconds", wall_seconds}};
  return report;
}

void write_trace_csv(std::ostream& out, const ScoredRun& run) {
  out << "t,loss,cumulative_loss,eta,statistic";
  for (std::size_t i = 0; i < run.d; ++i) out << ",x_" << i;
  out << '\n';
  for (std::size_t k = 0; k < run.rounds.size(); ++k) {
    const auto& r = run.rounds[k];
    out << r.t << ',' << format_double(r.loss) << ',' << format_double(r.cumulative_loss)
        << ',' << (r.eta ? format_double(*r.eta) : std::string()) << ','
        << format_double(r.statistic);
    for (double w : run.trace.portfolios[k].weights()) out << ',' << format_double(w);
    out << '\n';
  }
}

int cmd_run(const ExperimentConfig& config, std::ostream& stdout_sink) {
  const auto start = std::chrono::steady_clock::now();
  const Experiment experiment = prepare(config);

  RunOptions options;
  options.learner.eta = config.eta;
  options.learner.horizon = experiment.learner_horizon;
  const ScoredRun run = run_and_score(config.algo, experiment.history, options);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::string report = make_report(config, run, wall).dump(2) + "\n";
  if (config.out) {
    write_file(*config.out, report);
  } else {
    stdout_sink << report;
  }
  if (config.trace_out) {
    std::ofstream trace(*config.trace_out, std::ios::binary);
    if (!trace) {
      throw InputError("cannot open '" + config.trace_out->string() + "' for writing");
    }
    write_trace_csv(trace, run);
  }
  return run.compliant ? kExitOk : kExitBoundViolated;
}

json suite_to_json(const verify::SuiteReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"trials", c.trials},
                      {"failures", c.failures},
                      {"worst_margin", c.worst_margin},
                      {"first_counterexample", c.first_counterexample},
                      {"passed", c.passed()}});
  }
  return {{"suite", report.suite},
          {"seed", report.seed},
          {"passed", report.passed()},
          {"checks", checks}};
}

int cmd_verify(const std::string& suite, std::size_t trials, std::uint64_t seed,
               std::ostream& log, const std::optional<std::filesystem::path>& out) {
  const verify::SuiteReport report =
      verify::run_suite(suite, trials, seed, verify::threads_from_env());
  for (const auto& c : report.checks) {
    log << (c.passed() ? "PASS " : "FAIL ") << report.suite << '/' << c.name << "  ("
        << c.trials << " trials, " << c.failures << " failures, worst margin "
        << std::setprecision(6) << c.worst_margin << ")\n";
    if (!c.passed()) log << "  counterexample: " << c.first_counterexample << '\n';
  }
  if (out) write_file(*out, suite_to_json(report).dump(2) + "\n");
  if (report.passed()) return kExitOk;
  return report.suite == "bounds" ? kExitBoundViolated : kExitError;
}

}  // namespace ops_ftrl::cli
