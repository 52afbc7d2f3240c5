#pragma once

// Regret measurement against the best constant-rebalanced portfolio (CRP),
// the data-dependent statistics the regret bounds are stated in, and the
// bounds themselves as executable formulas.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ops_ftrl/algorithms.hpp"
#include "ops_ftrl/market_data.hpp"
#include "ops_ftrl/simplex.hpp"

namespace ops_ftrl {

struct CrpOptions {
  // Stop once the duality gap is <= gap_tolerance * max(1, T).
  double gap_tolerance = 1e-6;
  std::size_t max_iterations = 200000;
};

struct CrpResult {
  Portfolio x_star = Portfolio::uniform(1);
  double l_star = 0.0;  // sum_t f_t(x_star)
  double gap = 0.0;     // certified: l_star - min L <= gap
  std::size_t iterations = 0;
};

// Minimizes L(x) = -sum_t log <a_t, x> over the simplex by pairwise
// Frank-Wolfe with exact line search, starting from the uniform portfolio.
// Iterates never leave dom L, so vertices of infinite loss are never chosen.
// SolverError (carrying the final gap) if the iteration cap is reached.
CrpResult best_crp(const MarketHistory& history, const CrpOptions& options = {});

struct DataStatistics {
  double gradual_variation = 0.0;  // V_T
  double l_star = 0.0;             // L_T*
  double l_star_gap = 0.0;
  double second_order = 0.0;       // Q_T
};

// V_T = sum_{t>=2} ||x_{t-1} (.) (grad f_t(x_{t-1}) - grad f_{t-1}(x_{t-1}))||^2
double gradual_variation(const MarketHistory& history,
                         const std::vector<Portfolio>& portfolios);
// Q_T = min_p sum_t ||x_t (.) grad f_t(x_t) - p||^2, attained at the mean.
double second_order_statistic(const MarketHistory& history,
                              const std::vector<Portfolio>& portfolios);

// portfolios[t] must be the iterate played in round t+1. InputError on a
// length mismatch.
DataStatistics data_statistics(const MarketHistory& history,
                               const std::vector<Portfolio>& portfolios,
                               const CrpOptions& crp = {});

// Right-hand sides of the regret bounds, natural logs throughout.
//   gv        (log T + 8) sqrt(d V + 512 d^2) + sqrt(2d) log T + 2 - 128 sqrt(2d)
//   smallloss 2 (log T + 2) sqrt(4 d L* + 4 d^2 + d) + d (log T + 2)^2
//   avg       d log T / eta + 2 eta (log T + 1) + 2 + eta Q      (constant eta)
//   aa        Q >= 1: (1 + sqrt2) sqrt(d Q log T) + 2 sqrt2 d log T
//                     + log T / sqrt2 + log(log2 T + 2) + 3
//             Q <  1: 2 sqrt2 d log T + log T / sqrt2 + sqrt(2 d log T)
//                     + log(log2 T + 2) + 4
// ConfigError for d < 2, T < 1, negative stat or (avg) an invalid eta.
double bound_value(AlgoKind kind, std::size_t d, std::size_t T, double stat,
                   double eta = kMaxAverageEta);

struct RoundRecord {
  std::size_t t = 0;
  double loss = 0.0;
  double cumulative_loss = 0.0;
  std::optional<double> eta;
  double statistic = 0.0;  // the learner's running statistic after round t
};

struct RegretTrace {
  std::vector<double> losses;
  std::vector<Portfolio> portfolios;
  double cumulative_loss = 0.0;
  double comparator_loss = 0.0;  // L(x_hat) of the certified best CRP
  double regret = 0.0;           // cumulative_loss - comparator_loss
  Portfolio comparator = Portfolio::uniform(1);
  double comparator_gap = 0.0;
  // Some asset has a zero relative, so the comparator is restricted to the
  // part of the simplex where every loss is finite.
  bool domain_trimmed = false;
};

struct AggregateDetails {
  std::size_t expert_count = 0;
  std::vector<double> expert_etas;
  std::vector<double> expert_losses;  // sum_t f_t(x_t^(k))
  std::vector<double> expert_q;       // Q_T on each expert's own iterates
  double log_wealth = 0.0;            // sum_t log <a_t, x_t>
  double mean_expert_log_wealth = 0.0;
};

struct RunOptions {
  LearnerOptions learner;
  CrpOptions crp;
};

struct ScoredRun {
  AlgoKind kind = AlgoKind::kGradualVariation;
  std::size_t d = 0;
  std::size_t T = 0;
  RegretTrace trace;
  std::vector<RoundRecord> rounds;
  DataStatistics stats;
  std::string statistic_name;  // "V_T", "L_star" or "Q_T"
  double statistic = 0.0;      // the value fed to bound_value
  double bound = 0.0;
  // regret + comparator_gap <= bound: sound even though x_hat is inexact.
  bool compliant = false;
  std::map<std::size_t, std::size_t> newton_histogram;
  std::optional<AggregateDetails> aggregate;
};

// Drive a fresh learner over the whole history and score it. For aa the
// learner horizon defaults to the history length.
ScoredRun run_and_score(AlgoKind kind, const MarketHistory& history,
                        const RunOptions& options = {});

}  // namespace ops_ftrl
