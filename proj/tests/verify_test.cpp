#include <cmath>

#include <gtest/gtest.h>

#include "ops_ftrl/errors.hpp"
#include "ops_ftrl/verify.hpp"

namespace ops_ftrl::verify {
namespace {

TEST(RunCheck, ReportsLowestFailingTrial) {
  const auto outcome = run_check("odd_trials_fail", 64, 1, 8,
                                 [](std::mt19937_64&, std::size_t trial) {
                                   TrialResult r;
                                   r.margin = static_cast<double>(trial);
                                   r.ok = trial < 37;
                                   if (!r.ok) r.detail = "margin " + std::to_string(trial);
                                   return r;
                                 });
  EXPECT_EQ(outcome.failures, 27u);
  EXPECT_EQ(outcome.first_counterexample, "trial 37: margin 37");
  EXPECT_EQ(outcome.worst_margin, 63.0);
  EXPECT_FALSE(outcome.passed());
}

TEST(RunCheck, StreamsIndependentOfThreadCount) {
  auto draw = [](std::mt19937_64& rng, std::size_t) {
    TrialResult r;
    r.margin = static_cast<double>(rng() >> 11);
    return r;
  };
  const auto one = run_check("draws", 200, 9, 1, draw);
  const auto many = run_check("draws", 200, 9, 7, draw);
  EXPECT_EQ(one.worst_margin, many.worst_margin);
}

TEST(BisectionLambda, MatchesQuadratic) {
  const StepProblem prob{1.0, {0, -0.5}, {0, 0}};
  EXPECT_NEAR(bisection_lambda(prob), (2.5 + std::sqrt(4.25)) / 2, 1e-12);
}

TEST(Suites, SmallRunsPassAndAreReproducible) {
  for (const char* name : {"lemmas", "solver", "bounds"}) {
    const std::size_t trials = std::string(name) == "bounds" ? 3 : 50;
    const auto a = run_suite(name, trials, 5, 4);
    const auto b = run_suite(name, trials, 5, 2);
    EXPECT_TRUE(a.passed()) << name;
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
      EXPECT_TRUE(a.checks[i].passed()) << name << "/" << a.checks[i].name << ": "
                                        << a.checks[i].first_counterexample;
      EXPECT_EQ(a.checks[i].worst_margin, b.checks[i].worst_margin);
    }
  }
  EXPECT_THROW(run_suite("theorems", 1, 0, 1), ConfigError);
}

TEST(RandomInstances, AreValid) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 100; ++i) {
    const auto x = random_simplex_interior(rng, 5);
    double s = 0;
    for (double v : x) {
      EXPECT_GT(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
    EXPECT_NO_THROW(normalize_market(random_price_relatives(rng, 4)));
    EXPECT_NO_THROW(validate(random_step_problem(rng, 3)));
  }
}

}  // namespace
}  // namespace ops_ftrl::verify
