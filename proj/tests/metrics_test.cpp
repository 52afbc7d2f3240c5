#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ops_ftrl/errors.hpp"
#include "ops_ftrl/metrics.hpp"

namespace ops_ftrl {
namespace {

MarketHistory rows(std::vector<std::vector<double>> raw) {
  std::vector<PriceVector> out;
  for (const auto& r : raw) out.push_back(normalize_market(r));
  return MarketHistory(std::move(out));
}

// Golden-section minimization of L(w, 1 - w) over w in [0, 1].
double golden_two_asset(const MarketHistory& h, double* w_star) {
  auto L = [&](double w) {
    double s = 0;
    for (const auto& a : h.rounds()) s -= std::log(a[0] * w + a[1] * (1 - w));
    return s;
  };
  double lo = 1e-15, hi = 1 - 1e-15;
  const double r = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 200; ++it) {
    const double m1 = hi - r * (hi - lo), m2 = lo + r * (hi - lo);
    if (L(m1) < L(m2)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  *w_star = 0.5 * (lo + hi);
  return L(*w_star);
}

TEST(BestCrp, Examples) {
  auto h = rows({{1, 0}, {0, 1}});
  auto best = best_crp(h);
  double w = 0;
  const double oracle = golden_two_asset(h, &w);
  EXPECT_NEAR(oracle, 2 * std::log(2.0), 1e-12);
  EXPECT_NEAR(best.l_star, oracle, 1e-6);
  EXPECT_NEAR(best.x_star[0], 0.5, 1e-3);

  h = rows({{1, 0.3, 0.5}, {1, 0.9, 0.2}, {1, 0.1, 0.1}});
  best = best_crp(h);
  EXPECT_NEAR(best.l_star, 0.0, 1e-12);
  EXPECT_NEAR(best.x_star[0], 1.0, 1e-9);

  h = rows({{1, 1, 1}, {1, 1, 1}});
  EXPECT_NEAR(best_crp(h).l_star, 0.0, 1e-15);
}

TEST(BestCrp, AgreesWithGoldenSectionOnRandomMarkets) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = generate({MarketKind::kIidUniform, 2, 40 + 10 * seed, seed});
    const auto best = best_crp(h);
    double w = 0;
    const double oracle = golden_two_asset(h, &w);
    EXPECT_LE(best.l_star - oracle, best.gap + 1e-9);
    EXPECT_GE(best.l_star - oracle, -1e-9);
  }
}

TEST(BestCrp, GapCertificateIsConservative) {
  const auto h = generate({MarketKind::kIidUniform, 5, 300, 17});
  const auto coarse = best_crp(h, {1e-4, 200000});
  const auto fine = best_crp(h, {1e-5, 200000});
  EXPECT_LE(coarse.gap, 1e-4 * 300);
  EXPECT_LE(std::abs(coarse.l_star - fine.l_star), coarse.gap + 1e-12);
  EXPECT_LE(fine.l_star, coarse.l_star + 1e-12);
}

// Full-support optimum where the pairwise step is a few ulps of the line
// search bracket; used to stall at gamma = 0.
TEST(BestCrp, ConvergesWhenPairwiseStepIsTiny) {
  const auto h = generate({MarketKind::kIidUniform, 6, 390, 14123905122326915450ull});
  const auto best = best_crp(h, {1e-12, 200000});
  EXPECT_LE(best.gap, 1e-12 * 390);
  const auto coarse = best_crp(h, {1e-4, 200000});
  EXPECT_LE(best.l_star, coarse.l_star);
  EXPECT_GE(best.l_star, coarse.l_star - coarse.gap);
}

TEST(BestCrp, ReportsNonConvergence) {
  const auto h = generate({MarketKind::kIidUniform, 6, 200, 1});
  EXPECT_THROW(best_crp(h, {1e-12, 2}), SolverError);
}

TEST(Statistics, ConstantMarketHasNoVariation) {
  const auto h = generate({MarketKind::kConstant, 3, 20, 0});
  std::vector<Portfolio> xs(20, Portfolio::uniform(3));
  EXPECT_EQ(gradual_variation(h, xs), 0.0);
  EXPECT_NEAR(second_order_statistic(h, xs), 0.0, 1e-28);
}

TEST(Statistics, SecondOrderIsMinimumOverProbes) {
  const auto h = generate({MarketKind::kIidUniform, 3, 60, 4});
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<Portfolio> xs;
  for (std::size_t t = 0; t < h.horizon(); ++t) {
    std::vector<double> w(3);
    double s = 0;
    for (double& v : w) s += (v = u(rng));
    for (double& v : w) v /= s;
    xs.push_back(Portfolio::from_weights(w));
  }
  const double q = second_order_statistic(h, xs);
  std::uniform_real_distribution<double> probe(-1.0, 0.0);
  for (int k = 0; k < 1000; ++k) {
    const std::vector<double> p{probe(rng), probe(rng), probe(rng)};
    double s = 0;
    for (std::size_t t = 0; t < h.horizon(); ++t) {
      const auto m = multiplicative_gradient(h[t], xs[t]);
      for (std::size_t i = 0; i < 3; ++i) s += std::pow(m[i] - p[i], 2);
    }
    EXPECT_LE(q, s + 1e-10);
  }
}

TEST(Statistics, LengthMismatchThrows) {
  const auto h = generate({MarketKind::kConstant, 2, 5, 0});
  EXPECT_THROW(gradual_variation(h, {Portfolio::uniform(2)}), InputError);
}

TEST(BoundValue, Examples) {
  const double lt = std::log(1000.0);
  const double gv = (lt + 8) * std::sqrt(2048.0) + 2 * lt + 2 - 256;
  EXPECT_NEAR(bound_value(AlgoKind::kGradualVariation, 2, 1000, 0.0), gv, 1e-10);
  EXPECT_NEAR(gv, 434.46, 5e-3);

  const double sl = 2 * (lt + 2) * std::sqrt(18.0) + 2 * (lt + 2) * (lt + 2);
  EXPECT_NEAR(bound_value(AlgoKind::kSmallLoss, 2, 1000, 0.0), sl, 1e-10);
  EXPECT_NEAR(sl, 234.28, 5e-3);

  const double eta = 0.25;
  EXPECT_NEAR(bound_value(AlgoKind::kAverageOptimism, 3, 100, 7.0, eta),
              3 * std::log(100.0) / eta + 2 * eta * (std::log(100.0) + 1) + 2 + eta * 7,
              1e-10);

  const double l = std::log(500.0), tail = std::log(std::log2(500.0) + 2);
  const double s2 = std::numbers::sqrt2;
  EXPECT_NEAR(bound_value(AlgoKind::kAggregating, 4, 500, 0.5),
              2 * s2 * 4 * l + l / s2 + std::sqrt(8 * l) + tail + 4, 1e-10);
  EXPECT_NEAR(bound_value(AlgoKind::kAggregating, 4, 500, 9.0),
              (1 + s2) * std::sqrt(36 * l) + 2 * s2 * 4 * l + l / s2 + tail + 3, 1e-10);
}

TEST(BoundValue, RejectsBadArguments) {
  EXPECT_THROW(bound_value(AlgoKind::kGradualVariation, 1, 10, 0), ConfigError);
  EXPECT_THROW(bound_value(AlgoKind::kGradualVariation, 2, 0, 0), ConfigError);
  EXPECT_THROW(bound_value(AlgoKind::kSmallLoss, 2, 10, -1), ConfigError);
  EXPECT_THROW(bound_value(AlgoKind::kAverageOptimism, 2, 10, 0, 0.5), ConfigError);
}

TEST(RunAndScore, RegretMatchesTrace) {
  const auto h = generate({MarketKind::kIidUniform, 3, 200, 9});
  const auto run = run_and_score(AlgoKind::kSmallLoss, h);
  double total = 0;
  for (std::size_t t = 0; t < h.horizon(); ++t) {
    const double f = loss(h[t], run.trace.portfolios[t]);
    EXPECT_EQ(f, run.trace.losses[t]);
    total += f;
  }
  EXPECT_NEAR(run.trace.cumulative_loss, total, 1e-10);
  EXPECT_NEAR(run.trace.regret, total - best_crp(h).l_star, 1e-9);
  EXPECT_EQ(run.rounds.back().cumulative_loss, run.trace.cumulative_loss);
  EXPECT_EQ(run.statistic_name, "L_star");
  EXPECT_TRUE(run.compliant);
  std::size_t solves = 0;
  for (const auto& [iters, count] : run.newton_histogram) solves += count;
  EXPECT_EQ(solves, h.horizon());
}

TEST(RunAndScore, SingleRoundDegradesGracefully) {
  const auto h = rows({{1, 0.5, 0.2}});
  for (auto kind : {AlgoKind::kGradualVariation, AlgoKind::kSmallLoss,
                    AlgoKind::kAverageOptimism, AlgoKind::kAggregating}) {
    const auto run = run_and_score(kind, h);
    EXPECT_GE(run.trace.regret, 0.0);
    EXPECT_NEAR(run.trace.regret, loss(h[0], Portfolio::uniform(3)), 1e-9);
    EXPECT_TRUE(run.compliant);
  }
}

TEST(RunAndScore, FlagsZeroRelatives) {
  const auto h = rows({{1, 0}, {0.5, 1}, {1, 0.7}});
  const auto run = run_and_score(AlgoKind::kGradualVariation, h);
  EXPECT_TRUE(run.trace.domain_trimmed);
  EXPECT_TRUE(run.compliant);
}

TEST(RunAndScore, AggregateDetails) {
  const auto h = generate({MarketKind::kIidUniform, 3, 128, 2});
  const auto run = run_and_score(AlgoKind::kAggregating, h);
  ASSERT_TRUE(run.aggregate.has_value());
  EXPECT_EQ(run.aggregate->expert_count, 8u);
  EXPECT_NEAR(run.aggregate->log_wealth, -run.trace.cumulative_loss, 1e-9);
  const double best = *std::min_element(run.aggregate->expert_losses.begin(),
                                        run.aggregate->expert_losses.end());
  EXPECT_LE(run.trace.cumulative_loss, best + std::log(8.0) + 1e-6);
}

}  // namespace
}  // namespace ops_ftrl
