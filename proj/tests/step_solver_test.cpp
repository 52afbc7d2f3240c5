#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ops_ftrl/errors.hpp"
#include "ops_ftrl/step_solver.hpp"

namespace ops_ftrl {
namespace {

// Largest root of (l + a)(l + b) - w1 (l + b) - w2 (l + a) = 0, i.e. the
// stationary point of psi for d = 2 with a = eta G(0), b = eta G(1) and
// w_i = 1 - eta p_i.
double quadratic_lambda(double a, double b, double w1, double w2) {
  const double B = a + b - w1 - w2;
  const double C = a * b - w1 * b - w2 * a;
  return (-B + std::sqrt(B * B - 4 * C)) / 2;
}

// Bisection on psi' in long double over the domain of psi.
double long_double_lambda(const StepProblem& p) {
  auto dpsi = [&](long double l) {
    long double s = 1;
    for (std::size_t i = 0; i < p.dimension(); ++i) {
      s -= (1.0L - (long double)p.eta * p.hint[i]) / (l + (long double)p.eta * p.g_cum[i]);
    }
    return s;
  };
  long double lo = -(long double)p.eta * *std::min_element(p.g_cum.begin(), p.g_cum.end());
  long double hi = lo + 1;
  while (dpsi(hi) < 0) hi = lo + 2 * (hi - lo);
  for (int it = 0; it < 400 && hi - lo > 0; ++it) {
    const long double mid = lo + (hi - lo) / 2;
    if (mid == lo || mid == hi) break;
    if (dpsi(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>((lo + hi) / 2);
}

StepProblem make(double eta, Vector g, Vector hint) {
  return StepProblem{eta, std::move(g), std::move(hint)};
}

TEST(PsiEval, Examples) {
  auto e = psi_eval(2.0, make(0.1, {0, 0}, {0, 0}));
  EXPECT_NEAR(e.first, 0.0, 1e-15);
  EXPECT_NEAR(e.second, 0.5, 1e-15);

  e = psi_eval(1.0, make(1.0, {0, -0.5}, {0, 0}));
  EXPECT_NEAR(e.first, -2.0, 1e-15);

  e = psi_eval(1e12, make(0.3, {0.2, -1.0, 4.0}, {-0.5, -0.5, 0}));
  EXPECT_NEAR(e.first, 1.0, 1e-10);
}

TEST(PsiEval, OutsideDomainNamesIndex) {
  try {
    psi_eval(0.4, make(1.0, {0, -0.5}, {0, 0}));
    FAIL();
  } catch (const DomainError& err) {
    EXPECT_NE(std::string(err.what()).find("g(1)"), std::string::npos) << err.what();
  }
}

TEST(Validate, RejectsBadProblems) {
  EXPECT_THROW(validate(make(0.0, {0, 0}, {0, 0})), InputError);
  EXPECT_THROW(validate(make(1.0, {0, 0}, {0})), InputError);
  EXPECT_THROW(validate(make(1.0, {0, 0}, {0.1, 0})), InputError);
  EXPECT_THROW(validate(make(1.0, {0, 0}, {-1.5, 0})), InputError);
  EXPECT_THROW(validate(make(1.0, {NAN, 0}, {0, 0})), InputError);
  EXPECT_NO_THROW(validate(make(1.0, {0, 0}, {-1.0, 0})));
}

TEST(SolveLambda, Examples) {
  auto s = solve_lambda(make(1.0, {0, 0}, {0, 0}));
  EXPECT_NEAR(s.lambda_star, 2.0, 1e-14);

  NewtonTrace trace;
  s = solve_lambda(make(1.0, {0, -0.5}, {0, 0}), &trace);
  const double oracle = quadratic_lambda(0.0, -0.5, 1.0, 1.0);
  EXPECT_NEAR(oracle, (2.5 + std::sqrt(4.25)) / 2, 1e-15);
  EXPECT_NEAR(s.lambda_star, oracle, 1e-11);
  EXPECT_NEAR(s.lambda_star, 2.2807764, 1e-7);
  EXPECT_EQ(trace.lambdas.front(), 1.5);

  for (std::size_t d : {3u, 7u, 100u}) {
    EXPECT_NEAR(solve_lambda(make(0.5, Vector(d, 0.0), Vector(d, 0.0))).lambda_star,
                static_cast<double>(d), 1e-12 * d);
  }
}

TEST(SolveLambda, StartsAtDominantIndex) {
  NewtonTrace trace;
  solve_lambda(make(1.0, {0, 0}, {0, 0}), &trace);
  EXPECT_EQ(trace.lambdas.front(), 1.0);

  EXPECT_EQ(dominant_index(std::vector<double>{3, -1, -1, 2}), 1u);
  EXPECT_EQ(dominant_index(std::vector<double>{0.5}), 0u);
}

TEST(SolveLambda, MatchesQuadraticOracle) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> g(-20.0, 20.0), h(0.0, 1.0), e(0.01, 2.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double eta = e(rng);
    const Vector G{g(rng), g(rng)};
    const Vector p{-h(rng) / eta, -h(rng) / eta};
    const auto prob = make(eta, G, p);
    const double expected =
        quadratic_lambda(eta * G[0], eta * G[1], 1 - eta * p[0], 1 - eta * p[1]);
    EXPECT_NEAR(solve_lambda(prob).lambda_star, expected, 1e-10 * std::abs(expected));
  }
}

TEST(SolveLambda, MonotoneIteratesAndBudget) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> g(-50.0, 50.0), h(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = 2 + trial % 40;
    StepProblem prob{0.7, Vector(d), Vector(d)};
    for (std::size_t i = 0; i < d; ++i) {
      prob.g_cum[i] = g(rng);
      prob.hint[i] = -h(rng) / prob.eta;
    }
    NewtonTrace trace;
    const auto sol = solve_lambda(prob, &trace);
    EXPECT_LE(sol.newton_iters, 40u);
    for (std::size_t k = 0; k < trace.lambdas.size(); ++k) {
      EXPECT_LE(trace.derivatives[k], 1e-12);
      if (k > 0) EXPECT_GE(trace.lambdas[k], trace.lambdas[k - 1]);
    }
    EXPECT_NEAR(sol.lambda_star, long_double_lambda(prob),
                1e-9 * std::abs(sol.lambda_star));
  }
}

TEST(FtrlStep, Examples) {
  auto s = ftrl_step(make(0.1, {0, 0}, {0, 0}));
  EXPECT_NEAR(s.x_next[0], 0.5, 1e-15);
  EXPECT_NEAR(s.x_next[1], 0.5, 1e-15);
  EXPECT_EQ(s.g_hat[0], 0.0);
  EXPECT_EQ(s.g_hat[1], 0.0);

  s = ftrl_step(make(1.0, {0, -0.5}, {0, 0}));
  const double l = quadratic_lambda(0.0, -0.5, 1.0, 1.0);
  EXPECT_NEAR(s.x_next[0], 1.0 / l, 1e-11);
  EXPECT_NEAR(s.x_next[1], 1.0 / (l - 0.5), 1e-11);
  EXPECT_NEAR(s.x_next[0], 0.438447, 1e-6);
  EXPECT_NEAR(s.x_next[1], 0.561553, 1e-6);

  s = ftrl_step(make(0.5, {0, 0}, {-0.5, -0.5}));
  EXPECT_NEAR(s.x_next[0], 0.5, 1e-12);
  EXPECT_NEAR(s.x_next[1], 0.5, 1e-12);
  EXPECT_NEAR(s.g_hat[0], -1.0, 1e-11);
  EXPECT_NEAR(s.g_hat[1], -1.0, 1e-11);
}

TEST(FtrlStep, SatisfiesOptimalityConditions) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> g(-30.0, 30.0), h(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t d = 2 + trial % 5;
    StepProblem prob{0.25, Vector(d), Vector(d)};
    for (std::size_t i = 0; i < d; ++i) {
      prob.g_cum[i] = g(rng);
      prob.hint[i] = -h(rng) / prob.eta;
    }
    const auto s = ftrl_step(prob);
    double sum = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const double x = s.x_next[i];
      sum += x;
      EXPECT_GT(x, 0.0);
      EXPECT_NEAR(x * s.g_hat[i], prob.hint[i], 1e-12 * std::max(1.0, std::abs(prob.hint[i])));
      // Stationarity of eta (G + g_hat) - 1/x + lambda e over the simplex.
      const double kkt = prob.eta * (prob.g_cum[i] + s.g_hat[i]) - 1.0 / x + s.lambda_star;
      EXPECT_NEAR(kkt, 0.0, 1e-8 * std::max(1.0, 1.0 / x));
    }
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

TEST(FtrlStep, LargeDimensionStaysWithinBudget) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> g(-100.0, 100.0), h(0.0, 1.0);
  for (std::size_t d : {10u, 1000u, 10000u}) {
    StepProblem prob{0.05, Vector(d), Vector(d)};
    for (std::size_t i = 0; i < d; ++i) {
      prob.g_cum[i] = g(rng);
      prob.hint[i] = -h(rng) / prob.eta;
    }
    const auto s = ftrl_step(prob);
    EXPECT_LE(s.newton_iters, 40u) << d;
    double sum = 0;
    for (double w : s.x_next.weights()) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-10);
  }
}

}  // namespace
}  // namespace ops_ftrl
