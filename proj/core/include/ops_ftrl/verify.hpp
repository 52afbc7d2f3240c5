#pragma once

// Randomized property suites behind `ops_ftrl verify`.
//
//   lemmas  local-norm and smoothness inequalities of the log-loss, the
//           alpha-shift minimizer property, omega sandwich bounds and
//           finite-difference checks of the barrier calculus
//   solver  implicit FTRL steps against an independent bisection oracle
//   bounds  regret-bound compliance of every algorithm on random markets
//
// Each trial draws from its own std::mt19937_64 stream derived from
// (seed, check, trial), so results do not depend on the thread count.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ops_ftrl/simplex.hpp"
#include "ops_ftrl/step_solver.hpp"

namespace ops_ftrl::verify {

struct TrialResult {
  bool ok = true;
  // lhs - rhs of the inequality under test; <= 0 when it holds exactly.
  double margin = 0.0;
  std::string detail;  // counterexample description, filled on failure
};

struct CheckOutcome {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_margin = -1e300;
  std::string first_counterexample;

  bool passed() const noexcept { return failures == 0; }
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<CheckOutcome> checks;

  bool passed() const noexcept;
};

using TrialFn = std::function<TrialResult(std::mt19937_64& rng, std::size_t trial)>;

// Runs fn for trials 0..trials-1 on up to `threads` threads. The reported
// counterexample is the failing trial with the smallest index.
CheckOutcome run_check(const std::string& name, std::size_t trials,
                       std::uint64_t seed, std::size_t threads, const TrialFn& fn);

// Thread cap from OPS_FTRL_THREADS, else hardware concurrency (at least 1).
std::size_t threads_from_env();

SuiteReport verify_lemmas(std::size_t trials, std::uint64_t seed, std::size_t threads);
SuiteReport verify_solver(std::size_t trials, std::uint64_t seed, std::size_t threads);
SuiteReport verify_bounds(std::size_t trials, std::uint64_t seed, std::size_t threads);

// ConfigError on unknown suite names.
SuiteReport run_suite(const std::string& suite, std::size_t trials,
                      std::uint64_t seed, std::size_t threads);

// Random instances shared with the test suites.
Vector random_simplex_interior(std::mt19937_64& rng, std::size_t d);
Vector random_price_relatives(std::mt19937_64& rng, std::size_t d);
StepProblem random_step_problem(std::mt19937_64& rng, std::size_t d);

// lambda* by bisection on psi' over [l0, l0 + 4d], widened until psi'
// changes sign; l0 = 1 - eta * min_i G(i). Independent of the Newton path.
double bisection_lambda(const StepProblem& prob);

}  // namespace ops_ftrl::verify
