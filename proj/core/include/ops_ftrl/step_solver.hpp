#pragma once

// One step of log-barrier optimistic FTRL on the simplex.
//
// Given a learning rate eta, the cumulative gradient G and a hint p (an
// estimate of the next multiplicative gradient), find x in the simplex and
// g_hat with
//
//   x (.) g_hat = p,
//   x in argmin_{x in simplex} <G + g_hat, x> + h(x) / eta.
//
// The pair is x(i) = (1 - eta p(i)) / (lambda* + eta G(i)) where lambda* is
// the unique minimizer of the one-dimensional self-concordant function
//
//   psi(lambda) = lambda - sum_i (1 - eta p(i)) log(lambda + eta G(i)).
//
// lambda* is found by plain Newton started at the left edge of dom psi plus
// one. psi' is increasing and concave, so every iterate stays below lambda*
// and the sequence increases monotonically.

#include <cstddef>
#include <span>
#include <vector>

#include "ops_ftrl/simplex.hpp"

namespace ops_ftrl {

struct StepProblem {
  double eta = 0.0;
  Vector g_cum;
  Vector hint;

  std::size_t dimension() const noexcept { return g_cum.size(); }
};

// Throws InputError unless eta > 0, all entries are finite, sizes agree and
// eta * hint lies in [-1, 0]^d.
void validate(const StepProblem& prob);

struct PsiEval {
  double value = 0.0;
  double first = 0.0;   // psi'
  double second = 0.0;  // psi'' > 0
};

// DomainError naming the first index with lambda + eta G(i) <= 0.
PsiEval psi_eval(double lambda, const StepProblem& prob);

struct LambdaSolution {
  double lambda_star = 0.0;
  std::size_t newton_iters = 0;
  double decrement = 0.0;  // |psi'| / sqrt(psi'') at lambda_star
};

// Optional per-iterate record, used by the verification suites.
struct NewtonTrace {
  std::vector<double> lambdas;
  std::vector<double> derivatives;  // psi' at each lambda
};

inline constexpr std::size_t kMaxNewtonIterations = 200;
inline constexpr double kDecrementTolerance = 1e-10;
inline constexpr double kDerivativeTolerance = 1e-12;

// Index whose term bounds dom psi from the left: argmin_i G(i), smallest
// index on ties.
std::size_t dominant_index(std::span<const double> g_cum);

// SolverError after kMaxNewtonIterations without meeting both stopping rules.
LambdaSolution solve_lambda(const StepProblem& prob,
                            NewtonTrace* trace = nullptr);

struct StepSolution {
  double lambda_star = 0.0;
  Portfolio x_next = Portfolio::uniform(1);
  Vector g_hat;
  std::size_t newton_iters = 0;
  double decrement = 0.0;
};

StepSolution ftrl_step(const StepProblem& prob, NewtonTrace* trace = nullptr);

}  // namespace ops_ftrl
