#include "ops_ftrl/step_solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <string>

#include "ops_ftrl/errors.hpp"

namespace ops_ftrl {

namespace {

// psi expressed in the shifted variable mu = lambda + min_i eta G(i), so the
// dominant term's denominator is mu itself and never suffers cancellation.
struct ShiftedProblem {
  double shift = 0.0;  // min_i eta G(i)
  Vector offset;       // eta G(i) - shift >= 0
  Vector weight;       // 1 - eta p(i) in [1, 2]
};

ShiftedProblem make_shifted(const StepProblem& prob) {
  const std::size_t d = prob.dimension();
  ShiftedProblem s;
  s.offset.resize(d);
  s.weight.resize(d);
  const std::size_t i_star = dominant_index(prob.g_cum);
  s.shift = prob.eta * prob.g_cum[i_star];
  for (std::size_t i = 0; i < d; ++i) {
    s.offset[i] = prob.eta * prob.g_cum[i] - s.shift;
    s.weight[i] = 1.0 - prob.eta * prob.hint[i];
  }
  return s;
}

struct Derivatives {
  double first = 0.0;
  double second = 0.0;
};

Derivatives shifted_derivatives(const ShiftedProblem& s, double mu) {
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::size_t i = 0; i < s.offset.size(); ++i) {
    const double inv = 1.0 / (mu + s.offset[i]);
    const double term = s.weight[i] * inv;
    s1.add(term);
    s2.add(term * inv);
  }
  return {1.0 - s1.value(), s2.value()};
}

bool converged(const Derivatives& der, double decrement) {
  return decrement <= kDecrementTolerance &&
         std::abs(der.first) <= kDerivativeTolerance * std::max(1.0, der.second);
}

}  // namespace

void validate(const StepProblem& prob) {
  const std::size_t d = prob.dimension();
  if (d == 0) throw InputError("StepProblem: empty cumulative gradient");
  if (prob.hint.size() != d) {
    throw InputError("StepProblem: hint has dimension " +
                     std::to_string(prob.hint.size()) + ", expected " +
                     std::to_string(d));
  }
  if (!std::isfinite(prob.eta) || !(prob.eta > 0.0)) {
    throw InputError("StepProblem: eta must be positive and finite");
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(prob.g_cum[i]) || !std::isfinite(prob.hint[i])) {
      throw InputError("StepProblem: entry " + std::to_string(i) +
                       " is not finite");
    }
    const double scaled = prob.eta * prob.hint[i];
    if (scaled > 0.0 || scaled < -1.0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "StepProblem: eta * hint(" << i << ") = " << scaled
          << " is outside [-1, 0]";
      throw InputError(msg.str());
    }
  }
}

std::size_t dominant_index(std::span<const double> g_cum) {
  if (g_cum.empty()) throw InputError("dominant_index: empty vector");
  return static_cast<std::size_t>(
      std::min_element(g_cum.begin(), g_cum.end()) - g_cum.begin());
}

PsiEval psi_eval(double lambda, const StepProblem& prob) {
  validate(prob);
  CompensatedSum logs;
  CompensatedSum s1;
  CompensatedSum s2;
  for (std::size_t i = 0; i < prob.dimension(); ++i) {
    const double denom = lambda + prob.eta * prob.g_cum[i];
    if (!(denom > 0.0)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "psi_eval: lambda = " << lambda << " is outside dom psi; lambda + "
          << "eta * g(" << i << ") = " << denom << " <= 0";
      throw DomainError(msg.str());
    }
    const double w = 1.0 - prob.eta * prob.hint[i];
    const double inv = 1.0 / denom;
    logs.add(w * std::log(denom));
    s1.add(w * inv);
    s2.add(w * inv * inv);
  }
  return {lambda - logs.value(), 1.0 - s1.value(), s2.value()};
}

namespace {

struct ShiftedSolution {
  double mu = 0.0;
  LambdaSolution lambda;
};

ShiftedSolution solve_shifted(const ShiftedProblem& s, NewtonTrace* trace) {

  // lambda_0 = 1 - eta G(i*) corresponds to mu_0 = 1.
  double mu = 1.0;
  std::size_t iters = 0;
  for (;;) {
    const Derivatives der = shifted_derivatives(s, mu);
    const double decrement = std::abs(der.first) / std::sqrt(der.second);
    if (trace != nullptr) {
      trace->lambdas.push_back(mu - s.shift);
      trace->derivatives.push_back(der.first);
    }
    // Newton from below: psi' never becomes positive beyond rounding.
    assert(der.first <= kDerivativeTolerance);

    if (converged(der, decrement)) {
      return {mu, {mu - s.shift, iters, decrement}};
    }
    const double next = mu - der.first / der.second;
    if (iters == kMaxNewtonIterations || next == mu) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "solve_lambda: no convergence after " << iters
          << " Newton iterations (lambda = " << mu - s.shift
          << ", decrement = " << decrement << ")";
      throw SolverError(msg.str(), mu - s.shift, decrement, iters);
    }
    assert(next >= mu);
    mu = next;
    ++iters;
  }
}

}  // namespace

LambdaSolution solve_lambda(const StepProblem& prob, NewtonTrace* trace) {
  validate(prob);
  return solve_shifted(make_shifted(prob), trace).lambda;
}

StepSolution ftrl_step(const StepProblem& prob, NewtonTrace* trace) {
  validate(prob);
  const ShiftedProblem s = make_shifted(prob);
  // x and g_hat come from mu itself: lambda* = mu - shift can lose digits
  // when the cumulative gradients are large.
  const ShiftedSolution shifted = solve_shifted(s, trace);
  const LambdaSolution& sol = shifted.lambda;
  const double mu = shifted.mu;
  const std::size_t d = prob.dimension();

  Vector x(d);
  Vector g_hat(d);
  for (std::size_t i = 0; i < d; ++i) {
    const double denom = mu + s.offset[i];
    x[i] = s.weight[i] / denom;
    // Exactly zero wherever the hint is zero.
    g_hat[i] = prob.hint[i] * (denom / s.weight[i]);
  }

  StepSolution out;
  out.lambda_star = sol.lambda_star;
  out.newton_iters = sol.newton_iters;
  out.decrement = sol.decrement;
  out.g_hat = std::move(g_hat);
  try {
    out.x_next = Portfolio::from_weights(std::move(x), 1e-10);
  } catch (const InputError& e) {
    throw SolverError(std::string("ftrl_step: iterate left the simplex: ") +
                          e.what(),
                      sol.lambda_star, sol.decrement, sol.newton_iters);
  }
  if (!out.x_next.strictly_positive()) {
    throw SolverError("ftrl_step: iterate has a zero weight", sol.lambda_star,
                      sol.decrement, sol.newton_iters);
  }
  return out;
}

}  // namespace ops_ftrl
