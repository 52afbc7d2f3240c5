#pragma once

#include <span>
#include <utility>

#include "ops_ftrl/simplex.hpp"

namespace ops_ftrl {

// h(x) = -d log d - sum_i log x(i), together with its gradient and the
// diagonal of its Hessian. The -d log d offset makes h vanish at the uniform
// portfolio, which is its minimizer over the simplex.
struct BarrierEval {
  double value = 0.0;
  Vector grad;       // -1 / x(i)
  Vector hess_diag;  // 1 / x(i)^2
};

// DomainError if any x(i) <= 0.
BarrierEval barrier(std::span<const double> x);
inline BarrierEval barrier(const Portfolio& x) { return barrier(x.weights()); }

// omega(t) = t - log(1 + t) and its conjugate omega_*(t) = -t - log(1 - t).
// omega_* is +inf for t >= 1. DomainError for negative or NaN t.
struct OmegaPair {
  double omega = 0.0;
  double omega_star = 0.0;
};
OmegaPair omega_pair(double t);

// alpha_x(v) = -sum x(i)^2 v(i) / sum x(i)^2, the shift minimizing
// ||v + alpha e||_{x,*} over alpha.
double alpha_shift(std::span<const double> v, std::span<const double> x);
inline double alpha_shift(std::span<const double> v, const Portfolio& x) {
  return alpha_shift(v, x.weights());
}

}  // namespace ops_ftrl
