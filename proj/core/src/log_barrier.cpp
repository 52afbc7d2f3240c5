#include "ops_ftrl/log_barrier.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ops_ftrl/errors.hpp"

namespace ops_ftrl {

BarrierEval barrier(std::span<const double> x) {
  const std::size_t d = x.size();
  if (d == 0) throw InputError("barrier: empty point");
  BarrierEval out;
  out.grad.resize(d);
  out.hess_diag.resize(d);
  CompensatedSum value;
  value.add(-static_cast<double>(d) * std::log(static_cast<double>(d)));
  for (std::size_t i = 0; i < d; ++i) {
    if (!(x[i] > 0.0)) {
      std::ostringstream msg;
      msg << "barrier: x(" << i << ") = " << x[i] << " is not strictly positive";
      throw DomainError(msg.str());
    }
    value.add(-std::log(x[i]));
    const double inv = 1.0 / x[i];
    out.grad[i] = -inv;
    out.hess_diag[i] = inv * inv;
  }
  out.value = value.value();
  return out;
}

OmegaPair omega_pair(double t) {
  if (!(t >= 0.0)) {
    throw DomainError("omega_pair: t = " + std::to_string(t) + " is negative");
  }
  OmegaPair out;
  // log1p keeps both values accurate (and nonnegative) for small t.
  out.omega = t - std::log1p(t);
  out.omega_star = t < 1.0 ? -t - std::log1p(-t)
                           : std::numeric_limits<double>::infinity();
  return out;
}

double alpha_shift(std::span<const double> v, std::span<const double> x) {
  if (v.size() != x.size()) {
    throw InputError("alpha_shift: dimension mismatch");
  }
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw DomainError("alpha_shift: x(" + std::to_string(i) +
                        ") is not strictly positive");
    }
    const double w = x[i] * x[i];
    num.add(w * v[i]);
    den.add(w);
  }
  return -num.value() / den.value();
}

}  // namespace ops_ftrl
