#include "ops_ftrl/simplex.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "ops_ftrl/errors.hpp"

namespace ops_ftrl {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* where) {
  if (a != b) {
    std::ostringstream msg;
    msg << where << ": dimension mismatch (" << a << " vs " << b << ")";
    throw InputError(msg.str());
  }
}

double checked_wealth_ratio(const PriceVector& a, std::span<const double> x,
                            const char* where) {
  require_same_size(a.size(), x.size(), where);
  const double r = dot(a.entries(), x);
  if (!(r > 0.0)) {
    std::ostringstream msg;
    msg << where << ": <a, x> = " << r << " is not positive; x is outside dom f";
    throw DomainError(msg.str());
  }
  return r;
}

}  // namespace

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

PriceVector normalize_market(std::span<const double> raw) {
  if (raw.empty()) throw InputError("normalize_market: empty price vector");
  double max_entry = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = raw[i];
    if (!std::isfinite(v) || v < 0.0) {
      std::ostringstream msg;
      msg << "normalize_market: entry " << i << " = " << v
          << " is negative or not finite";
      throw InputError(msg.str());
    }
    if (v > max_entry) max_entry = v;
  }
  if (max_entry == 0.0) {
    throw InputError("normalize_market: all-zero price vector (entries 0.." +
                     std::to_string(raw.size() - 1) + " are zero)");
  }
  Vector out(raw.begin(), raw.end());
  // Division by the max maps the max entry to exactly 1 and is idempotent.
  for (double& v : out) v /= max_entry;
  return PriceVector(std::move(out));
}

Portfolio Portfolio::uniform(std::size_t d) {
  if (d == 0) throw InputError("Portfolio::uniform: d must be positive");
  return Portfolio(Vector(d, 1.0 / static_cast<double>(d)));
}

Portfolio Portfolio::from_weights(Vector weights, double tol) {
  if (weights.empty()) throw InputError("Portfolio: empty weight vector");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!std::isfinite(weights[i]) || weights[i] < 0.0) {
      std::ostringstream msg;
      msg << "Portfolio: weight " << i << " = " << weights[i]
          << " is negative or not finite";
      throw InputError(msg.str());
    }
  }
  const double total = compensated_sum(weights);
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "Portfolio: weights sum to " << total << ", not 1 within " << tol;
    throw InputError(msg.str());
  }
  return Portfolio(std::move(weights));
}

bool Portfolio::strictly_positive() const noexcept {
  for (double w : weights_) {
    if (!(w > 0.0)) return false;
  }
  return true;
}

double wealth_ratio(const PriceVector& a, std::span<const double> x) {
  require_same_size(a.size(), x.size(), "wealth_ratio");
  return dot(a.entries(), x);
}

double loss(const PriceVector& a, std::span<const double> x) {
  return -std::log(checked_wealth_ratio(a, x, "loss"));
}

double loss(const PriceVector& a, const Portfolio& x) {
  return loss(a, x.weights());
}

GradientVector gradient(const PriceVector& a, std::span<const double> x) {
  const double r = checked_wealth_ratio(a, x, "gradient");
  GradientVector g(a.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = -a[i] / r;
  return g;
}

GradientVector gradient(const PriceVector& a, const Portfolio& x) {
  return gradient(a, x.weights());
}

double dual_local_norm(std::span<const double> v, std::span<const double> x) {
  require_same_size(v.size(), x.size(), "dual_local_norm");
  CompensatedSum s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double w = v[i] * x[i];
    s.add(w * w);
  }
  return std::sqrt(s.value());
}

double dual_local_norm(std::span<const double> v, const Portfolio& x) {
  return dual_local_norm(v, x.weights());
}

double local_norm(std::span<const double> u, std::span<const double> x) {
  require_same_size(u.size(), x.size(), "local_norm");
  CompensatedSum s;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw DomainError("local_norm: x(" + std::to_string(i) +
                        ") is not strictly positive");
    }
    const double w = u[i] / x[i];
    s.add(w * w);
  }
  return std::sqrt(s.value());
}

double local_norm(std::span<const double> u, const Portfolio& x) {
  return local_norm(u, x.weights());
}

Vector multiplicative_gradient(const PriceVector& a, std::span<const double> x) {
  const double r = checked_wealth_ratio(a, x, "multiplicative_gradient");
  Vector m(a.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = -(a[i] * x[i]) / r;
  return m;
}

Vector multiplicative_gradient(const PriceVector& a, const Portfolio& x) {
  return multiplicative_gradient(a, x.weights());
}

}  // namespace ops_ftrl
