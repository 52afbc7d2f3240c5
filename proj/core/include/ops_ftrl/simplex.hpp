#pragma once

// Price relatives, portfolios and the log-loss of online portfolio selection.
//
// Every round the market reveals a vector a of nonnegative price relatives and
// the investor holding portfolio x suffers f(x) = -log<a, x>. The helpers here
// are the primitives every algorithm and every metric is built from.

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace ops_ftrl {

using Vector = std::vector<double>;
using GradientVector = std::vector<double>;

// Neumaier's variant of Kahan summation. Used for every running total that
// may accumulate over 10^6 rounds.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;
double dot(std::span<const double> a, std::span<const double> b);

// One round of price relatives, max-normalized so that max_i a(i) == 1.
class PriceVector {
 public:
  std::span<const double> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  double operator[](std::size_t i) const noexcept { return entries_[i]; }

  bool operator==(const PriceVector&) const = default;

 private:
  explicit PriceVector(Vector entries) : entries_(std::move(entries)) {}
  friend PriceVector normalize_market(std::span<const double> raw);

  Vector entries_;
};

// Scale a raw price-relative vector so its largest entry is exactly 1.
// Throws InputError naming the first offending index for negative or
// non-finite entries, and for the all-zero vector.
PriceVector normalize_market(std::span<const double> raw);

// A point of the probability simplex.
class Portfolio {
 public:
  static Portfolio uniform(std::size_t d);
  // Validates entries >= 0 and |sum - 1| <= tol. Never renormalizes.
  static Portfolio from_weights(Vector weights, double tol = 1e-10);

  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const noexcept { return weights_[i]; }
  bool strictly_positive() const noexcept;

  bool operator==(const Portfolio&) const = default;

 private:
  explicit Portfolio(Vector weights) : weights_(std::move(weights)) {}
  Vector weights_;
};

// <a, x>, compensated.
double wealth_ratio(const PriceVector& a, std::span<const double> x);

// f(x) = -log<a, x>. DomainError when <a, x> == 0.
double loss(const PriceVector& a, const Portfolio& x);
double loss(const PriceVector& a, std::span<const double> x);

// grad f(x) = -a / <a, x>; every entry <= 0.
GradientVector gradient(const PriceVector& a, const Portfolio& x);
GradientVector gradient(const PriceVector& a, std::span<const double> x);

// ||v||_{x,*} = ||v (.) x||_2, the dual local norm of the log-barrier.
double dual_local_norm(std::span<const double> v, const Portfolio& x);
double dual_local_norm(std::span<const double> v, std::span<const double> x);

// ||u||_x = ||u (/) x||_2, the primal local norm. Requires x > 0.
double local_norm(std::span<const double> u, const Portfolio& x);
double local_norm(std::span<const double> u, std::span<const double> x);

// x (.) grad f(x). Its negation is a point of the simplex.
Vector multiplicative_gradient(const PriceVector& a, const Portfolio& x);
Vector multiplicative_gradient(const PriceVector& a, std::span<const double> x);

}  // namespace ops_ftrl
