#include "ops_ftrl/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "ops_ftrl/algorithms.hpp"
#include "ops_ftrl/errors.hpp"
#include "ops_ftrl/log_barrier.hpp"
#include "ops_ftrl/market_data.hpp"
#include "ops_ftrl/metrics.hpp"

namespace ops_ftrl::verify {

namespace {

std::uint32_t fnv1a(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::mt19937_64 trial_rng(std::uint64_t seed, const std::string& name,
                          std::size_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32), fnv1a(name),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(trial) >> 32)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_interval_open_closed(rng);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

std::string describe(std::span<const double> v) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out << ", ";
    out << format_double(v[i]);
  }
  out << ')';
  return out.str();
}

// lhs <= rhs + tol as a TrialResult.
TrialResult expect_le(double lhs, double rhs, double tol, const std::string& what) {
  TrialResult r;
  r.margin = lhs - rhs;
  r.ok = lhs <= rhs + tol;
  if (!r.ok) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": " << lhs << " > " << rhs << " + " << tol;
    r.detail = msg.str();
  }
  return r;
}

double naive_psi_prime(double lambda, const StepProblem& prob) {
  double s = 0.0;
  for (std::size_t i = 0; i < prob.dimension(); ++i) {
    s += (1.0 - prob.eta * prob.hint[i]) / (lambda + prob.eta * prob.g_cum[i]);
  }
  return 1.0 - s;
}

}  // namespace

bool SuiteReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckOutcome& c) { return c.passed(); });
}

std::size_t threads_from_env() {
  if (const char* env = std::getenv("OPS_FTRL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CheckOutcome run_check(const std::string& name, std::size_t trials,
                       std::uint64_t seed, std::size_t threads, const TrialFn& fn) {
  std::vector<TrialResult> results(trials);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < trials; t = next++) {
      auto rng = trial_rng(seed, name, t);
      try {
        results[t] = fn(rng, t);
      } catch (const std::exception& e) {
        results[t] = TrialResult{false, std::numeric_limits<double>::infinity(),
                                 std::string("exception: ") + e.what()};
      }
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(threads, trials));
  {
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
  }

  CheckOutcome out;
  out.name = name;
  out.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    out.worst_margin = std::max(out.worst_margin, results[t].margin);
    if (!results[t].ok) {
      if (out.failures == 0) {
        out.first_counterexample =
            "trial " + std::to_string(t) + ": " + results[t].detail;
      }
      ++out.failures;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Random instances

Vector random_simplex_interior(std::mt19937_64& rng, std::size_t d) {
  Vector x(d);
  // Exponent > 1 concentrates mass on few coordinates.
  const double power = (rng() & 1u) ? 1.0 : uniform(rng, 1.0, 8.0);
  double total = 0.0;
  for (double& v : x) {
    v = std::pow(-std::log(unit_interval_open_closed(rng)) + 1e-300, power);
    v = std::max(v, 1e-12);
    total += v;
  }
  for (double& v : x) v /= total;
  return x;
}

Vector random_price_relatives(std::mt19937_64& rng, std::size_t d) {
  Vector a(d);
  const double power = uniform(rng, 0.5, 4.0);
  bool any = false;
  for (double& v : a) {
    v = (rng() % 4 == 0) ? 0.0 : std::pow(unit_interval_open_closed(rng), power);
    any = any || v > 0.0;
  }
  if (!any) a[uniform_index(rng, 0, d - 1)] = 1.0;
  const PriceVector normalized = normalize_market(a);
  return Vector(normalized.entries().begin(), normalized.entries().end());
}

StepProblem random_step_problem(std::mt19937_64& rng, std::size_t d) {
  StepProblem prob;
  prob.eta = std::pow(10.0, uniform(rng, -2.0, 0.0));
  prob.g_cum.assign(d, 0.0);
  if (rng() & 1u) {
    // Cumulative gradients of an actual loss sequence.
    const std::size_t rounds = uniform_index(rng, 1, 50);
    for (std::size_t k = 0; k < rounds; ++k) {
      const PriceVector a = normalize_market(random_price_relatives(rng, d));
      // Mixing in 1e-6 of the uniform point bounds each gradient by 1e6 d,
      // the regime of interior learner iterates.
      Vector x = random_simplex_interior(rng, d);
      for (double& w : x) w = (1.0 - 1e-6) * w + 1e-6 / static_cast<double>(d);
      const GradientVector g = gradient(a, x);
      for (std::size_t i = 0; i < d; ++i) prob.g_cum[i] += g[i];
    }
  } else {
    // Arbitrary nonpositive entries over five orders of magnitude.
    for (double& v : prob.g_cum) v = -uniform(rng, 0.0, 1.0) * std::pow(10.0, uniform(rng, -2.0, 3.0));
  }
  prob.hint.assign(d, 0.0);
  switch (rng() % 3) {
    case 0:
      break;
    case 1: {
      // A point of -simplex, scaled so that eta * hint stays in [-1, 0].
      const Vector w = random_simplex_interior(rng, d);
      const double scale = std::min(1.0, 1.0 / prob.eta) * unit_interval_open_closed(rng);
      for (std::size_t i = 0; i < d; ++i) prob.hint[i] = -scale * w[i];
      break;
    }
    default:
      for (double& v : prob.hint) v = -unit_interval_open_closed(rng) / prob.eta;
      break;
  }
  return prob;
}

double bisection_lambda(const StepProblem& prob) {
  double g_min = prob.g_cum.front();
  for (double g : prob.g_cum) g_min = std::min(g_min, g);
  const double l0 = 1.0 - prob.eta * g_min;
  const double width0 = 4.0 * static_cast<double>(prob.dimension());
  double lo = l0;
  double hi = l0 + width0;
  for (double width = width0; naive_psi_prime(hi, prob) <= 0.0; width *= 2.0) {
    lo = hi;
    hi = l0 + 2.0 * width;
  }
  if (naive_psi_prime(lo, prob) > 0.0) {
    // psi'(l0) <= 0 is a theorem; keep the oracle total anyway.
    lo = -prob.eta * g_min;
  }
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (naive_psi_prime(mid, prob) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

// ---------------------------------------------------------------------------
// lemmas

SuiteReport verify_lemmas(std::size_t trials, std::uint64_t seed, std::size_t threads) {
  SuiteReport report;
  report.suite = "lemmas";
  report.seed = seed;

  auto draw = [](std::mt19937_64& rng, std::size_t& d, PriceVector& a, Vector& x) {
    d = uniform_index(rng, 2, 10);
    a = normalize_market(random_price_relatives(rng, d));
    x = random_simplex_interior(rng, d);
  };

  report.checks.push_back(run_check(
      "bounded_dual_norm", trials, seed, threads, [&](std::mt19937_64& rng, std::size_t) {
        std::size_t d = 0;
        PriceVector a = normalize_market(Vector{1.0});
        Vector x;
        draw(rng, d, a, x);
        auto r = expect_le(dual_local_norm(gradient(a, x), x), 1.0, 1e-12,
                           "||grad f(x)||_{x,*} <= 1");
        if (!r.ok) r.detail += " at a = " + describe(a.entries()) + ", x = " + describe(x);
        return r;
      }));

  report.checks.push_back(run_check(
      "multiplicative_gradient_on_simplex", trials, seed, threads,
      [&](std::mt19937_64& rng, std::size_t) {
        std::size_t d = 0;
        PriceVector a = normalize_market(Vector{1.0});
        Vector x;
        draw(rng, d, a, x);
        const Vector m = multiplicative_gradient(a, x);
        double sum = 0.0;
        double worst = 0.0;
        for (double v : m) {
          sum += -v;
          worst = std::max(worst, v);
        }
        TrialResult r;
        r.margin = std::max(std::abs(sum - 1.0) - 1e-10, worst);
        r.ok = std::abs(sum - 1.0) <= 1e-10 && worst <= 0.0;
        if (!r.ok) {
          r.detail = "-x (.) grad f(x) = " + describe(m) + " is not on the simplex (x = " +
                     describe(x) + ", a = " + describe(a.entries()) + ")";
        }
        return r;
      }));

  report.checks.push_back(run_check(
      "gradual_variation_smoothness", trials, seed, threads,
      [&](std::mt19937_64& rng, std::size_t) {
        std::size_t d = 0;
        PriceVector a = normalize_market(Vector{1.0});
        Vector x;
        draw(rng, d, a, x);
        const Vector y = random_simplex_interior(rng, d);
        const Vector mx = multiplicative_gradient(a, x);
        const Vector my = multiplicative_gradient(a, y);
        Vector diff(d);
        Vector step(d);
        for (std::size_t i = 0; i < d; ++i) {
          diff[i] = mx[i] - my[i];
          step[i] = x[i] - y[i];
        }
        double lhs = 0.0;
        for (double v : diff) lhs += v * v;
        lhs = std::sqrt(lhs);
        const double rhs = 4.0 * std::min(local_norm(step, x), local_norm(step, y));
        auto r = expect_le(lhs, rhs, 1e-10, "||x(.)grad f(x) - y(.)grad f(y)|| <= 4 min(||x-y||_x, ||x-y||_y)");
        if (!r.ok) {
          r.detail += " at a = " + describe(a.entries()) + ", x = " + describe(x) +
                      ", y = " + describe(y);
        }
        return r;
      }));

  report.checks.push_back(run_check(
      "self_bounding", trials, seed, threads, [&](std::mt19937_64& rng, std::size_t) {
        std::size_t d = 0;
        PriceVector a = normalize_market(Vector{1.0});
        Vector x;
        draw(rng, d, a, x);
        GradientVector g = gradient(a, x);
        const double alpha = alpha_shift(g, x);
        for (double& v : g) v += alpha;
        const double n = dual_local_norm(g, x);
        auto r = expect_le(n * n, 4.0 * loss(a, x), 1e-10,
                           "||g + alpha e||^2_{x,*} <= 4 f(x)");
        if (!r.ok) r.detail += " at a = " + describe(a.entries()) + ", x = " + describe(x);
        return r;
      }));

  report.checks.push_back(run_check(
      "alpha_shift_minimizes", trials, seed, threads, [&](std::mt19937_64& rng, std::size_t) {
        const std::size_t d = uniform_index(rng, 2, 10);
        const Vector x = random_simplex_interior(rng, d);
        Vector v(d);
        for (double& e : v) e = uniform(rng, -10.0, 10.0);
        const double alpha = alpha_shift(v, x);
        auto norm_at = [&](double shift) {
          Vector w(v);
          for (double& e : w) e += shift;
          return dual_local_norm(w, x);
        };
        const double best = norm_at(alpha);
        TrialResult worst{true, -1e300, {}};
        for (int probe = 0; probe < 50; ++probe) {
          const double other = alpha + uniform(rng, -1.0, 1.0) * std::pow(10.0, uniform(rng, -6.0, 1.0));
          auto r = expect_le(best, norm_at(other), 1e-12, "||v + alpha e|| <= ||v + alpha' e||");
          if (!r.ok) {
            r.detail += " with alpha' = " + format_double(other) + ", v = " + describe(v) +
                        ", x = " + describe(x);
            return r;
          }
          worst.margin = std::max(worst.margin, r.margin);
        }
        return worst;
      }));

  report.checks.push_back(run_check(
      "omega_sandwich", trials, seed, threads, [&](std::mt19937_64& rng, std::size_t) {
        const double t = uniform(rng, 0.0, 10.0);
        const OmegaPair w = omega_pair(t);
        const double lower = t * t / (2.0 * (1.0 + t));
        const double upper = t * t / (2.0 + t);
        const double tol = 1e-15 * std::max(1.0, upper);
        TrialResult r;
        r.margin = std::max(lower - w.omega, w.omega - upper);
        r.ok = r.margin <= tol;
        if (!r.ok) {
          r.detail = "omega(" + format_double(t) + ") = " + format_double(w.omega) +
                     " outside [" + format_double(lower) + ", " + format_double(upper) + "]";
        }
        return r;
      }));

  report.checks.push_back(run_check(
      "omega_star_sandwich", trials, seed, threads, [&](std::mt19937_64& rng, std::size_t) {
        const double t = uniform(rng, 0.0, 0.99);
        const OmegaPair w = omega_pair(t);
        const double lower = t * t / (2.0 - t);
        const double upper = t * t / (2.0 * (1.0 - t));
        const double tol = 1e-15 * std::max(1.0, upper);
        TrialResult r;
        r.margin = std::max(lower - w.omega_star, w.omega_star - upper);
        r.ok = r.margin <= tol;
        if (!r.ok) {
          r.detail = "omega_*(" + format_double(t) + ") = " + format_double(w.omega_star) +
                     " outside [" + format_double(lower) + ", " + format_double(upper) + "]";
        }
        return r;
      }));

  report.checks.push_back(run_check(
      "barrier_finite_differences", trials, seed, threads,
      [&](std::mt19937_64& rng, std::size_t) {
        const std::size_t d = uniform_index(rng, 2, 10);
        // Interior points away from the boundary, where central differences
        // with a relative step are well conditioned.
        Vector x(d);
        double total = 0.0;
        for (double& v : x) {
          v = uniform(rng, 0.05, 1.0);
          total += v;
        }
        for (double& v : x) v /= total;
        const BarrierEval at = barrier(x);
        TrialResult worst{true, -1e300, {}};
        for (std::size_t i = 0; i < d; ++i) {
          const double h = 1e-4 * x[i];
          Vector plus(x);
          Vector minus(x);
          plus[i] += h;
          minus[i] -= h;
          const double fp = barrier(plus).value;
          const double fm = barrier(minus).value;
          const double fd_grad = (fp - fm) / (2.0 * h);
          const double rel_grad = std::abs(fd_grad - at.grad[i]) / std::abs(at.grad[i]);
          // Hessian diagonal against central differences of the gradient.
          const double fd_hess = (barrier(plus).grad[i] - barrier(minus).grad[i]) / (2.0 * h);
          const double rel_hess_grad = std::abs(fd_hess - at.hess_diag[i]) / at.hess_diag[i];
          const double err = std::max(rel_grad, rel_hess_grad);
          worst.margin = std::max(worst.margin, err - 1e-6);
          if (err > 1e-6) {
            worst.ok = false;
            worst.detail = "finite-difference mismatch at coordinate " + std::to_string(i) +
                           " of x = " + describe(x) + ": gradient rel. error " +
                           format_double(rel_grad) + ", Hessian rel. error " +
                           format_double(rel_hess_grad);
            return worst;
          }
        }
        return worst;
      }));

  report.checks.push_back(run_check(
      "normalization_idempotent", trials, seed, threads,
      [&](std::mt19937_64& rng, std::size_t) {
        const std::size_t d = uniform_index(rng, 2, 10);
        Vector raw(d);
        for (double& v : raw) v = (rng() % 5 == 0) ? 0.0 : uniform(rng, 0.0, 1e3);
        raw[0] = uniform(rng, 1e-3, 1e3);
        const PriceVector once = normalize_market(raw);
        const PriceVector twice = normalize_market(once.entries());
        TrialResult r;
        r.ok = once == twice;
        r.margin = r.ok ? 0.0 : 1.0;
        if (!r.ok) r.detail = "normalize is not idempotent on " + describe(raw);
        return r;
      }));

  report.checks.push_back(run_check(
      "regret_scale_invariance", trials, seed, threads, [&](std::mt19937_64& rng, std::size_t) {
        const std::size_t d = uniform_index(rng, 2, 10);
        const PriceVector a = normalize_market(random_price_relatives(rng, d));
        const Vector x = random_simplex_interior(rng, d);
        const Vector y = random_simplex_interior(rng, d);
        const double c = std::pow(10.0, uniform(rng, -3.0, 3.0));
        // loss(c a, z) = loss(a, z) - log c; computed on raw inner products.
        const double scaled = (-std::log(c * wealth_ratio(a, x))) -
                              (-std::log(c * wealth_ratio(a, y)));
        const double plain = loss(a, x) - loss(a, y);
        TrialResult r;
        r.margin = std::abs(scaled - plain) - 1e-12;
        r.ok = r.margin <= 0.0;
        if (!r.ok) {
          r.detail = "regret changes under scaling by c = " + format_double(c) + ": " +
                     format_double(scaled) + " vs " + format_double(plain);
        }
        return r;
      }));

  return report;
}

// ---------------------------------------------------------------------------
// solver

SuiteReport verify_solver(std::size_t trials, std::uint64_t seed, std::size_t threads) {
  SuiteReport report;
  report.suite = "solver";
  report.seed = seed;

  auto check_solution = [](const StepProblem& prob, std::size_t max_iters) -> TrialResult {
    NewtonTrace trace;
    const StepSolution sol = ftrl_step(prob, &trace);
    std::ostringstream why;
    why.precision(17);

    const double oracle = bisection_lambda(prob);
    const double rel = std::abs(sol.lambda_star - oracle) / std::abs(oracle);
    if (rel > 1e-9) {
      why << "lambda* = " << sol.lambda_star << " vs bisection " << oracle
          << " (relative error " << rel << ")";
    }
    const auto x = sol.x_next.weights();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sum += x[i];
      if (!(x[i] > 0.0)) why << "; x(" << i << ") = " << x[i] << " is not positive";
      const double kkt = prob.eta * (prob.g_cum[i] + sol.g_hat[i]) - 1.0 / x[i] + sol.lambda_star;
      // Relative to the largest term: with |eta G| near 1e12 a double cannot
      // resolve an absolute 1e-8.
      if (std::abs(kkt) > 1e-8 * std::max(1.0, std::abs(sol.lambda_star))) {
        why << "; KKT residual " << kkt << " at " << i;
      }
      const double prod = x[i] * sol.g_hat[i] - prob.hint[i];
      if (std::abs(prod) > 1e-12) why << "; x (.) g_hat - hint = " << prod << " at " << i;
      const double closed = (1.0 - prob.eta * prob.hint[i]) /
                            (sol.lambda_star + prob.eta * prob.g_cum[i]);
      // Rounding lambda* to a double moves the closed form by up to
      // x^2 / (1 - eta p) * ulp(lambda*).
      const double lambda_ulp = 2.0 * std::numeric_limits<double>::epsilon() *
                                std::abs(sol.lambda_star);
      const double closed_tol = 1e-10 * std::max(1.0, x[i]) +
                                x[i] * x[i] / (1.0 - prob.eta * prob.hint[i]) * lambda_ulp;
      if (std::abs(closed - x[i]) > closed_tol) {
        why << "; x(" << i << ") = " << x[i] << " differs from closed form " << closed;
      }
    }
    if (std::abs(sum - 1.0) > 1e-10) why << "; sum x = " << sum;
    for (std::size_t k = 0; k < trace.lambdas.size(); ++k) {
      if (trace.derivatives[k] > 1e-12) {
        why << "; psi'(lambda_" << k << ") = " << trace.derivatives[k] << " > 0";
      }
      if (k > 0 && trace.lambdas[k] < trace.lambdas[k - 1]) {
        why << "; lambda decreased at iterate " << k;
      }
    }
    if (sol.newton_iters > max_iters) {
      why << "; " << sol.newton_iters << " Newton iterations > " << max_iters;
    }
    TrialResult r;
    r.margin = rel - 1e-9;
    r.ok = why.str().empty();
    if (!r.ok) {
      std::ostringstream full;
      full.precision(17);
      full << why.str() << " for eta = " << prob.eta << ", G = " << describe(prob.g_cum)
           << ", hint = " << describe(prob.hint);
      r.detail = full.str();
    }
    return r;
  };

  report.checks.push_back(run_check(
      "newton_matches_bisection", trials, seed, threads,
      [&](std::mt19937_64& rng, std::size_t) {
        const std::size_t d = uniform_index(rng, 2, 6);
        return check_solution(random_step_problem(rng, d), 40);
      }));

  // Large dimensions: the iteration budget must not grow with d.
  report.checks.push_back(run_check(
      "iteration_budget_large_d", std::max<std::size_t>(1, trials / 50), seed, threads,
      [&](std::mt19937_64& rng, std::size_t) {
        const std::size_t d = static_cast<std::size_t>(std::pow(10.0, uniform(rng, 1.0, 4.0)));
        const StepProblem prob = random_step_problem(rng, d);
        const LambdaSolution sol = solve_lambda(prob);
        TrialResult r;
        r.margin = static_cast<double>(sol.newton_iters) - 40.0;
        r.ok = sol.newton_iters <= 40;
        if (!r.ok) {
          r.detail = std::to_string(sol.newton_iters) + " Newton iterations at d = " +
                     std::to_string(d);
        }
        return r;
      }));

  return report;
}

// ---------------------------------------------------------------------------
// bounds

SuiteReport verify_bounds(std::size_t trials, std::uint64_t seed, std::size_t threads) {
  SuiteReport report;
  report.suite = "bounds";
  report.seed = seed;

  auto random_market = [](std::mt19937_64& rng) {
    GeneratorSpec spec;
    static constexpr MarketKind kinds[] = {
        MarketKind::kIidUniform, MarketKind::kTwoAssetAlternating,
        MarketKind::kAdversarialKelly, MarketKind::kSingleWinner, MarketKind::kConstant};
    spec.kind = kinds[rng() % std::size(kinds)];
    spec.d = uniform_index(rng, 2, 6);
    spec.T = uniform_index(rng, 20, 400);
    spec.seed = rng();
    spec.winner = uniform_index(rng, 0, spec.d - 1);
    spec.epsilon = uniform(rng, 0.01, 0.5);
    if (spec.kind == MarketKind::kConstant) {
      spec.base = random_price_relatives(rng, spec.d);
    }
    return spec;
  };

  auto describe_spec = [](const GeneratorSpec& spec) {
    std::ostringstream out;
    out << to_string(spec.kind) << " d=" << spec.d << " T=" << spec.T
        << " seed=" << spec.seed;
    return out.str();
  };

  auto compliance = [&](AlgoKind kind) {
    return [&, kind](std::mt19937_64& rng, std::size_t) {
      const GeneratorSpec spec = random_market(rng);
      const MarketHistory history = generate(spec);
      ScoredRun run;
      try {
        run = run_and_score(kind, history);
      } catch (const std::exception& e) {
        TrialResult r;
        r.ok = false;
        r.margin = std::numeric_limits<double>::infinity();
        r.detail = std::string(e.what()) + " on " + describe_spec(spec);
        return r;
      }
      std::ostringstream why;
      why.precision(17);
      if (!run.compliant) {
        why << "regret " << run.trace.regret << " (+ gap " << run.trace.comparator_gap
            << ") exceeds bound " << run.bound << " with " << run.statistic_name << " = "
            << run.statistic;
      }
      const double T = static_cast<double>(history.horizon());
      if (run.stats.gradual_variation > 2.0 * (T - 1.0) + 1e-9) {
        why << "; V_T = " << run.stats.gradual_variation << " > 2(T-1)";
      }
      if (kind == AlgoKind::kSmallLoss) {
        double prev = 0.0;
        for (const auto& rec : run.rounds) {
          if (rec.statistic - prev > 1.0 + 1e-12) {
            why << "; small-loss increment " << rec.statistic - prev << " > 1 at t = " << rec.t;
            break;
          }
          prev = rec.statistic;
        }
      }
      if (run.aggregate) {
        const auto& agg = *run.aggregate;
        const double best = *std::min_element(agg.expert_losses.begin(), agg.expert_losses.end());
        const double slack = std::log(static_cast<double>(agg.expert_count));
        if (run.trace.cumulative_loss > best + slack + 1e-6) {
          why << "; aggregate loss " << run.trace.cumulative_loss << " > best expert " << best
              << " + log K";
        }
        if (std::abs(agg.log_wealth - agg.mean_expert_log_wealth) > 1e-8) {
          why << "; wealth identity off by " << agg.log_wealth - agg.mean_expert_log_wealth;
        }
      }
      TrialResult r;
      r.margin = run.trace.regret + run.trace.comparator_gap - run.bound;
      r.ok = why.str().empty();
      if (!r.ok) r.detail = why.str() + " on " + describe_spec(spec);
      return r;
    };
  };

  for (AlgoKind kind : {AlgoKind::kGradualVariation, AlgoKind::kSmallLoss,
                        AlgoKind::kAverageOptimism, AlgoKind::kAggregating}) {
    report.checks.push_back(run_check(std::string(to_string(kind)) + "_bound", trials,
                                      seed, threads, compliance(kind)));
  }
  return report;
}

SuiteReport run_suite(const std::string& suite, std::size_t trials,
                      std::uint64_t seed, std::size_t threads) {
  if (suite == "lemmas") return verify_lemmas(trials, seed, threads);
  if (suite == "solver") return verify_solver(trials, seed, threads);
  if (suite == "bounds") return verify_bounds(trials, seed, threads);
  throw ConfigError("unknown verify suite '" + suite +
                    "' (expected lemmas, solver or bounds)");
}

}  // namespace ops_ftrl::verify
