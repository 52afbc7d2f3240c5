#include "ops_ftrl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ops_ftrl/errors.hpp"

namespace ops_ftrl {

namespace {

// Exact line search for L(x + gamma (e_s - e_v)) on gamma in [0, cap].
// phi'(gamma) = -sum_t c_t / (r_t + gamma c_t) is increasing; phi'(0) < 0.
double pairwise_line_search(const Vector& r, const Vector& c, double cap) {
  double dom_limit = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < r.size(); ++t) {
    if (c[t] < 0.0) dom_limit = std::min(dom_limit, r[t] / -c[t]);
  }
  auto derivatives = [&](double gamma, double& first, double& second) {
    CompensatedSum s1;
    CompensatedSum s2;
    for (std::size_t t = 0; t < r.size(); ++t) {
      if (c[t] == 0.0) continue;
      const double term = c[t] / (r[t] + gamma * c[t]);
      s1.add(-term);
      s2.add(term * term);
    }
    first = s1.value();
    second = s2.value();
  };

  double first = 0.0;
  double second = 0.0;
  double hi = cap;
  if (cap < dom_limit) {
    derivatives(cap, first, second);
    if (first <= 0.0) return cap;  // drop step: the whole weight of v moves
  } else {
    hi = dom_limit;  // phi' -> +inf at the edge of the domain
  }

  double lo = 0.0;
  double gamma = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    derivatives(gamma, first, second);
    if (first == 0.0) return gamma;
    if (first < 0.0) {
      lo = gamma;
    } else {
      hi = gamma;
    }
    const double step = first / second;
    if (gamma > 0.0 && std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * gamma) {
      return gamma;  // Newton has converged to rounding
    }
    double next = gamma - step;
    if (!(next > lo && next < hi)) next = lo + 0.5 * (hi - lo);
    if (next == gamma || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      return gamma;
    }
    gamma = next;
  }
  return gamma;
}

Vector wealth_ratios(const MarketHistory& history, std::span<const double> x) {
  Vector r(history.horizon());
  for (std::size_t t = 0; t < r.size(); ++t) r[t] = wealth_ratio(history[t], x);
  return r;
}

void require_lengths(const MarketHistory& history,
                     const std::vector<Portfolio>& portfolios) {
  if (portfolios.size() != history.horizon()) {
    throw InputError("statistics: " + std::to_string(portfolios.size()) +
                     " portfolios for " + std::to_string(history.horizon()) +
                     " rounds");
  }
  for (const auto& x : portfolios) {
    if (x.size() != history.dimension()) {
      throw InputError("statistics: portfolio dimension mismatch");
    }
  }
}

}  // namespace

CrpResult best_crp(const MarketHistory& history, const CrpOptions& options) {
  const std::size_t T = history.horizon();
  const std::size_t d = history.dimension();
  if (T == 0) throw InputError("best_crp: empty history");
  const double tolerance =
      options.gap_tolerance * std::max(1.0, static_cast<double>(T));

  Vector x(d, 1.0 / static_cast<double>(d));
  Vector c(T);
  std::vector<CompensatedSum> grad_sums(d);
  Vector grad(d);
  double gap = std::numeric_limits<double>::infinity();

  for (std::size_t iter = 0;; ++iter) {
    const Vector r = wealth_ratios(history, x);
    std::fill(grad_sums.begin(), grad_sums.end(), CompensatedSum{});
    for (std::size_t t = 0; t < T; ++t) {
      const auto a = history[t].entries();
      const double inv = 1.0 / r[t];
      for (std::size_t i = 0; i < d; ++i) grad_sums[i].add(-a[i] * inv);
    }
    for (std::size_t i = 0; i < d; ++i) grad[i] = grad_sums[i].value();

    const std::size_t s = static_cast<std::size_t>(
        std::min_element(grad.begin(), grad.end()) - grad.begin());
    CompensatedSum gap_sum;
    std::size_t v = s;
    for (std::size_t i = 0; i < d; ++i) {
      if (x[i] > 0.0) {
        gap_sum.add(x[i] * (grad[i] - grad[s]));
        if (v == s || grad[i] > grad[v]) v = i;
      }
    }
    gap = std::max(0.0, gap_sum.value());

    if (gap <= tolerance) {
      CompensatedSum l;
      for (double rt : r) l.add(-std::log(rt));
      CrpResult out;
      out.l_star = l.value();
      out.gap = gap;
      out.iterations = iter;
      out.x_star = Portfolio::from_weights(std::move(x), 1e-9);
      return out;
    }
    if (iter == options.max_iterations || v == s) {
      std::ostringstream msg;
      msg << "best_crp: duality gap " << gap << " above tolerance " << tolerance
          << " after " << iter << " iterations";
      throw SolverError(msg.str(), gap, gap, iter);
    }

    for (std::size_t t = 0; t < T; ++t) c[t] = history[t][s] - history[t][v];
    const double gamma = pairwise_line_search(r, c, x[v]);
    if (gamma >= x[v]) {
      x[s] += x[v];
      x[v] = 0.0;
    } else {
      x[s] += gamma;
      x[v] -= gamma;
    }
  }
}

double gradual_variation(const MarketHistory& history,
                         const std::vector<Portfolio>& portfolios) {
  require_lengths(history, portfolios);
  CompensatedSum v;
  for (std::size_t t = 1; t < history.horizon(); ++t) {
    const Portfolio& x_prev = portfolios[t - 1];
    const Vector now = multiplicative_gradient(history[t], x_prev);
    const Vector before = multiplicative_gradient(history[t - 1], x_prev);
    for (std::size_t i = 0; i < now.size(); ++i) {
      const double diff = now[i] - before[i];
      v.add(diff * diff);
    }
  }
  return v.value();
}

double second_order_statistic(const MarketHistory& history,
                              const std::vector<Portfolio>& portfolios) {
  require_lengths(history, portfolios);
  const std::size_t T = history.horizon();
  const std::size_t d = history.dimension();
  std::vector<Vector> m(T);
  std::vector<CompensatedSum> sums(d);
  for (std::size_t t = 0; t < T; ++t) {
    m[t] = multiplicative_gradient(history[t], portfolios[t]);
    for (std::size_t i = 0; i < d; ++i) sums[i].add(m[t][i]);
  }
  Vector mean(d);
  for (std::size_t i = 0; i < d; ++i) mean[i] = sums[i].value() / static_cast<double>(T);
  CompensatedSum q;
  for (const auto& mt : m) {
    for (std::size_t i = 0; i < d; ++i) {
      const double diff = mt[i] - mean[i];
      q.add(diff * diff);
    }
  }
  return q.value();
}

DataStatistics data_statistics(const MarketHistory& history,
                               const std::vector<Portfolio>& portfolios,
                               const CrpOptions& crp) {
  DataStatistics out;
  out.gradual_variation = gradual_variation(history, portfolios);
  out.second_order = second_order_statistic(history, portfolios);
  const CrpResult best = best_crp(history, crp);
  out.l_star = best.l_star;
  out.l_star_gap = best.gap;
  return out;
}

double bound_value(AlgoKind kind, std::size_t d, std::size_t T, double stat,
                   double eta) {
  if (d < 2) throw ConfigError("bound_value: d must be at least 2");
  if (T < 1) throw ConfigError("bound_value: T must be positive");
  if (!(stat >= 0.0)) throw ConfigError("bound_value: statistic must be >= 0");
  const double dd = static_cast<double>(d);
  const double log_t = std::log(static_cast<double>(T));
  constexpr double sqrt2 = std::numbers::sqrt2;

  switch (kind) {
    case AlgoKind::kGradualVariation:
      return (log_t + 8.0) * std::sqrt(dd * stat + 512.0 * dd * dd) +
             std::sqrt(2.0 * dd) * log_t + 2.0 - 128.0 * std::sqrt(2.0 * dd);
    case AlgoKind::kSmallLoss:
      return 2.0 * (log_t + 2.0) * std::sqrt(4.0 * dd * stat + 4.0 * dd * dd + dd) +
             dd * (log_t + 2.0) * (log_t + 2.0);
    case AlgoKind::kAverageOptimism:
      if (!(eta > 0.0) || eta > kMaxAverageEta * (1.0 + 1e-15)) {
        throw ConfigError("bound_value: avg eta must lie in (0, 1/(2 sqrt 2)]");
      }
      return dd * log_t / eta + 2.0 * eta * (log_t + 1.0) + 2.0 + eta * stat;
    case AlgoKind::kAggregating: {
      const double tail = std::log(std::log2(static_cast<double>(T)) + 2.0);
      if (stat >= 1.0) {
        return (1.0 + sqrt2) * std::sqrt(dd * stat * log_t) +
               2.0 * sqrt2 * dd * log_t + log_t / sqrt2 + tail + 3.0;
      }
      return 2.0 * sqrt2 * dd * log_t + log_t / sqrt2 +
             std::sqrt(2.0 * dd * log_t) + tail + 4.0;
    }
  }
  throw ConfigError("bound_value: unknown algorithm kind");
}

ScoredRun run_and_score(AlgoKind kind, const MarketHistory& history,
                        const RunOptions& options) {
  const std::size_t T = history.horizon();
  const std::size_t d = history.dimension();
  if (T == 0) throw InputError("run_and_score: empty history");

  LearnerOptions learner_options = options.learner;
  if (kind == AlgoKind::kAggregating && learner_options.horizon == 0) {
    learner_options.horizon = std::max<std::size_t>(T, 2);
  }
  auto learner = make_learner(kind, d, learner_options);

  ScoredRun run;
  run.kind = kind;
  run.d = d;
  run.T = T;
  run.trace.losses.reserve(T);
  run.trace.portfolios.reserve(T);
  run.rounds.reserve(T);

  CompensatedSum cumulative;
  for (std::size_t t = 0; t < T; ++t) {
    const Portfolio& x = learner->current();
    const double f = loss(history[t], x);
    cumulative.add(f);
    run.trace.losses.push_back(f);
    run.trace.portfolios.push_back(x);
    learner->update(history[t]);
    for (std::size_t iters : learner->last_newton_iterations()) {
      ++run.newton_histogram[iters];
    }
    run.rounds.push_back(RoundRecord{t + 1, f, cumulative.value(),
                                     learner->learning_rate(),
                                     learner->running_statistic()});
  }

  const CrpResult best = best_crp(history, options.crp);
  run.trace.cumulative_loss = cumulative.value();
  run.trace.comparator_loss = best.l_star;
  run.trace.regret = run.trace.cumulative_loss - best.l_star;
  run.trace.comparator = best.x_star;
  run.trace.comparator_gap = best.gap;
  run.trace.domain_trimmed = history.has_zero_relatives();

  run.stats.gradual_variation = gradual_variation(history, run.trace.portfolios);
  run.stats.second_order = second_order_statistic(history, run.trace.portfolios);
  run.stats.l_star = best.l_star;
  run.stats.l_star_gap = best.gap;

  double eta = kMaxAverageEta;
  switch (kind) {
    case AlgoKind::kGradualVariation:
      run.statistic_name = "V_T";
      run.statistic = run.stats.gradual_variation;
      break;
    case AlgoKind::kSmallLoss:
      // The bound increases in L*, and L* >= l_hat - gap.
      run.statistic_name = "L_star";
      run.statistic = std::max(0.0, run.stats.l_star - run.stats.l_star_gap);
      break;
    case AlgoKind::kAverageOptimism:
      run.statistic_name = "Q_T";
      run.statistic = run.stats.second_order;
      eta = *learner->learning_rate();
      break;
    case AlgoKind::kAggregating: {
      run.statistic_name = "Q_T";
      run.statistic = run.stats.second_order;
      const auto& aa = static_cast<const AggregatingLearner&>(*learner);
      AggregateDetails details;
      details.expert_count = aa.state().experts.size();
      details.expert_etas = aa.state().expert_etas;
      for (std::size_t k = 0; k < details.expert_count; ++k) {
        details.expert_losses.push_back(-aa.state().log_weights[k]);
        details.expert_q.push_back(aa.state().experts[k].running_statistic());
      }
      details.log_wealth = aa.state().log_wealth.value();
      details.mean_expert_log_wealth = aa.mean_expert_log_wealth();
      run.aggregate = std::move(details);
      break;
    }
  }
  run.bound = bound_value(kind, d, T, run.statistic, eta);
  run.compliant = run.trace.regret + run.trace.comparator_gap <= run.bound;
  return run;
}

}  // namespace ops_ftrl
