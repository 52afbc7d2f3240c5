#include "ops_ftrl/algorithms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <string>

#include "ops_ftrl/errors.hpp"
#include "ops_ftrl/log_barrier.hpp"

namespace ops_ftrl {

namespace {

void require_dimension(std::size_t d) {
  if (d < 2) {
    throw ConfigError("learner dimension must be at least 2, got " +
                      std::to_string(d));
  }
}

void require_matching(const PriceVector& a, std::size_t d) {
  if (a.size() != d) {
    throw InputError("price vector has dimension " + std::to_string(a.size()) +
                     ", learner expects " + std::to_string(d));
  }
}

Vector entrywise_product(std::span<const double> a, std::span<const double> b) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

}  // namespace

std::string_view to_string(AlgoKind kind) noexcept {
  switch (kind) {
    case AlgoKind::kGradualVariation:
      return "gv";
    case AlgoKind::kSmallLoss:
      return "smallloss";
    case AlgoKind::kAverageOptimism:
      return "avg";
    case AlgoKind::kAggregating:
      return "aa";
  }
  return "unknown";
}

AlgoKind parse_algo_kind(std::string_view name) {
  for (AlgoKind k : {AlgoKind::kGradualVariation, AlgoKind::kSmallLoss,
                     AlgoKind::kAverageOptimism, AlgoKind::kAggregating}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) +
                    "' (expected gv, smallloss, avg or aa)");
}

void CompensatedVector::add(std::span<const double> v) {
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i].add(v[i]);
}

void CompensatedVector::add_scaled(double scale, std::span<const double> v) {
  for (std::size_t i = 0; i < sums_.size(); ++i) sums_[i].add(scale * v[i]);
}

Vector CompensatedVector::value() const {
  Vector out(sums_.size());
  for (std::size_t i = 0; i < sums_.size(); ++i) out[i] = sums_[i].value();
  return out;
}

void ScatterAccumulator::add(std::span<const double> m) {
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = m[i] - mean_[i];
    mean_[i] += delta / n;
    m2_[i].add(delta * (m[i] - mean_[i]));
  }
}

double ScatterAccumulator::value() const {
  CompensatedSum total;
  for (const auto& s : m2_) total.add(s.value());
  return std::max(0.0, total.value());
}

// ---------------------------------------------------------------------------

GradualVariationLearner::GradualVariationLearner(std::size_t d) : d_(d) {
  require_dimension(d);
  state_.g_cum = CompensatedVector(d);
  state_.current_x = Portfolio::uniform(d);
}

double GradualVariationLearner::schedule(std::size_t d, double v_stat) {
  const double dd = static_cast<double>(d);
  return std::sqrt(dd / (512.0 * dd + 2.0 + v_stat));
}

const Portfolio& GradualVariationLearner::update(const PriceVector& a) {
  require_matching(a, d_);
  const std::size_t t = state_.round + 1;
  const Portfolio& x = state_.current_x;
  const GradientVector g = gradient(a, x);

  // V_t adds ||x_{t-1} (.) (grad f_t(x_{t-1}) - grad f_{t-1}(x_{t-1}))||^2.
  state_.last_v_increment = 0.0;
  if (t >= 2) {
    const Vector now = multiplicative_gradient(a, *state_.prev_x);
    const Vector before = multiplicative_gradient(*state_.prev_price, *state_.prev_x);
    CompensatedSum sq;
    for (std::size_t i = 0; i < d_; ++i) {
      const double diff = now[i] - before[i];
      sq.add(diff * diff);
    }
    state_.last_v_increment = sq.value();
    state_.v_stat.add(state_.last_v_increment);
  }
  state_.eta = t >= 2 ? schedule(d_, state_.v_stat.value()) : kGradualVariationEta0;

  state_.g_cum.add(g);
  state_.prev_mult_grad = entrywise_product(x.weights(), g);

  StepProblem prob{state_.eta, state_.g_cum.value(), state_.prev_mult_grad};
  StepSolution sol = ftrl_step(prob);
  last_iters_ = sol.newton_iters;

  state_.prev_x = x;
  state_.prev_price = a;
  state_.current_x = std::move(sol.x_next);
  state_.round = t;
  return state_.current_x;
}

// ---------------------------------------------------------------------------

SmallLossLearner::SmallLossLearner(std::size_t d) : d_(d) {
  require_dimension(d);
  state_.g_cum = CompensatedVector(d);
  state_.eta = schedule(d, 0.0);
  state_.current_x = Portfolio::uniform(d);
}

double SmallLossLearner::schedule(std::size_t d, double stat) {
  const double dd = static_cast<double>(d);
  return std::sqrt(dd) / std::sqrt(4.0 * dd + 1.0 + stat);
}

const Portfolio& SmallLossLearner::update(const PriceVector& a) {
  require_matching(a, d_);
  const Portfolio& x = state_.current_x;
  const GradientVector g = gradient(a, x);
  const double alpha = alpha_shift(g, x);

  Vector shifted(g);
  for (double& v : shifted) v += alpha;
  const double norm = dual_local_norm(shifted, x);
  state_.last_alpha = alpha;
  state_.last_increment = norm * norm;
  state_.stat.add(state_.last_increment);
  state_.eta = schedule(d_, state_.stat.value());

  state_.g_cum.add(g);
  StepProblem prob{state_.eta, state_.g_cum.value(), Vector(d_, 0.0)};
  StepSolution sol = ftrl_step(prob);
  last_iters_ = sol.newton_iters;

  state_.current_x = std::move(sol.x_next);
  ++state_.round;
  return state_.current_x;
}

// ---------------------------------------------------------------------------

AverageOptimismLearner::AverageOptimismLearner(std::size_t d, double eta) : d_(d) {
  require_dimension(d);
  // One ulp of slack so that a value printed from kMaxAverageEta reads back.
  if (!std::isfinite(eta) || !(eta > 0.0) || eta > kMaxAverageEta * (1.0 + 1e-15)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "avg learner: eta = " << eta << " must lie in (0, 1/(2*sqrt(2))] = (0, "
        << kMaxAverageEta << "]";
    throw ConfigError(msg.str());
  }
  state_.eta = eta;
  state_.g_cum = CompensatedVector(d);
  state_.weighted_sum = CompensatedVector(d);
  state_.scatter = ScatterAccumulator(d);
  state_.hint.assign(d, 0.0);
  state_.current_x = Portfolio::uniform(d);
}

const Portfolio& AverageOptimismLearner::update(const PriceVector& a) {
  require_matching(a, d_);
  const Portfolio& x = state_.current_x;
  const GradientVector g = gradient(a, x);
  const Vector m = entrywise_product(x.weights(), g);

  state_.scatter.add(m);
  state_.weighted_sum.add_scaled(state_.eta, m);
  state_.eta_sum.add(state_.eta);
  state_.hint = state_.weighted_sum.value();
  const double total = state_.eta_sum.value();
  for (double& v : state_.hint) v /= total;

  state_.g_cum.add(g);
  StepProblem prob{state_.eta, state_.g_cum.value(), state_.hint};
  StepSolution sol = ftrl_step(prob);
  last_iters_ = sol.newton_iters;

  state_.current_x = std::move(sol.x_next);
  ++state_.round;
  return state_.current_x;
}

// ---------------------------------------------------------------------------

std::size_t AggregatingLearner::expert_count(std::size_t horizon) {
  if (horizon < 1) throw ConfigError("aa: horizon must be positive");
  // ceil(log2 T) is the bit width of T - 1.
  return 1 + static_cast<std::size_t>(std::bit_width(horizon - 1));
}

double AggregatingLearner::expert_eta(std::size_t d, std::size_t horizon,
                                      std::size_t k) {
  const double dlog = static_cast<double>(d) * std::log(static_cast<double>(horizon));
  const double q = std::ldexp(1.0, static_cast<int>(k));
  return std::sqrt(dlog) / (2.0 * std::sqrt(2.0 * dlog) + std::sqrt(q));
}

AggregatingLearner::AggregatingLearner(std::size_t d, std::size_t horizon) : d_(d) {
  require_dimension(d);
  if (horizon < 2) {
    throw ConfigError("aa: horizon must be at least 2 (log T vanishes at T = 1)");
  }
  state_.horizon = horizon;
  const std::size_t count = expert_count(horizon);
  state_.experts.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    const double eta = expert_eta(d, horizon, k);
    state_.expert_etas.push_back(eta);
    state_.experts.emplace_back(d, eta);
  }
  state_.log_weights.assign(count, 0.0);
  state_.scatter = ScatterAccumulator(d);
  last_iters_.assign(count, 0);
  aggregate();
}

void AggregatingLearner::aggregate() {
  const double top =
      *std::max_element(state_.log_weights.begin(), state_.log_weights.end());
  std::vector<double> w(state_.log_weights.size());
  CompensatedSum total;
  for (std::size_t k = 0; k < w.size(); ++k) {
    w[k] = std::exp(state_.log_weights[k] - top);
    total.add(w[k]);
  }
  const double norm = total.value();
  std::vector<CompensatedSum> mix(d_);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto xk = state_.experts[k].current().weights();
    const double wk = w[k] / norm;
    for (std::size_t i = 0; i < d_; ++i) mix[i].add(wk * xk[i]);
  }
  Vector x(d_);
  for (std::size_t i = 0; i < d_; ++i) x[i] = mix[i].value();
  state_.current_x = Portfolio::from_weights(std::move(x), 1e-10);
}

const Portfolio& AggregatingLearner::update(const PriceVector& a) {
  require_matching(a, d_);
  if (state_.round >= state_.horizon) {
    throw UsageError("aa: round " + std::to_string(state_.round + 1) +
                     " exceeds the declared horizon T = " +
                     std::to_string(state_.horizon));
  }
  const Portfolio& x = state_.current_x;
  state_.log_wealth.add(std::log(wealth_ratio(a, x.weights())));
  {
    const GradientVector g = gradient(a, x);
    state_.scatter.add(entrywise_product(x.weights(), g));
  }
  for (std::size_t k = 0; k < state_.experts.size(); ++k) {
    auto& expert = state_.experts[k];
    state_.log_weights[k] += std::log(wealth_ratio(a, expert.current().weights()));
    expert.update(a);
    last_iters_[k] = expert.last_newton_iterations().front();
  }
  ++state_.round;
  aggregate();
  return state_.current_x;
}

double AggregatingLearner::mean_expert_log_wealth() const {
  const double top =
      *std::max_element(state_.log_weights.begin(), state_.log_weights.end());
  CompensatedSum total;
  for (double lw : state_.log_weights) total.add(std::exp(lw - top));
  return top + std::log(total.value()) -
         std::log(static_cast<double>(state_.log_weights.size()));
}

// ---------------------------------------------------------------------------

std::unique_ptr<Learner> make_learner(AlgoKind kind, std::size_t d,
                                      const LearnerOptions& options) {
  switch (kind) {
    case AlgoKind::kGradualVariation:
      return std::make_unique<GradualVariationLearner>(d);
    case AlgoKind::kSmallLoss:
      return std::make_unique<SmallLossLearner>(d);
    case AlgoKind::kAverageOptimism:
      return std::make_unique<AverageOptimismLearner>(d, options.eta);
    case AlgoKind::kAggregating:
      return std::make_unique<AggregatingLearner>(d, options.horizon);
  }
  throw ConfigError("make_learner: unknown algorithm kind");
}

}  // namespace ops_ftrl
