#pragma once

// Online portfolio selection algorithms built on the implicit optimistic
// log-barrier FTRL step.
//
//   GradualVariationLearner  hint = x_t (.) g_t, eta_t driven by V_t
//   SmallLossLearner         hint = 0, eta_t driven by sum ||g + alpha e||^2
//   AverageOptimismLearner   hint = running average of x_t (.) g_t, constant eta
//   AggregatingLearner       Vovk's aggregating algorithm over a grid of
//                            AverageOptimismLearner experts
//
// Every learner announces current(), receives one normalized price vector via
// update() and returns the next portfolio. Instances are single-threaded;
// distinct instances share nothing.

#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ops_ftrl/simplex.hpp"
#include "ops_ftrl/step_solver.hpp"

namespace ops_ftrl {

enum class AlgoKind { kGradualVariation, kSmallLoss, kAverageOptimism, kAggregating };

// "gv", "smallloss", "avg", "aa".
std::string_view to_string(AlgoKind kind) noexcept;
// ConfigError on unknown names.
AlgoKind parse_algo_kind(std::string_view name);

// Largest constant learning rate accepted by AverageOptimismLearner: 1/(2 sqrt 2).
inline constexpr double kMaxAverageEta = std::numbers::sqrt2 / 4.0;
// eta_0 = eta_1 of the gradual-variation schedule: 1/(16 sqrt 2).
inline constexpr double kGradualVariationEta0 = std::numbers::sqrt2 / 32.0;

// Per-coordinate compensated running sum.
class CompensatedVector {
 public:
  explicit CompensatedVector(std::size_t d) : sums_(d) {}
  void add(std::span<const double> v);
  void add_scaled(double scale, std::span<const double> v);
  Vector value() const;
  std::size_t size() const noexcept { return sums_.size(); }

 private:
  std::vector<CompensatedSum> sums_;
};

// Running minimum over p of sum_t ||m_t - p||^2, i.e. the scatter of the m_t
// about their mean (Welford's update per coordinate).
class ScatterAccumulator {
 public:
  explicit ScatterAccumulator(std::size_t d) : mean_(d, 0.0), m2_(d) {}
  void add(std::span<const double> m);
  double value() const;
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_ = 0;
  Vector mean_;
  std::vector<CompensatedSum> m2_;
};

class Learner {
 public:
  virtual ~Learner() = default;

  virtual AlgoKind kind() const noexcept = 0;
  virtual std::size_t dimension() const noexcept = 0;
  // Rounds processed so far; current() is x_{round()+1}.
  virtual std::size_t round() const noexcept = 0;
  virtual const Portfolio& current() const noexcept = 0;
  // Consume a_t for t = round()+1 and return x_{t+1}.
  virtual const Portfolio& update(const PriceVector& a) = 0;
  // Learning rate used for the most recent step; none for the aggregate.
  virtual std::optional<double> learning_rate() const noexcept = 0;
  // The data-dependent statistic this learner adapts to, through round().
  virtual double running_statistic() const noexcept = 0;
  // Newton iteration counts of every step solved in the most recent update.
  virtual std::span<const std::size_t> last_newton_iterations() const noexcept = 0;
};

struct GvState {
  std::size_t round = 0;
  CompensatedVector g_cum{0};
  std::optional<Portfolio> prev_x;          // x_{t-1}
  std::optional<PriceVector> prev_price;    // a_{t-1}
  Vector prev_mult_grad;                    // p_{t+1} = x_t (.) g_t
  CompensatedSum v_stat;                    // V_t
  double last_v_increment = 0.0;
  double eta = kGradualVariationEta0;
  Portfolio current_x = Portfolio::uniform(1);
};

class GradualVariationLearner final : public Learner {
 public:
  explicit GradualVariationLearner(std::size_t d);

  AlgoKind kind() const noexcept override { return AlgoKind::kGradualVariation; }
  std::size_t dimension() const noexcept override { return d_; }
  std::size_t round() const noexcept override { return state_.round; }
  const Portfolio& current() const noexcept override { return state_.current_x; }
  const Portfolio& update(const PriceVector& a) override;
  std::optional<double> learning_rate() const noexcept override { return state_.eta; }
  double running_statistic() const noexcept override { return state_.v_stat.value(); }
  std::span<const std::size_t> last_newton_iterations() const noexcept override {
    return {&last_iters_, round() == 0 ? 0u : 1u};
  }

  const GvState& state() const noexcept { return state_; }

  // eta_t for t >= 2 given V_t.
  static double schedule(std::size_t d, double v_stat);

 private:
  std::size_t d_;
  GvState state_;
  std::size_t last_iters_ = 0;
};

struct SmallLossState {
  std::size_t round = 0;
  CompensatedVector g_cum{0};
  CompensatedSum stat;  // sum_t ||g_t + alpha_t e||^2_{x_t,*}
  double last_increment = 0.0;
  double last_alpha = 0.0;
  double eta = 0.0;
  Portfolio current_x = Portfolio::uniform(1);
};

class SmallLossLearner final : public Learner {
 public:
  explicit SmallLossLearner(std::size_t d);

  AlgoKind kind() const noexcept override { return AlgoKind::kSmallLoss; }
  std::size_t dimension() const noexcept override { return d_; }
  std::size_t round() const noexcept override { return state_.round; }
  const Portfolio& current() const noexcept override { return state_.current_x; }
  const Portfolio& update(const PriceVector& a) override;
  std::optional<double> learning_rate() const noexcept override { return state_.eta; }
  double running_statistic() const noexcept override { return state_.stat.value(); }
  std::span<const std::size_t> last_newton_iterations() const noexcept override {
    return {&last_iters_, round() == 0 ? 0u : 1u};
  }

  const SmallLossState& state() const noexcept { return state_; }

  // sqrt(d) / sqrt(4d + 1 + stat). At stat = 0 this is also the eta_0 used
  // before any data arrives.
  static double schedule(std::size_t d, double stat);

 private:
  std::size_t d_;
  SmallLossState state_;
  std::size_t last_iters_ = 0;
};

struct AvgOptState {
  std::size_t round = 0;
  CompensatedVector g_cum{0};
  double eta = 0.0;
  CompensatedVector weighted_sum{0};  // sum_tau eta x_tau (.) g_tau
  CompensatedSum eta_sum;             // eta_{0:t-1}
  Vector hint;                        // p_{t+1}
  ScatterAccumulator scatter{0};      // Q_t of this learner's own iterates
  Portfolio current_x = Portfolio::uniform(1);
};

class AverageOptimismLearner final : public Learner {
 public:
  // ConfigError unless 0 < eta <= 1/(2 sqrt 2).
  AverageOptimismLearner(std::size_t d, double eta);

  AlgoKind kind() const noexcept override { return AlgoKind::kAverageOptimism; }
  std::size_t dimension() const noexcept override { return d_; }
  std::size_t round() const noexcept override { return state_.round; }
  const Portfolio& current() const noexcept override { return state_.current_x; }
  const Portfolio& update(const PriceVector& a) override;
  std::optional<double> learning_rate() const noexcept override { return state_.eta; }
  double running_statistic() const noexcept override { return state_.scatter.value(); }
  std::span<const std::size_t> last_newton_iterations() const noexcept override {
    return {&last_iters_, round() == 0 ? 0u : 1u};
  }

  const AvgOptState& state() const noexcept { return state_; }

 private:
  std::size_t d_;
  AvgOptState state_;
  std::size_t last_iters_ = 0;
};

struct AaState {
  std::size_t horizon = 0;
  std::size_t round = 0;
  std::vector<AverageOptimismLearner> experts;
  std::vector<double> expert_etas;
  // log w^(k) = sum_tau log <a_tau, x_tau^(k)>; the weights themselves
  // underflow on long horizons.
  std::vector<double> log_weights;
  CompensatedSum log_wealth;  // sum_tau log <a_tau, x_tau> of the aggregate
  ScatterAccumulator scatter{0};
  Portfolio current_x = Portfolio::uniform(1);
};

class AggregatingLearner final : public Learner {
 public:
  // ConfigError unless horizon >= 2.
  AggregatingLearner(std::size_t d, std::size_t horizon);

  AlgoKind kind() const noexcept override { return AlgoKind::kAggregating; }
  std::size_t dimension() const noexcept override { return d_; }
  std::size_t round() const noexcept override { return state_.round; }
  const Portfolio& current() const noexcept override { return state_.current_x; }
  // UsageError once horizon rounds have been consumed.
  const Portfolio& update(const PriceVector& a) override;
  std::optional<double> learning_rate() const noexcept override { return std::nullopt; }
  double running_statistic() const noexcept override { return state_.scatter.value(); }
  std::span<const std::size_t> last_newton_iterations() const noexcept override {
    return last_iters_;
  }

  const AaState& state() const noexcept { return state_; }

  // K = 1 + ceil(log2 T).
  static std::size_t expert_count(std::size_t horizon);
  // eta^(k) = sqrt(d log T) / (2 sqrt(2 d log T) + sqrt(2^k)), k = 1..K.
  static double expert_eta(std::size_t d, std::size_t horizon, std::size_t k);

  // log((1/K) sum_k prod_tau <a_tau, x_tau^(k)>), the log of the mean expert
  // wealth. Equals state().log_wealth.value() up to rounding.
  double mean_expert_log_wealth() const;

 private:
  void aggregate();

  std::size_t d_;
  AaState state_;
  std::vector<std::size_t> last_iters_;
};

struct LearnerOptions {
  double eta = kMaxAverageEta;  // avg only
  std::size_t horizon = 0;      // aa only
};

std::unique_ptr<Learner> make_learner(AlgoKind kind, std::size_t d,
                                      const LearnerOptions& options = {});

}  // namespace ops_ftrl
