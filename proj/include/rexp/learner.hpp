#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rexp/rng.hpp"

namespace rexp {

/// A belief is the point a learner plays each round, one coordinate per
/// dimension of the decision space.
using Belief = std::vector<double>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Axis-aligned box the beliefs live in.
struct Domain {
  std::vector<Interval> bounds;

  static Domain unit_interval() { return Domain{{Interval{0.0, 1.0}}}; }
  static Domain box(std::size_t dim, double lo, double hi);

  std::size_t dimension() const { return bounds.size(); }
  double diameter() const;  // Euclidean
  bool contains(const Belief& b, double tol = 1e-12) const;
  Belief midpoint() const;
  Belief clamp(Belief b) const;
  void validate() const;
};

/// One round of feedback: evaluates any belief to a loss in [0, 1] and may
/// carry a (sub)gradient as auxiliary information.
struct LossFunction {
  std::int64_t time_index = 0;
  std::function<double(const Belief&)> evaluate;
  std::function<Belief(const Belief&)> gradient;  // empty when unavailable

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

class sequencing_error : public std::logic_error {
  using std::logic_error::logic_error;
};

class horizon_exhausted : public std::logic_error {
  using std::logic_error::logic_error;
};

class bounded_loss_violation : public std::domain_error {
  using std::domain_error::domain_error;
};

/// Declarative description of a base learner: its decision space and the
/// static-regret guarantee it claims, R(T) <= K * T^(1-alpha).
struct BaseLearnerSpec {
  std::string name;
  double alpha = 0.5;
  double regret_constant = 0.0;  // K
  Domain domain = Domain::unit_interval();

  void validate() const;
};

/// Contract every layer satisfies, from bare gradient steppers to nested
/// mixtures.
///
/// step() consumes one round of feedback and returns the (expected) loss the
/// learner incurred at its pre-update state; loss.time_index must equal
/// steps_taken() + 1. Wrappers that restart inner learners relabel the time
/// index so each layer always sees consecutive local times.
///
/// reset() restores the learning state of a freshly constructed learner.
/// Instrumentation counters (base_step_count) are lifetime totals and survive
/// resets.
class Learner {
 public:
  virtual ~Learner() = default;

  /// Current belief before feedback; mixtures report the probability-weighted
  /// average of their experts' beliefs. Must not mutate state.
  virtual Belief predict() const = 0;

  /// Randomized belief draw; deterministic learners return predict().
  virtual Belief sample(std::mt19937_64& rng) const {
    (void)rng;
    return predict();
  }

  virtual double step(const LossFunction& loss) = 0;

  /// Loss this learner would incur on `loss` without mutating anything.
  /// Mixtures return the expectation over their sampling distribution.
  virtual double expected_loss(const LossFunction& loss) const {
    return loss.evaluate(predict());
  }

  virtual void reset() = 0;

  /// Steps since construction or the last reset.
  virtual std::int64_t steps_taken() const = 0;

  /// Base learners currently instantiated underneath this layer.
  virtual std::int64_t active_learner_count() const { return 1; }

  /// Lifetime count of base-learner updates performed under this layer.
  virtual std::uint64_t base_step_count() const = 0;

  /// Declared horizon, when construction fixed one.
  virtual std::optional<std::int64_t> horizon() const { return std::nullopt; }

  /// Number of experts in the top mixture layer, when there is one.
  virtual std::optional<std::size_t> expert_count() const { return std::nullopt; }
};

using LearnerFactory = std::function<std::unique_ptr<Learner>()>;

/// Projected online gradient descent on a box, step size
/// step_scale / (gradient_bound * sqrt(t)) with t counted since the last
/// reset. Requires losses that carry gradients.
struct OgdConfig {
  double step_scale = 0.0;      // 0 = use the domain diameter
  double gradient_bound = 2.0;  // covers normalized quadratics on the unit box
};

class OgdLearner : public Learner {
 public:
  explicit OgdLearner(Domain domain, OgdConfig cfg = {});

  Belief predict() const override { return x_; }
  double step(const LossFunction& loss) override;
  void reset() override;
  std::int64_t steps_taken() const override { return t_; }
  std::uint64_t base_step_count() const override { return lifetime_steps_; }

  BaseLearnerSpec spec() const;
  const Domain& domain() const { return domain_; }

 private:
  Domain domain_;
  OgdConfig cfg_;
  double step_scale_;
  Belief x_;
  std::int64_t t_ = 0;
  std::uint64_t lifetime_steps_ = 0;
};

/// Exponential weighting over a fixed finite grid of beliefs; predicts the
/// weight-averaged grid point. Anytime learning rate sqrt(8 ln M / t) over the
/// M grid points. Needs only loss evaluations, no gradients.
struct GridHedgeConfig {
  int points_per_dim = 33;
};

class GridHedgeLearner : public Learner {
 public:
  explicit GridHedgeLearner(Domain domain, GridHedgeConfig cfg = {});

  Belief predict() const override;
  double step(const LossFunction& loss) override;
  void reset() override;
  std::int64_t steps_taken() const override { return t_; }
  std::uint64_t base_step_count() const override { return lifetime_steps_; }

  BaseLearnerSpec spec() const;
  const std::vector<Belief>& grid() const { return grid_; }
  std::vector<double> weights() const;

 private:
  Domain domain_;
  GridHedgeConfig cfg_;
  std::vector<Belief> grid_;
  std::vector<double> cumulative_loss_;
  std::int64_t t_ = 0;
  std::uint64_t lifetime_steps_ = 0;
};

/// Grid of beliefs covering `domain` with `resolution` points per coordinate,
/// enumerated in lexicographic coordinate order.
std::vector<Belief> belief_grid(const Domain& domain, int resolution);

}  // namespace rexp
