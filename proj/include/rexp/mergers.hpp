#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rexp/learner.hpp"
#include "rexp/resetting.hpp"

namespace rexp {

// Mixture layers over periodically-reset learners.
//
// ParallelMixture    exponential weights over learners reset every 2^i.
// SwitchingMixture   probability-sharing (switching) weights over learners
//                    with period 2^i and first reset at 2^(i-1); the phased
//                    schedules jointly cover every time step.
// SwitchingEnsemble  exponential weights over switching-weight instances
//                    tuned for switch budgets 2^i, all sharing one expert
//                    pool so each base learner is stepped once per round.

/// Probability simplex over experts plus its exponential-weights rate.
struct WeightVector {
  std::vector<double> p;
  double eta = 0.0;
  /// Positive weights that underflowed below 1e-300 and were floored.
  std::uint64_t underflow_events = 0;

  static WeightVector uniform(std::size_t n, double eta);
  static WeightVector point_mass(std::size_t n, std::size_t index, double eta);
  std::size_t size() const { return p.size(); }
  void check_simplex(double tol = 1e-9) const;
};

/// Multiplies each weight by exp(-eta * loss) and renormalizes.
/// Losses must lie in [0, 1].
void ew_update(WeightVector& w, std::span<const double> losses);

/// Index drawn from the weight distribution; consumes one uniform draw.
std::size_t sample_expert(const WeightVector& w, std::mt19937_64& rng);

/// Inner product of a weight simplex with a loss vector.
double weighted_expected(std::span<const double> p, std::span<const double> losses);

/// Smallest N with 2^N >= T (N >= 1 for T >= 2).
std::size_t ceil_log2(std::int64_t T);

/// The unique 1-based expert index j whose phased policy (period 2^j, phase
/// 2^(j-1)) resets at time t+1, or nullopt when j exceeds expert_count.
std::optional<std::size_t> reset_target(std::int64_t t, std::size_t expert_count);

/// Switching weights: exponential weighting plus a share rate sigma that
/// redirects mass toward the expert about to reset.
struct SharedWeights {
  WeightVector w;
  double sigma = 0.0;
};

/// p'_i = (1-sigma) p_i exp(-eta l_i) + sigma g_i, normalized, where g puts
/// the total exponentiated mass on reset_target(t) and is zero elsewhere.
void shared_update(SharedWeights& sw, std::span<const double> losses, std::int64_t t);

/// Exponential-weights mixture of ceil(log2 T) learners, the i-th reset every
/// 2^i steps, rate sqrt(ln N / T).
class ParallelMixture : public Learner {
 public:
  ParallelMixture(std::int64_t T, const LearnerFactory& base_factory);

  Belief predict() const override;
  Belief sample(std::mt19937_64& rng) const override;
  double step(const LossFunction& loss) override;
  double expected_loss(const LossFunction& loss) const override;
  void reset() override;
  std::int64_t steps_taken() const override { return clock_; }
  std::int64_t active_learner_count() const override;
  std::uint64_t base_step_count() const override;
  std::optional<std::int64_t> horizon() const override { return T_; }
  std::optional<std::size_t> expert_count() const override { return experts_.size(); }

  const WeightVector& weights() const { return w_; }
  const Learner& expert(std::size_t i) const { return *experts_[i]; }
  /// Pre-run tuning override.
  void set_rate(double eta) { w_.eta = eta; }

 private:
  std::int64_t T_;
  std::vector<std::unique_ptr<ResettingLearner>> experts_;
  WeightVector w_;
  std::int64_t clock_ = 0;
};

std::unique_ptr<ParallelMixture> build_parallel(std::int64_t T, const LearnerFactory& base_factory);

/// Switching mixture over phase-staggered reset learners, share rate C/T and
/// rate sqrt((C/T) ln(T/C)), initial mass all on expert 1.
class SwitchingMixture : public Learner {
 public:
  SwitchingMixture(std::int64_t C, std::int64_t T, const LearnerFactory& base_factory);

  Belief predict() const override;
  Belief sample(std::mt19937_64& rng) const override;
  double step(const LossFunction& loss) override;
  double expected_loss(const LossFunction& loss) const override;
  void reset() override;
  std::int64_t steps_taken() const override { return clock_; }
  std::int64_t active_learner_count() const override;
  std::uint64_t base_step_count() const override;
  std::optional<std::int64_t> horizon() const override { return T_; }
  std::optional<std::size_t> expert_count() const override { return experts_.size(); }

  const WeightVector& weights() const { return shared_.w; }
  double share_rate() const { return shared_.sigma; }
  std::int64_t switch_budget() const { return C_; }
  const Learner& expert(std::size_t i) const { return *experts_[i]; }
  /// Pre-run tuning overrides.
  void set_rate(double eta) { shared_.w.eta = eta; }
  void set_share_rate(double sigma);

 private:
  std::int64_t C_;
  std::int64_t T_;
  std::vector<std::unique_ptr<ResettingLearner>> experts_;
  SharedWeights shared_;
  std::int64_t clock_ = 0;
};

std::unique_ptr<SwitchingMixture> build_first_level(std::int64_t C, std::int64_t T,
                                                    const LearnerFactory& base_factory);

/// Outer exponential weights (rate sqrt(ln ln T / T)) over switching-weight
/// instances with budgets 2^i capped at T-1. The instances share one pool of
/// phased reset learners, so base-learner work stays one update per expert
/// per round.
class SwitchingEnsemble : public Learner {
 public:
  SwitchingEnsemble(std::int64_t T, const LearnerFactory& base_factory);

  Belief predict() const override;
  Belief sample(std::mt19937_64& rng) const override;
  double step(const LossFunction& loss) override;
  double expected_loss(const LossFunction& loss) const override;
  void reset() override;
  std::int64_t steps_taken() const override { return clock_; }
  std::int64_t active_learner_count() const override;
  std::uint64_t base_step_count() const override;
  std::optional<std::int64_t> horizon() const override { return T_; }
  std::optional<std::size_t> expert_count() const override { return inner_.size(); }

  const WeightVector& outer_weights() const { return outer_; }
  const SharedWeights& inner_weights(std::size_t i) const { return inner_[i]; }
  const std::vector<std::int64_t>& budgets() const { return budgets_; }
  const Learner& pooled_expert(std::size_t j) const { return *pool_[j]; }
  /// Pre-run tuning override for the outer layer.
  void set_outer_rate(double eta) { outer_.eta = eta; }

 private:
  std::int64_t T_;
  std::vector<std::unique_ptr<ResettingLearner>> pool_;
  std::vector<SharedWeights> inner_;
  std::vector<std::int64_t> budgets_;
  WeightVector outer_;
  std::int64_t clock_ = 0;
};

std::unique_ptr<SwitchingEnsemble> build_second_level(std::int64_t T,
                                                      const LearnerFactory& base_factory);

}  // namespace rexp
