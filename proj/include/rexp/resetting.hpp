#pragma once

#include <cstdint>
#include <memory>

#include "rexp/learner.hpp"

namespace rexp {

/// Periodic restart schedule. With phase 0 resets fire at multiples of the
/// period; with phase p > 0 they fire at times congruent to p mod period, the
/// first one at time p.
struct ResetPolicy {
  std::int64_t period = 2;
  std::int64_t phase = 0;

  void validate() const;
};

bool should_reset(const ResetPolicy& policy, std::int64_t t);

/// Reset period minimizing the tracking/learning tradeoff for a horizon T,
/// C segments, and a base learner with static-regret exponent 1 - alpha:
/// round((alpha T / C)^(1/(1+alpha))), clamped to [2, T].
std::int64_t optimal_period(std::int64_t T, std::int64_t C, double alpha);

/// Wraps any learner with a reset policy. Each round the wrapped learner
/// observes the loss first and is restarted afterwards when the policy fires,
/// so the loss at a reset time is still incurred by the pre-reset belief.
/// The inner learner is fed its own local time indices.
class ResettingLearner : public Learner {
 public:
  ResettingLearner(std::unique_ptr<Learner> inner, ResetPolicy policy);

  Belief predict() const override { return inner_->predict(); }
  Belief sample(std::mt19937_64& rng) const override { return inner_->sample(rng); }
  double step(const LossFunction& loss) override;
  double expected_loss(const LossFunction& loss) const override {
    return inner_->expected_loss(loss);
  }
  void reset() override;
  std::int64_t steps_taken() const override { return clock_; }
  std::int64_t active_learner_count() const override { return inner_->active_learner_count(); }
  std::uint64_t base_step_count() const override { return inner_->base_step_count(); }

  const ResetPolicy& policy() const { return policy_; }
  const Learner& inner() const { return *inner_; }

 private:
  std::unique_ptr<Learner> inner_;
  ResetPolicy policy_;
  std::int64_t clock_ = 0;
};

}  // namespace rexp
