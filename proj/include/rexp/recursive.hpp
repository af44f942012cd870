#pragma once

#include <cstdint>
#include <memory>

#include "rexp/learner.hpp"
#include "rexp/mergers.hpp"

namespace rexp {

// Two-expert recursive mixture: a base learner running the full horizon
// against a half-horizon copy of the same construction, replaced by a fresh
// copy at mid-horizon. Weight rate sqrt(1/tau) per node; each node propagates
// its expected loss upward so the whole tree prices itself with one pass.
//
// Only the active chain is ever materialized (one child per node), so live
// state stays at one base learner per level.
class RecursiveMixture : public Learner {
 public:
  RecursiveMixture(std::int64_t horizon, LearnerFactory base_factory);

  Belief predict() const override;
  Belief sample(std::mt19937_64& rng) const override;
  double step(const LossFunction& loss) override;
  double expected_loss(const LossFunction& loss) const override;
  void reset() override;
  std::int64_t steps_taken() const override { return clock_; }
  std::int64_t active_learner_count() const override;
  std::uint64_t base_step_count() const override;
  std::optional<std::int64_t> horizon() const override { return horizon_; }

  /// Swaps in a fresh half-horizon child; legal exactly once per node, at
  /// local clock floor(tau/2). step() performs this internally.
  void child_rollover();

  bool is_leaf() const { return child_ == nullptr; }
  bool in_second_half() const { return second_half_; }
  double base_weight() const { return p_base_; }
  double child_weight() const { return p_child_; }
  double rate() const { return eta_; }
  const Learner& base_learner() const { return *base_; }
  const RecursiveMixture* child() const { return child_.get(); }

 private:
  std::int64_t horizon_;
  std::int64_t first_half_;
  double eta_;
  LearnerFactory base_factory_;
  std::unique_ptr<Learner> base_;
  std::unique_ptr<RecursiveMixture> child_;
  double p_base_ = 1.0;
  double p_child_ = 0.0;
  bool second_half_ = false;
  std::int64_t clock_ = 0;
  std::uint64_t retired_child_steps_ = 0;
  std::uint64_t underflow_events_ = 0;
};

std::unique_ptr<RecursiveMixture> build_recursive(std::int64_t T, LearnerFactory base_factory);

}  // namespace rexp
