#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "rexp/learner.hpp"

namespace rexp {

struct BlockPos {
  std::int64_t index;   // i, block covers global times [2^i, 2^(i+1) - 1]
  std::int64_t offset;  // 1-based position within the block
};

/// Block containing global time t >= 1; the blocks of length 2^i partition
/// the time axis.
BlockPos block_of(std::int64_t t);

/// Unknown-horizon wrapper: runs a fresh known-horizon learner on successive
/// blocks of length 2^i. No state crosses a block boundary.
class DoublingLearner : public Learner {
 public:
  using HorizonFactory = std::function<std::unique_ptr<Learner>(std::int64_t)>;

  explicit DoublingLearner(HorizonFactory factory);

  Belief predict() const override { return inner_->predict(); }
  Belief sample(std::mt19937_64& rng) const override { return inner_->sample(rng); }
  double step(const LossFunction& loss) override;
  double expected_loss(const LossFunction& loss) const override {
    return inner_->expected_loss(loss);
  }
  void reset() override;
  std::int64_t steps_taken() const override { return clock_; }
  std::int64_t active_learner_count() const override { return inner_->active_learner_count(); }
  std::uint64_t base_step_count() const override;
  std::optional<std::size_t> expert_count() const override { return inner_->expert_count(); }

  std::int64_t current_block() const { return block_; }
  const Learner& inner() const { return *inner_; }

 private:
  HorizonFactory factory_;
  std::unique_ptr<Learner> inner_;
  std::int64_t clock_ = 0;
  std::int64_t block_ = 0;
  std::uint64_t retired_steps_ = 0;
};

}  // namespace rexp
