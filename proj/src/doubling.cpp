#include "rexp/doubling.hpp"

#include <bit>

namespace rexp {

BlockPos block_of(std::int64_t t) {
  if (t < 1) throw std::invalid_argument("block_of: time must be >= 1");
  const std::int64_t i = std::bit_width(static_cast<std::uint64_t>(t)) - 1;
  return BlockPos{i, t - (std::int64_t{1} << i) + 1};
}

DoublingLearner::DoublingLearner(HorizonFactory factory) : factory_(std::move(factory)) {
  if (!factory_) throw std::invalid_argument("doubling learner: factory required");
  inner_ = factory_(1);
}

double DoublingLearner::step(const LossFunction& loss) {
  if (loss.time_index != clock_ + 1) {
    throw sequencing_error("doubling learner: expected time index " + std::to_string(clock_ + 1) +
                           ", got " + std::to_string(loss.time_index));
  }
  const BlockPos pos = block_of(clock_ + 1);
  if (pos.index != block_) {
    retired_steps_ += inner_->base_step_count();
    inner_ = factory_(std::int64_t{1} << pos.index);
    block_ = pos.index;
  }
  LossFunction local = loss;
  local.time_index = pos.offset;
  const double incurred = inner_->step(local);
  ++clock_;
  return incurred;
}

void DoublingLearner::reset() {
  retired_steps_ += inner_->base_step_count();
  inner_ = factory_(1);
  clock_ = 0;
  block_ = 0;
}

std::uint64_t DoublingLearner::base_step_count() const {
  return retired_steps_ + inner_->base_step_count();
}

}  // namespace rexp
