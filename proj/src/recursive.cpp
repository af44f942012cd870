#include "rexp/recursive.hpp"

#include <cmath>

namespace rexp {

RecursiveMixture::RecursiveMixture(std::int64_t horizon, LearnerFactory base_factory)
    : horizon_(horizon),
      first_half_(horizon / 2),
      eta_(std::sqrt(1.0 / static_cast<double>(horizon))),
      base_factory_(std::move(base_factory)) {
  if (horizon_ < 1) throw std::invalid_argument("recursive mixture: horizon must be >= 1");
  if (!base_factory_) throw std::invalid_argument("recursive mixture: base factory required");
  base_ = base_factory_();
  if (horizon_ >= 2) {
    child_ = std::make_unique<RecursiveMixture>(first_half_, base_factory_);
    p_base_ = 0.5;
    p_child_ = 0.5;
  }
}

std::unique_ptr<RecursiveMixture> build_recursive(std::int64_t T, LearnerFactory base_factory) {
  return std::make_unique<RecursiveMixture>(T, std::move(base_factory));
}

Belief RecursiveMixture::predict() const {
  Belief b = base_->predict();
  if (!child_) return b;
  const Belief c = child_->predict();
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = p_base_ * b[k] + p_child_ * c[k];
  return b;
}

Belief RecursiveMixture::sample(std::mt19937_64& rng) const {
  if (!child_) return base_->predict();
  const double u = uniform01(rng);
  return u < p_base_ ? base_->sample(rng) : child_->sample(rng);
}

double RecursiveMixture::expected_loss(const LossFunction& loss) const {
  const double base_loss = base_->expected_loss(loss);
  if (!child_) return base_loss;
  return p_base_ * base_loss + p_child_ * child_->expected_loss(loss);
}

double RecursiveMixture::step(const LossFunction& loss) {
  if (clock_ >= horizon_) {
    throw horizon_exhausted("recursive mixture: stepped past horizon " + std::to_string(horizon_));
  }
  if (loss.time_index != clock_ + 1) {
    throw sequencing_error("recursive mixture: expected time index " + std::to_string(clock_ + 1) +
                           ", got " + std::to_string(loss.time_index));
  }
  const double base_loss = base_->step(loss);
  double expected = base_loss;
  if (child_) {
    LossFunction child_loss = loss;
    child_loss.time_index = child_->steps_taken() + 1;
    const double child_expected = child_->step(child_loss);
    expected = p_base_ * base_loss + p_child_ * child_expected;

    double u0 = p_base_ * std::exp(-eta_ * base_loss);
    double u1 = p_child_ * std::exp(-eta_ * child_expected);
    if (u0 < 1e-300) {
      u0 = 1e-300;
      ++underflow_events_;
    }
    if (u1 < 1e-300) {
      u1 = 1e-300;
      ++underflow_events_;
    }
    p_base_ = u0 / (u0 + u1);
    p_child_ = u1 / (u0 + u1);
  }
  ++clock_;
  if (child_ && !second_half_ && clock_ == first_half_) child_rollover();
  return expected;
}

void RecursiveMixture::child_rollover() {
  if (!child_) throw std::logic_error("child rollover: leaf node has no child");
  if (second_half_) throw std::logic_error("child rollover: already in second half");
  if (clock_ != first_half_) {
    throw std::logic_error("child rollover: only legal at local clock " +
                           std::to_string(first_half_));
  }
  retired_child_steps_ += child_->base_step_count();
  child_ = std::make_unique<RecursiveMixture>(horizon_ - first_half_, base_factory_);
  second_half_ = true;
}

void RecursiveMixture::reset() {
  base_->reset();
  if (horizon_ >= 2) {
    retired_child_steps_ += child_->base_step_count();
    child_ = std::make_unique<RecursiveMixture>(first_half_, base_factory_);
    p_base_ = 0.5;
    p_child_ = 0.5;
  }
  second_half_ = false;
  clock_ = 0;
}

std::int64_t RecursiveMixture::active_learner_count() const {
  return 1 + (child_ ? child_->active_learner_count() : 0);
}

std::uint64_t RecursiveMixture::base_step_count() const {
  return base_->base_step_count() + retired_child_steps_ +
         (child_ ? child_->base_step_count() : 0);
}

}  // namespace rexp
