#include "rexp/resetting.hpp"

#include <cmath>

namespace rexp {

void ResetPolicy::validate() const {
  if (period < 2) throw std::invalid_argument("reset policy: period must be >= 2");
  if (phase < 0 || phase >= period) {
    throw std::invalid_argument("reset policy: phase must lie in [0, period)");
  }
}

bool should_reset(const ResetPolicy& policy, std::int64_t t) {
  if (t < 1) throw std::invalid_argument("should_reset: time must be >= 1");
  const std::int64_t r = t % policy.period;
  return policy.phase == 0 ? r == 0 : r == policy.phase;
}

std::int64_t optimal_period(std::int64_t T, std::int64_t C, double alpha) {
  if (T < 1 || C < 1 || C > T) throw std::invalid_argument("optimal_period: need 1 <= C <= T");
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw std::invalid_argument("optimal_period: alpha must be in (0, 0.5]");
  }
  const double raw = std::pow(alpha * static_cast<double>(T) / static_cast<double>(C),
                              1.0 / (1.0 + alpha));
  std::int64_t period = std::llround(raw);
  period = std::max<std::int64_t>(period, 2);
  period = std::min<std::int64_t>(period, std::max<std::int64_t>(T, 2));
  return period;
}

ResettingLearner::ResettingLearner(std::unique_ptr<Learner> inner, ResetPolicy policy)
    : inner_(std::move(inner)), policy_(policy) {
  if (!inner_) throw std::invalid_argument("resetting learner: inner learner required");
  policy_.validate();
}

double ResettingLearner::step(const LossFunction& loss) {
  if (loss.time_index != clock_ + 1) {
    throw sequencing_error("resetting learner: expected time index " + std::to_string(clock_ + 1) +
                           ", got " + std::to_string(loss.time_index));
  }
  LossFunction local = loss;
  local.time_index = inner_->steps_taken() + 1;
  const double incurred = inner_->step(local);
  ++clock_;
  if (should_reset(policy_, clock_)) inner_->reset();
  return incurred;
}

void ResettingLearner::reset() {
  inner_->reset();
  clock_ = 0;
}

}  // namespace rexp
