#include "rexp/mergers.hpp"

#include <bit>
#include <cmath>

namespace rexp {

namespace {

constexpr double kWeightFloor = 1e-300;

void check_losses(std::span<const double> losses, std::size_t expected) {
  if (losses.size() != expected) {
    throw std::invalid_argument("weight update: loss vector size mismatch");
  }
  for (const double l : losses) {
    if (!(l >= -1e-12 && l <= 1.0 + 1e-12)) {
      throw bounded_loss_violation("weight update: loss outside [0, 1]");
    }
  }
}

// Floors positive weights that underflowed, then normalizes. Exact zeros stay
// zero so that point-mass initializations are revived only by sharing.
void finalize_simplex(WeightVector& w, std::vector<double>& unnormalized) {
  double sum = 0.0;
  for (std::size_t i = 0; i < unnormalized.size(); ++i) {
    if (w.p[i] > 0.0 && unnormalized[i] < kWeightFloor) {
      unnormalized[i] = kWeightFloor;
      ++w.underflow_events;
    }
    sum += unnormalized[i];
  }
  if (!(sum > 0.0)) throw std::logic_error("weight update: all mass vanished");
  for (std::size_t i = 0; i < unnormalized.size(); ++i) w.p[i] = unnormalized[i] / sum;
}

}  // namespace

WeightVector WeightVector::uniform(std::size_t n, double eta) {
  if (n == 0) throw std::invalid_argument("weight vector: need at least one expert");
  WeightVector w;
  w.p.assign(n, 1.0 / static_cast<double>(n));
  w.eta = eta;
  return w;
}

WeightVector WeightVector::point_mass(std::size_t n, std::size_t index, double eta) {
  if (n == 0 || index >= n) throw std::invalid_argument("weight vector: bad point mass index");
  WeightVector w;
  w.p.assign(n, 0.0);
  w.p[index] = 1.0;
  w.eta = eta;
  return w;
}

void WeightVector::check_simplex(double tol) const {
  double sum = 0.0;
  for (const double pi : p) {
    if (pi < 0.0) throw std::logic_error("weight vector: negative weight");
    sum += pi;
  }
  if (std::abs(sum - 1.0) > tol) throw std::logic_error("weight vector: weights do not sum to 1");
}

void ew_update(WeightVector& w, std::span<const double> losses) {
  check_losses(losses, w.p.size());
  std::vector<double> u(w.p.size());
  for (std::size_t i = 0; i < w.p.size(); ++i) u[i] = w.p[i] * std::exp(-w.eta * losses[i]);
  finalize_simplex(w, u);
}

std::size_t sample_expert(const WeightVector& w, std::mt19937_64& rng) {
  return sample_index(w.p, rng);
}

double weighted_expected(std::span<const double> p, std::span<const double> losses) {
  if (p.size() != losses.size()) throw std::invalid_argument("weighted_expected: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += p[i] * losses[i];
  return acc;
}

std::size_t ceil_log2(std::int64_t T) {
  if (T < 2) throw std::invalid_argument("ceil_log2: T must be >= 2");
  return static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(T - 1)));
}

std::optional<std::size_t> reset_target(std::int64_t t, std::size_t expert_count) {
  if (t < 1) throw std::invalid_argument("reset_target: time must be >= 1");
  // t+1 = 2^(j-1) * odd, so j-1 is the number of trailing zero bits of t+1.
  const std::size_t j = static_cast<std::size_t>(std::countr_zero(static_cast<std::uint64_t>(t + 1))) + 1;
  if (j > expert_count) return std::nullopt;
  return j;
}

void shared_update(SharedWeights& sw, std::span<const double> losses, std::int64_t t) {
  check_losses(losses, sw.w.p.size());
  if (!(sw.sigma >= 0.0 && sw.sigma <= 1.0)) {
    throw std::invalid_argument("shared_update: sigma must lie in [0, 1]");
  }
  std::vector<double> u(sw.w.p.size());
  double exponentiated_mass = 0.0;
  for (std::size_t i = 0; i < sw.w.p.size(); ++i) {
    u[i] = sw.w.p[i] * std::exp(-sw.w.eta * losses[i]);
    exponentiated_mass += u[i];
  }
  const auto target = reset_target(t, sw.w.p.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double share = (target && *target == i + 1) ? sw.sigma * exponentiated_mass : 0.0;
    u[i] = (1.0 - sw.sigma) * u[i] + share;
  }
  finalize_simplex(sw.w, u);
}

namespace {

Belief weighted_belief(const std::vector<double>& p,
                       const std::vector<std::unique_ptr<ResettingLearner>>& experts) {
  Belief out(experts.front()->predict().size(), 0.0);
  for (std::size_t i = 0; i < experts.size(); ++i) {
    if (p[i] == 0.0) continue;
    const Belief b = experts[i]->predict();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[i] * b[k];
  }
  return out;
}

std::vector<std::unique_ptr<ResettingLearner>> make_reset_pool(std::size_t n,
                                                               const LearnerFactory& factory,
                                                               bool phased) {
  std::vector<std::unique_ptr<ResettingLearner>> experts;
  experts.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::int64_t period = std::int64_t{1} << i;
    const std::int64_t phase = phased ? period / 2 : 0;
    experts.push_back(std::make_unique<ResettingLearner>(factory(), ResetPolicy{period, phase}));
  }
  return experts;
}

std::vector<double> step_experts(std::vector<std::unique_ptr<ResettingLearner>>& experts,
                                 const LossFunction& loss) {
  std::vector<double> losses(experts.size());
  for (std::size_t i = 0; i < experts.size(); ++i) losses[i] = experts[i]->step(loss);
  return losses;
}

std::uint64_t pool_base_steps(const std::vector<std::unique_ptr<ResettingLearner>>& experts) {
  std::uint64_t total = 0;
  for (const auto& e : experts) total += e->base_step_count();
  return total;
}

std::int64_t pool_active(const std::vector<std::unique_ptr<ResettingLearner>>& experts) {
  std::int64_t total = 0;
  for (const auto& e : experts) total += e->active_learner_count();
  return total;
}

void check_time(std::int64_t clock, const LossFunction& loss, const char* who) {
  if (loss.time_index != clock + 1) {
    throw sequencing_error(std::string(who) + ": expected time index " + std::to_string(clock + 1) +
                           ", got " + std::to_string(loss.time_index));
  }
}

}  // namespace

ParallelMixture::ParallelMixture(std::int64_t T, const LearnerFactory& base_factory) : T_(T) {
  if (T < 2) throw std::invalid_argument("parallel mixture: T must be >= 2");
  const std::size_t n = ceil_log2(T);
  experts_ = make_reset_pool(n, base_factory, /*phased=*/false);
  const double eta = std::sqrt(std::log(static_cast<double>(n)) / static_cast<double>(T));
  w_ = WeightVector::uniform(n, eta);
}

std::unique_ptr<ParallelMixture> build_parallel(std::int64_t T, const LearnerFactory& base_factory) {
  return std::make_unique<ParallelMixture>(T, base_factory);
}

Belief ParallelMixture::predict() const { return weighted_belief(w_.p, experts_); }

Belief ParallelMixture::sample(std::mt19937_64& rng) const {
  return experts_[sample_expert(w_, rng) ]->sample(rng);
}

double ParallelMixture::step(const LossFunction& loss) {
  check_time(clock_, loss, "parallel mixture");
  const std::vector<double> losses = step_experts(experts_, loss);
  const double expected = weighted_expected(w_.p, losses);
  ew_update(w_, losses);
  ++clock_;
  return expected;
}

double ParallelMixture::expected_loss(const LossFunction& loss) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    if (w_.p[i] > 0.0) acc += w_.p[i] * experts_[i]->expected_loss(loss);
  }
  return acc;
}

void ParallelMixture::reset() {
  for (auto& e : experts_) e->reset();
  w_ = WeightVector::uniform(experts_.size(), w_.eta);
  clock_ = 0;
}

std::int64_t ParallelMixture::active_learner_count() const { return pool_active(experts_); }

std::uint64_t ParallelMixture::base_step_count() const { return pool_base_steps(experts_); }

SwitchingMixture::SwitchingMixture(std::int64_t C, std::int64_t T, const LearnerFactory& base_factory)
    : C_(C), T_(T) {
  if (T < 2) throw std::invalid_argument("switching mixture: T must be >= 2");
  if (C < 1 || C >= T) throw std::invalid_argument("switching mixture: need 1 <= C < T");
  const std::size_t n = ceil_log2(T);
  experts_ = make_reset_pool(n, base_factory, /*phased=*/true);
  const double ratio = static_cast<double>(C) / static_cast<double>(T);
  const double eta = std::sqrt(ratio * std::log(static_cast<double>(T) / static_cast<double>(C)));
  shared_.w = WeightVector::point_mass(n, 0, eta);
  shared_.sigma = ratio;
}

std::unique_ptr<SwitchingMixture> build_first_level(std::int64_t C, std::int64_t T,
                                                    const LearnerFactory& base_factory) {
  return std::make_unique<SwitchingMixture>(C, T, base_factory);
}

Belief SwitchingMixture::predict() const { return weighted_belief(shared_.w.p, experts_); }

Belief SwitchingMixture::sample(std::mt19937_64& rng) const {
  return experts_[sample_expert(shared_.w, rng)]->sample(rng);
}

double SwitchingMixture::step(const LossFunction& loss) {
  check_time(clock_, loss, "switching mixture");
  const std::vector<double> losses = step_experts(experts_, loss);
  const double expected = weighted_expected(shared_.w.p, losses);
  shared_update(shared_, losses, clock_ + 1);
  ++clock_;
  return expected;
}

double SwitchingMixture::expected_loss(const LossFunction& loss) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < experts_.size(); ++i) {
    if (shared_.w.p[i] > 0.0) acc += shared_.w.p[i] * experts_[i]->expected_loss(loss);
  }
  return acc;
}

void SwitchingMixture::set_share_rate(double sigma) {
  if (!(sigma >= 0.0 && sigma <= 1.0)) {
    throw std::invalid_argument("switching mixture: sigma must lie in [0, 1]");
  }
  shared_.sigma = sigma;
}

void SwitchingMixture::reset() {
  for (auto& e : experts_) e->reset();
  shared_.w = WeightVector::point_mass(experts_.size(), 0, shared_.w.eta);
  clock_ = 0;
}

std::int64_t SwitchingMixture::active_learner_count() const { return pool_active(experts_); }

std::uint64_t SwitchingMixture::base_step_count() const { return pool_base_steps(experts_); }

SwitchingEnsemble::SwitchingEnsemble(std::int64_t T, const LearnerFactory& base_factory) : T_(T) {
  if (T < 4) throw std::invalid_argument("switching ensemble: T must be >= 4");
  const std::size_t n = ceil_log2(T);
  pool_ = make_reset_pool(n, base_factory, /*phased=*/true);
  budgets_.reserve(n);
  inner_.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const std::int64_t budget = std::min<std::int64_t>(std::int64_t{1} << i, T - 1);
    budgets_.push_back(budget);
    const double ratio = static_cast<double>(budget) / static_cast<double>(T);
    const double eta = std::sqrt(ratio * std::log(static_cast<double>(T) / static_cast<double>(budget)));
    inner_.push_back(SharedWeights{WeightVector::point_mass(n, 0, eta), ratio});
  }
  const double outer_eta = std::sqrt(std::log(std::log(static_cast<double>(T))) / static_cast<double>(T));
  outer_ = WeightVector::uniform(n, outer_eta);
}

std::unique_ptr<SwitchingEnsemble> build_second_level(std::int64_t T,
                                                      const LearnerFactory& base_factory) {
  return std::make_unique<SwitchingEnsemble>(T, base_factory);
}

Belief SwitchingEnsemble::predict() const {
  Belief out(pool_.front()->predict().size(), 0.0);
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    if (outer_.p[i] == 0.0) continue;
    const Belief b = weighted_belief(inner_[i].w.p, pool_);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += outer_.p[i] * b[k];
  }
  return out;
}

Belief SwitchingEnsemble::sample(std::mt19937_64& rng) const {
  const std::size_t i = sample_expert(outer_, rng);
  const std::size_t j = sample_expert(inner_[i].w, rng);
  return pool_[j]->sample(rng);
}

double SwitchingEnsemble::step(const LossFunction& loss) {
  check_time(clock_, loss, "switching ensemble");
  const std::vector<double> losses = step_experts(pool_, loss);
  std::vector<double> inner_expected(inner_.size());
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    inner_expected[i] = weighted_expected(inner_[i].w.p, losses);
  }
  const double expected = weighted_expected(outer_.p, inner_expected);
  for (std::size_t i = 0; i < inner_.size(); ++i) shared_update(inner_[i], losses, clock_ + 1);
  ew_update(outer_, inner_expected);
  ++clock_;
  return expected;
}

double SwitchingEnsemble::expected_loss(const LossFunction& loss) const {
  std::vector<double> expert_losses(pool_.size());
  for (std::size_t j = 0; j < pool_.size(); ++j) expert_losses[j] = pool_[j]->expected_loss(loss);
  double acc = 0.0;
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    if (outer_.p[i] > 0.0) acc += outer_.p[i] * weighted_expected(inner_[i].w.p, expert_losses);
  }
  return acc;
}

void SwitchingEnsemble::reset() {
  for (auto& e : pool_) e->reset();
  for (std::size_t i = 0; i < inner_.size(); ++i) {
    inner_[i].w = WeightVector::point_mass(pool_.size(), 0, inner_[i].w.eta);
  }
  outer_ = WeightVector::uniform(inner_.size(), outer_.eta);
  clock_ = 0;
}

std::int64_t SwitchingEnsemble::active_learner_count() const { return pool_active(pool_); }

std::uint64_t SwitchingEnsemble::base_step_count() const { return pool_base_steps(pool_); }

}  // namespace rexp
