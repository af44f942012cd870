#include "rexp/learner.hpp"

#include <algorithm>
#include <cmath>

namespace rexp {

Domain Domain::box(std::size_t dim, double lo, double hi) {
  Domain d;
  d.bounds.assign(dim, Interval{lo, hi});
  d.validate();
  return d;
}

double Domain::diameter() const {
  double sq = 0.0;
  for (const auto& iv : bounds) sq += (iv.hi - iv.lo) * (iv.hi - iv.lo);
  return std::sqrt(sq);
}

bool Domain::contains(const Belief& b, double tol) const {
  if (b.size() != bounds.size()) return false;
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    if (b[k] < bounds[k].lo - tol || b[k] > bounds[k].hi + tol) return false;
  }
  return true;
}

Belief Domain::midpoint() const {
  Belief b(bounds.size());
  for (std::size_t k = 0; k < bounds.size(); ++k) b[k] = 0.5 * (bounds[k].lo + bounds[k].hi);
  return b;
}

Belief Domain::clamp(Belief b) const {
  for (std::size_t k = 0; k < bounds.size(); ++k) b[k] = std::clamp(b[k], bounds[k].lo, bounds[k].hi);
  return b;
}

void Domain::validate() const {
  if (bounds.empty()) throw std::invalid_argument("domain: dimension must be positive");
  for (const auto& iv : bounds) {
    if (!(iv.lo < iv.hi)) throw std::invalid_argument("domain: bounds must satisfy lo < hi");
  }
}

void BaseLearnerSpec::validate() const {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw std::invalid_argument("base learner spec: alpha must be in (0, 0.5]");
  }
  if (regret_constant < 0.0) throw std::invalid_argument("base learner spec: K must be nonnegative");
  domain.validate();
}

OgdLearner::OgdLearner(Domain domain, OgdConfig cfg) : domain_(std::move(domain)), cfg_(cfg) {
  domain_.validate();
  if (cfg_.gradient_bound <= 0.0) throw std::invalid_argument("ogd: gradient bound must be positive");
  step_scale_ = cfg_.step_scale > 0.0 ? cfg_.step_scale : domain_.diameter();
  x_ = domain_.midpoint();
}

double OgdLearner::step(const LossFunction& loss) {
  if (loss.time_index != t_ + 1) {
    throw sequencing_error("ogd: expected time index " + std::to_string(t_ + 1) + ", got " +
                           std::to_string(loss.time_index));
  }
  if (!loss.has_gradient()) throw std::invalid_argument("ogd: loss carries no gradient");
  const double incurred = loss.evaluate(x_);
  const Belief g = loss.gradient(x_);
  if (g.size() != x_.size()) throw std::invalid_argument("ogd: gradient dimension mismatch");
  const double eta = step_scale_ / (cfg_.gradient_bound * std::sqrt(static_cast<double>(t_ + 1)));
  for (std::size_t k = 0; k < x_.size(); ++k) x_[k] -= eta * g[k];
  x_ = domain_.clamp(std::move(x_));
  ++t_;
  ++lifetime_steps_;
  return incurred;
}

void OgdLearner::reset() {
  x_ = domain_.midpoint();
  t_ = 0;
}

BaseLearnerSpec OgdLearner::spec() const {
  return BaseLearnerSpec{"ogd", 0.5, 1.5 * step_scale_ * cfg_.gradient_bound, domain_};
}

std::vector<Belief> belief_grid(const Domain& domain, int resolution) {
  domain.validate();
  if (resolution < 2) throw std::invalid_argument("belief grid: resolution must be >= 2");
  const std::size_t dim = domain.dimension();
  std::vector<Belief> grid;
  std::vector<int> idx(dim, 0);
  Belief point(dim);
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) {
      const auto& iv = domain.bounds[k];
      point[k] = iv.lo + (iv.hi - iv.lo) * (static_cast<double>(idx[k]) / (resolution - 1));
    }
    grid.push_back(point);
    // lexicographic odometer, last coordinate fastest
    std::size_t k = dim;
    while (k > 0) {
      --k;
      if (++idx[k] < resolution) break;
      idx[k] = 0;
      if (k == 0) return grid;
    }
  }
}

GridHedgeLearner::GridHedgeLearner(Domain domain, GridHedgeConfig cfg)
    : domain_(std::move(domain)), cfg_(cfg) {
  domain_.validate();
  if (cfg_.points_per_dim < 2) throw std::invalid_argument("grid hedge: need >= 2 points per dim");
  grid_ = belief_grid(domain_, cfg_.points_per_dim);
  cumulative_loss_.assign(grid_.size(), 0.0);
}

std::vector<double> GridHedgeLearner::weights() const {
  const double eta = std::sqrt(8.0 * std::log(static_cast<double>(grid_.size())) /
                               static_cast<double>(std::max<std::int64_t>(t_ + 1, 1)));
  const double min_loss = *std::min_element(cumulative_loss_.begin(), cumulative_loss_.end());
  std::vector<double> w(grid_.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    w[i] = std::exp(-eta * (cumulative_loss_[i] - min_loss));
    sum += w[i];
  }
  for (double& wi : w) wi /= sum;
  return w;
}

Belief GridHedgeLearner::predict() const {
  const std::vector<double> w = weights();
  Belief b(domain_.dimension(), 0.0);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    for (std::size_t k = 0; k < b.size(); ++k) b[k] += w[i] * grid_[i][k];
  }
  return b;
}

double GridHedgeLearner::step(const LossFunction& loss) {
  if (loss.time_index != t_ + 1) {
    throw sequencing_error("grid hedge: expected time index " + std::to_string(t_ + 1) + ", got " +
                           std::to_string(loss.time_index));
  }
  const double incurred = loss.evaluate(predict());
  for (std::size_t i = 0; i < grid_.size(); ++i) cumulative_loss_[i] += loss.evaluate(grid_[i]);
  ++t_;
  ++lifetime_steps_;
  return incurred;
}

void GridHedgeLearner::reset() {
  std::fill(cumulative_loss_.begin(), cumulative_loss_.end(), 0.0);
  t_ = 0;
}

BaseLearnerSpec GridHedgeLearner::spec() const {
  return BaseLearnerSpec{"grid", 0.5, 2.0 * std::sqrt(std::log(static_cast<double>(grid_.size()))),
                         domain_};
}

}  // namespace rexp
