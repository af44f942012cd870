#include "rexp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace rexp {

std::string to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::PiecewiseMeanSquared:
      return "piecewise-mean-squared";
    case EnvKind::PiecewiseExpertLinear:
      return "piecewise-expert-linear";
  }
  throw std::logic_error("unknown environment kind");
}

EnvKind parse_env_kind(const std::string& name) {
  if (name == "piecewise-mean-squared") return EnvKind::PiecewiseMeanSquared;
  if (name == "piecewise-expert-linear") return EnvKind::PiecewiseExpertLinear;
  throw std::invalid_argument("unknown environment kind: " + name);
}

std::vector<std::int64_t> SegmentSchedule::lengths() const {
  std::vector<std::int64_t> out(change_points.size());
  std::int64_t prev = 0;
  for (std::size_t c = 0; c < change_points.size(); ++c) {
    out[c] = change_points[c] - prev;
    prev = change_points[c];
  }
  return out;
}

int SegmentSchedule::segment_of(std::int64_t t) const {
  if (t < 1 || t > horizon()) throw std::out_of_range("segment_of: time outside horizon");
  const auto it = std::lower_bound(change_points.begin(), change_points.end(), t);
  return static_cast<int>(it - change_points.begin());
}

void SegmentSchedule::validate() const {
  if (change_points.empty()) throw std::invalid_argument("schedule: no segments");
  if (optima.size() != change_points.size()) {
    throw std::invalid_argument("schedule: one optimum required per segment");
  }
  std::int64_t prev = 0;
  for (const std::int64_t tc : change_points) {
    if (tc <= prev) throw std::invalid_argument("schedule: change points must strictly increase");
    prev = tc;
  }
  for (std::size_t c = 1; c < optima.size(); ++c) {
    if (optima[c] == optima[c - 1]) {
      throw std::invalid_argument("schedule: consecutive segment optima must differ");
    }
  }
}

void EnvironmentConfig::validate() const {
  domain.validate();
  if (horizon < 1) throw std::invalid_argument("invalid config: horizon T must be >= 1");
  if (changes < 1 || changes > horizon) {
    throw std::invalid_argument("invalid config: change count C must satisfy 1 <= C <= T");
  }
  if (noise < 0.0) throw std::invalid_argument("invalid config: noise must be nonnegative");
  if (normalization < 0.0) throw std::invalid_argument("invalid config: normalization must be >= 0");
  if (!boundaries.empty()) {
    if (static_cast<std::int64_t>(boundaries.size()) != changes - 1) {
      throw std::invalid_argument("invalid config: need C-1 explicit boundaries");
    }
    std::int64_t prev = 0;
    for (const std::int64_t b : boundaries) {
      if (b <= prev || b >= horizon) {
        throw std::invalid_argument("invalid config: boundaries must strictly increase within (0, T)");
      }
      prev = b;
    }
  }
}

double EnvironmentConfig::effective_normalizer() const {
  if (normalization > 0.0) return normalization;
  const double reach = domain.diameter() + noise * std::sqrt(static_cast<double>(domain.dimension()));
  return kind == EnvKind::PiecewiseMeanSquared ? reach * reach : reach;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Uniformly random C-1 element subset of {1..T-1}, sorted.
std::vector<std::int64_t> sample_boundaries(std::int64_t T, std::int64_t C, std::mt19937_64& rng) {
  const std::int64_t n = T - 1;
  const std::int64_t k = C - 1;
  std::vector<std::int64_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::int64_t{1});
  for (std::int64_t i = 0; i < k; ++i) {
    const std::int64_t j = i + static_cast<std::int64_t>(uniform_below(rng, n - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::int64_t> out(pool.begin(), pool.begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

// Segment optima drawn from the sixteenths of each coordinate interval, so
// every optimum lies on any comparator grid whose resolution is 16k+1.
Belief sample_segment_mean(const Domain& domain, std::mt19937_64& rng) {
  Belief mean(domain.dimension());
  for (std::size_t d = 0; d < domain.dimension(); ++d) {
    const auto& iv = domain.bounds[d];
    const auto tick = uniform_below(rng, 17);
    mean[d] = iv.lo + (iv.hi - iv.lo) * (static_cast<double>(tick) / 16.0);
  }
  return mean;
}

double squared_distance(const Belief& a, const Belief& b) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
  return sq;
}

}  // namespace

LossSequence generate(const EnvironmentConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng = make_stream(cfg.seed, kStreamEnvironment);

  SegmentSchedule schedule;
  schedule.change_points =
      cfg.boundaries.empty() && cfg.changes > 1 ? sample_boundaries(cfg.horizon, cfg.changes, rng)
                                                : cfg.boundaries;
  schedule.change_points.push_back(cfg.horizon);

  schedule.optima.reserve(cfg.changes);
  for (std::int64_t c = 0; c < cfg.changes; ++c) {
    Belief mean = sample_segment_mean(cfg.domain, rng);
    while (c > 0 && mean == schedule.optima.back()) mean = sample_segment_mean(cfg.domain, rng);
    schedule.optima.push_back(std::move(mean));
  }
  schedule.validate();

  const double norm = cfg.effective_normalizer();
  LossSequence seq;
  seq.schedule = schedule;
  seq.domain = cfg.domain;
  seq.normalizer = norm;
  seq.clamp_events = std::make_shared<std::atomic<std::uint64_t>>(0);
  seq.losses.reserve(cfg.horizon);

  const bool squared = cfg.kind == EnvKind::PiecewiseMeanSquared;
  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const Belief& mean = schedule.optima[schedule.segment_of(t)];
    Belief target(mean.size());
    for (std::size_t d = 0; d < mean.size(); ++d) {
      target[d] = mean[d] + cfg.noise * (2.0 * uniform01(rng) - 1.0);
    }
    auto clamps = seq.clamp_events;
    LossFunction loss;
    loss.time_index = t;
    if (squared) {
      loss.evaluate = [target, norm, clamps](const Belief& x) {
        const double raw = squared_distance(x, target) / norm;
        if (raw > 1.0) {
          clamps->fetch_add(1, std::memory_order_relaxed);
          return 1.0;
        }
        return raw;
      };
      loss.gradient = [target, norm](const Belief& x) {
        Belief g(x.size());
        for (std::size_t d = 0; d < x.size(); ++d) g[d] = 2.0 * (x[d] - target[d]) / norm;
        return g;
      };
    } else {
      loss.evaluate = [target, norm, clamps](const Belief& x) {
        const double raw = std::sqrt(squared_distance(x, target)) / norm;
        if (raw > 1.0) {
          clamps->fetch_add(1, std::memory_order_relaxed);
          return 1.0;
        }
        return raw;
      };
      loss.gradient = [target, norm](const Belief& x) {
        const double dist = std::sqrt(squared_distance(x, target));
        Belief g(x.size(), 0.0);
        if (dist > 0.0) {
          for (std::size_t d = 0; d < x.size(); ++d) g[d] = (x[d] - target[d]) / (dist * norm);
        }
        return g;
      };
    }
    seq.losses.push_back(std::move(loss));
  }
  return seq;
}

std::string serialize(const EnvironmentConfig& cfg) {
  std::ostringstream out;
  out << "kind=" << to_string(cfg.kind) << "\n";
  out << "T=" << cfg.horizon << "\n";
  out << "C=" << cfg.changes << "\n";
  out << "noise=" << format_double(cfg.noise) << "\n";
  out << "seed=" << cfg.seed << "\n";
  out << "normalization=" << format_double(cfg.normalization) << "\n";
  out << "boundaries=";
  for (std::size_t i = 0; i < cfg.boundaries.size(); ++i) {
    if (i > 0) out << ",";
    out << cfg.boundaries[i];
  }
  out << "\n";
  return out.str();
}

EnvironmentConfig parse_environment(const std::string& text) {
  EnvironmentConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("environment parse: expected key=value, got: " + line);
    }
    const std::string key = line.substr(first, eq - first);
    const std::string value = line.substr(eq + 1);
    if (key == "kind") {
      cfg.kind = parse_env_kind(value);
    } else if (key == "T") {
      cfg.horizon = std::stoll(value);
    } else if (key == "C") {
      cfg.changes = std::stoll(value);
    } else if (key == "noise") {
      cfg.noise = std::stod(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
    } else if (key == "normalization") {
      cfg.normalization = std::stod(value);
    } else if (key == "boundaries") {
      cfg.boundaries.clear();
      std::istringstream items(value);
      std::string item;
      while (std::getline(items, item, ',')) {
        if (!item.empty()) cfg.boundaries.push_back(std::stoll(item));
      }
    } else {
      throw std::invalid_argument("environment parse: unknown key: " + key);
    }
  }
  return cfg;
}

std::vector<double> grid_cumulative_losses(const LossSequence& seq, const std::vector<Belief>& grid,
                                           std::int64_t from, std::int64_t to, Exec exec) {
  if (from < 1 || to > seq.horizon() || from > to) {
    throw std::out_of_range("grid_cumulative_losses: bad time range");
  }
  std::vector<double> sums(grid.size(), 0.0);
  const std::int64_t n = static_cast<std::int64_t>(grid.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t gi = 0; gi < n; ++gi) {
      double acc = 0.0;
      for (std::int64_t t = from; t <= to; ++t) acc += seq.losses[t - 1].evaluate(grid[gi]);
      sums[gi] = acc;
    }
  } else {
    for (std::int64_t gi = 0; gi < n; ++gi) {
      double acc = 0.0;
      for (std::int64_t t = from; t <= to; ++t) acc += seq.losses[t - 1].evaluate(grid[gi]);
      sums[gi] = acc;
    }
  }
  return sums;
}

namespace {

std::size_t argmin_first(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[best]) best = i;
  }
  return best;
}

}  // namespace

ComparatorResult static_comparator(const LossSequence& seq, int grid_resolution, Exec exec) {
  if (seq.losses.empty()) throw std::invalid_argument("static comparator: empty sequence");
  const std::vector<Belief> grid = belief_grid(seq.domain, grid_resolution);
  const std::vector<double> sums = grid_cumulative_losses(seq, grid, 1, seq.horizon(), exec);
  const std::size_t best = argmin_first(sums);
  return ComparatorResult{grid[best], sums[best]};
}

DynamicComparatorResult dynamic_comparator_detail(const LossSequence& seq,
                                                  const SegmentSchedule& schedule,
                                                  int grid_resolution, Exec exec) {
  schedule.validate();
  if (schedule.horizon() != seq.horizon()) {
    throw std::invalid_argument("dynamic comparator: schedule horizon does not match sequence");
  }
  const std::vector<Belief> grid = belief_grid(seq.domain, grid_resolution);

  DynamicComparatorResult result;
  result.per_step.resize(seq.horizon());
  std::int64_t from = 1;
  for (const std::int64_t to : schedule.change_points) {
    const std::vector<double> sums = grid_cumulative_losses(seq, grid, from, to, exec);
    const std::size_t best = argmin_first(sums);
    result.optima.push_back(grid[best]);
    result.cumulative += sums[best];
    for (std::int64_t t = from; t <= to; ++t) {
      result.per_step[t - 1] = seq.losses[t - 1].evaluate(grid[best]);
    }
    from = to + 1;
  }
  return result;
}

double dynamic_comparator(const LossSequence& seq, const SegmentSchedule& schedule,
                          int grid_resolution, Exec exec) {
  return dynamic_comparator_detail(seq, schedule, grid_resolution, exec).cumulative;
}

}  // namespace rexp
