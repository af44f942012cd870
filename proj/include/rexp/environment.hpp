#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rexp/learner.hpp"

namespace rexp {

enum class EnvKind {
  PiecewiseMeanSquared,
  PiecewiseExpertLinear,
};

std::string to_string(EnvKind kind);
EnvKind parse_env_kind(const std::string& name);

/// The dynamic comparator's structure: cumulative change points T_c (the last
/// one equals the horizon) and one optimum per segment.
struct SegmentSchedule {
  std::vector<std::int64_t> change_points;
  std::vector<Belief> optima;

  std::int64_t horizon() const { return change_points.empty() ? 0 : change_points.back(); }
  int count() const { return static_cast<int>(change_points.size()); }
  std::vector<std::int64_t> lengths() const;
  /// 0-based segment containing 1-based time t.
  int segment_of(std::int64_t t) const;
  void validate() const;
};

struct EnvironmentConfig {
  EnvKind kind = EnvKind::PiecewiseMeanSquared;
  std::int64_t horizon = 0;  // T
  std::int64_t changes = 1;  // C, the number of segments
  double noise = 0.0;        // targets are jittered uniformly in +-noise
  std::uint64_t seed = 0;
  double normalization = 0.0;            // 0 = derived from domain and noise
  std::vector<std::int64_t> boundaries;  // optional explicit T_1..T_{C-1}
  Domain domain = Domain::unit_interval();

  void validate() const;
  /// Loss divisor actually applied for this config.
  double effective_normalizer() const;
};

/// Line-based `key=value` form; round-trips exactly through parse_environment.
std::string serialize(const EnvironmentConfig& cfg);
EnvironmentConfig parse_environment(const std::string& text);

struct LossSequence {
  std::vector<LossFunction> losses;
  SegmentSchedule schedule;
  Domain domain = Domain::unit_interval();
  double normalizer = 1.0;
  /// Times a loss evaluation overflowed [0, 1] and was clamped.
  std::shared_ptr<std::atomic<std::uint64_t>> clamp_events;

  std::int64_t horizon() const { return static_cast<std::int64_t>(losses.size()); }
  std::uint64_t clamp_count() const { return clamp_events ? clamp_events->load() : 0; }
};

/// Deterministic given cfg.seed. Segment boundaries are drawn uniformly among
/// the C-1 element subsets of {1..T-1} unless supplied; segment optima are
/// drawn from the sixteenths of the domain with consecutive optima distinct.
LossSequence generate(const EnvironmentConfig& cfg);

enum class Exec { Serial, Parallel };

/// Cumulative loss of every grid point over 1-based times [from, to].
/// Serial and parallel paths accumulate in identical per-point order and
/// return bitwise-equal sums.
std::vector<double> grid_cumulative_losses(const LossSequence& seq, const std::vector<Belief>& grid,
                                           std::int64_t from, std::int64_t to, Exec exec);

struct ComparatorResult {
  Belief best;
  double cumulative = 0.0;
};

/// Best fixed grid point in hindsight; ties break toward the lexicographically
/// smallest grid point.
ComparatorResult static_comparator(const LossSequence& seq, int grid_resolution,
                                   Exec exec = Exec::Parallel);

struct DynamicComparatorResult {
  std::vector<Belief> optima;        // per segment
  std::vector<double> per_step;      // comparator loss at each time
  double cumulative = 0.0;
};

DynamicComparatorResult dynamic_comparator_detail(const LossSequence& seq,
                                                  const SegmentSchedule& schedule,
                                                  int grid_resolution, Exec exec = Exec::Parallel);

/// Cumulative loss of the best piecewise selection on the schedule's segments.
double dynamic_comparator(const LossSequence& seq, const SegmentSchedule& schedule,
                          int grid_resolution, Exec exec = Exec::Parallel);

}  // namespace rexp
