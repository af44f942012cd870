#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rexp/environment.hpp"
#include "rexp/learner.hpp"

namespace rexp {

/// Per-step record of one experiment. Regret is measured on expected losses
/// against the dynamic comparator; sampled losses are kept as a diagnostic.
struct RegretTrace {
  std::vector<double> expected_loss;
  std::vector<double> cumulative_loss;
  std::vector<double> comparator_cumulative;
  std::vector<double> regret;
  std::vector<double> sampled_loss;
  std::vector<std::int64_t> active_learners;

  std::int64_t horizon() const { return static_cast<std::int64_t>(expected_loss.size()); }
  double final_regret() const { return regret.empty() ? 0.0 : regret.back(); }
};

/// Steps the algorithm through the sequence, scoring it against the
/// sequence's dynamic comparator. Deterministic given the sampling seed.
RegretTrace run_experiment(Learner& algorithm, const LossSequence& seq, std::uint64_t sampling_seed,
                           int grid_resolution = 1025, Exec exec = Exec::Parallel);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_norm = 0.0;
  std::size_t points = 0;
};

/// Ordinary least squares of y against x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

using ExponentFit = LinearFit;

/// Least-squares fit of ln(value) against ln(horizon). Throws on fewer than 4
/// points or any nonpositive value (fit refused).
ExponentFit fit_power_law(std::span<const double> horizons, std::span<const double> values);

struct SweepPoint {
  std::int64_t horizon = 0;
  double mean_regret = 0.0;
  double std_error = 0.0;
};

struct SweepConfig {
  /// Builds the algorithm for a given horizon.
  std::function<std::unique_ptr<Learner>(std::int64_t)> algorithm;
  /// Horizon and seed are overridden per run: run (h, s) uses seed
  /// env_template.seed + s.
  EnvironmentConfig env_template;
  std::vector<std::int64_t> horizons;
  int seeds_per_point = 10;
  int grid_resolution = 1025;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  std::optional<ExponentFit> fit;
  std::string fit_diagnostic;  // set when the fit was refused
};

/// Runs the (horizon x seed) grid; points are independent, so the parallel
/// path distributes them across threads and matches the serial path exactly.
SweepResult run_sweep(const SweepConfig& cfg, Exec exec = Exec::Parallel);

/// run_sweep with the preconditions of an exponent measurement enforced:
/// at least 4 horizons and at least 10 seeds per point.
SweepResult sweep_exponent(const SweepConfig& cfg, Exec exec = Exec::Parallel);

/// Final regret divided by C^alpha T^(1-alpha); negative regret (play finer
/// than the comparator grid) clamps to 0.
double bound_ratio(const RegretTrace& trace, std::int64_t C, std::int64_t T, double alpha);

}  // namespace rexp
