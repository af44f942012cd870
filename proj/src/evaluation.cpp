#include "rexp/evaluation.hpp"

#include <cmath>
#include <exception>
#include <sstream>

namespace rexp {

RegretTrace run_experiment(Learner& algorithm, const LossSequence& seq, std::uint64_t sampling_seed,
                           int grid_resolution, Exec exec) {
  const std::int64_t T = seq.horizon();
  if (T < 1) throw std::invalid_argument("run_experiment: empty loss sequence");
  if (algorithm.horizon() && *algorithm.horizon() < T) {
    throw std::invalid_argument("run_experiment: algorithm horizon " +
                                std::to_string(*algorithm.horizon()) +
                                " is shorter than the environment horizon " + std::to_string(T));
  }
  const DynamicComparatorResult comp =
      dynamic_comparator_detail(seq, seq.schedule, grid_resolution, exec);

  std::mt19937_64 sampler = make_stream(sampling_seed, kStreamRunSampling);
  RegretTrace trace;
  trace.expected_loss.reserve(T);
  trace.cumulative_loss.reserve(T);
  trace.comparator_cumulative.reserve(T);
  trace.regret.reserve(T);
  trace.sampled_loss.reserve(T);
  trace.active_learners.reserve(T);

  double cumulative = 0.0;
  double comparator = 0.0;
  for (std::int64_t t = 1; t <= T; ++t) {
    const LossFunction& loss = seq.losses[t - 1];
    const Belief drawn = algorithm.sample(sampler);
    trace.sampled_loss.push_back(loss.evaluate(drawn));
    const double expected = algorithm.step(loss);
    cumulative += expected;
    comparator += comp.per_step[t - 1];
    trace.expected_loss.push_back(expected);
    trace.cumulative_loss.push_back(cumulative);
    trace.comparator_cumulative.push_back(comparator);
    trace.regret.push_back(cumulative - comparator);
    trace.active_learners.push_back(algorithm.active_learner_count());
  }
  return trace;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need matching vectors with >= 2 points");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
  LinearFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.points = x.size();
  double rss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    rss += r * r;
  }
  fit.residual_norm = std::sqrt(rss);
  return fit;
}

ExponentFit fit_power_law(std::span<const double> horizons, std::span<const double> values) {
  if (horizons.size() != values.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  if (horizons.size() < 4) {
    throw std::invalid_argument("fit refused: need at least 4 horizon points");
  }
  std::vector<double> lx(horizons.size()), ly(values.size());
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0)) throw std::domain_error("fit refused: nonpositive horizon");
    if (!(values[i] > 0.0)) {
      std::ostringstream msg;
      msg << "fit refused: nonpositive mean regret " << values[i] << " at T=" << horizons[i];
      throw std::domain_error(msg.str());
    }
    lx[i] = std::log(horizons[i]);
    ly[i] = std::log(values[i]);
  }
  return linear_fit(lx, ly);
}

SweepResult run_sweep(const SweepConfig& cfg, Exec exec) {
  if (!cfg.algorithm) throw std::invalid_argument("run_sweep: algorithm factory required");
  if (cfg.horizons.empty()) throw std::invalid_argument("run_sweep: no horizons");
  if (cfg.seeds_per_point < 1) throw std::invalid_argument("run_sweep: need >= 1 seed per point");

  const std::int64_t points = static_cast<std::int64_t>(cfg.horizons.size());
  const std::int64_t seeds = cfg.seeds_per_point;
  const std::int64_t total = points * seeds;
  std::vector<double> finals(total, 0.0);

  std::exception_ptr failure = nullptr;
  const auto run_one = [&](std::int64_t idx) {
    const std::int64_t h = idx / seeds;
    const std::int64_t s = idx % seeds;
    EnvironmentConfig env = cfg.env_template;
    env.horizon = cfg.horizons[h];
    env.seed = cfg.env_template.seed + static_cast<std::uint64_t>(s);
    const LossSequence seq = generate(env);
    std::unique_ptr<Learner> algo = cfg.algorithm(env.horizon);
    // comparator kernels stay serial inside each run; the runs themselves
    // carry the parallelism
    const RegretTrace trace =
        run_experiment(*algo, seq, env.seed, cfg.grid_resolution, Exec::Serial);
    finals[idx] = trace.final_regret();
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t idx = 0; idx < total; ++idx) {
      try {
        run_one(idx);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (std::int64_t idx = 0; idx < total; ++idx) run_one(idx);
  }
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.points.reserve(points);
  for (std::int64_t h = 0; h < points; ++h) {
    double mean = 0.0;
    for (std::int64_t s = 0; s < seeds; ++s) mean += finals[h * seeds + s];
    mean /= static_cast<double>(seeds);
    double var = 0.0;
    for (std::int64_t s = 0; s < seeds; ++s) {
      const double d = finals[h * seeds + s] - mean;
      var += d * d;
    }
    const double std_error =
        seeds > 1 ? std::sqrt(var / static_cast<double>(seeds - 1)) /
                        std::sqrt(static_cast<double>(seeds))
                  : 0.0;
    result.points.push_back(SweepPoint{cfg.horizons[h], mean, std_error});
  }

  std::vector<double> hs(points), means(points);
  for (std::int64_t h = 0; h < points; ++h) {
    hs[h] = static_cast<double>(result.points[h].horizon);
    means[h] = result.points[h].mean_regret;
  }
  try {
    result.fit = fit_power_law(hs, means);
  } catch (const std::exception& e) {
    result.fit_diagnostic = e.what();
  }
  return result;
}

SweepResult sweep_exponent(const SweepConfig& cfg, Exec exec) {
  if (cfg.horizons.size() < 4) {
    throw std::invalid_argument("sweep_exponent: need at least 4 horizons");
  }
  if (cfg.seeds_per_point < 10) {
    throw std::invalid_argument("sweep_exponent: need at least 10 seeds per point");
  }
  return run_sweep(cfg, exec);
}

double bound_ratio(const RegretTrace& trace, std::int64_t C, std::int64_t T, double alpha) {
  if (C < 1 || T < 1) throw std::invalid_argument("bound_ratio: need C >= 1 and T >= 1");
  const double denom = std::pow(static_cast<double>(C), alpha) *
                       std::pow(static_cast<double>(T), 1.0 - alpha);
  return std::max(0.0, trace.final_regret() / denom);
}

}  // namespace rexp
