#include "rexp/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "rexp/doubling.hpp"
#include "rexp/mergers.hpp"
#include "rexp/recursive.hpp"
#include "rexp/resetting.hpp"

namespace rexp::cli {

namespace {

int log_level() {
  static const int level = [] {
    const char* v = std::getenv("RE_LOG");
    if (!v) return 0;
    const std::string s(v);
    if (s == "debug") return 2;
    if (s == "info") return 1;
    return 0;
  }();
  return level;
}

}  // namespace

bool log_info_enabled() { return log_level() >= 1; }
bool log_debug_enabled() { return log_level() >= 2; }

void log_info(const std::string& msg) {
  if (log_info_enabled()) std::cerr << "[info] " << msg << "\n";
}

void log_debug(const std::string& msg) {
  if (log_debug_enabled()) std::cerr << "[debug] " << msg << "\n";
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double base_alpha(const AlgorithmSpec& spec) {
  if (spec.base == "ogd" || spec.base == "grid") return 0.5;
  throw std::invalid_argument("unknown base learner: " + spec.base);
}

LearnerFactory make_base_factory(const AlgorithmSpec& spec, const Domain& domain) {
  if (spec.base == "ogd") {
    return [domain] { return std::make_unique<OgdLearner>(domain); };
  }
  if (spec.base == "grid") {
    return [domain] { return std::make_unique<GridHedgeLearner>(domain); };
  }
  throw std::invalid_argument("unknown base learner: " + spec.base);
}

namespace {

std::unique_ptr<Learner> build_known_horizon(const AlgorithmSpec& spec, const std::string& name,
                                             std::int64_t T, std::int64_t C, const Domain& domain,
                                             bool clamp_for_block) {
  const LearnerFactory base = make_base_factory(spec, domain);
  if (name == "base") return base();
  if (name == "reset") {
    const std::int64_t C_eff = clamp_for_block ? std::min(C, T) : C;
    const std::int64_t period =
        spec.reset_period ? *spec.reset_period : optimal_period(T, C_eff, base_alpha(spec));
    return std::make_unique<ResettingLearner>(base(), ResetPolicy{period, 0});
  }
  if (name == "parallel") {
    if (clamp_for_block && T < 2) return base();
    auto m = build_parallel(T, base);
    if (spec.eta) m->set_rate(*spec.eta);
    return m;
  }
  if (name == "first-level") {
    std::int64_t C_eff = C;
    if (clamp_for_block) {
      if (T < 2) return base();
      C_eff = std::min(C, T - 1);
    }
    auto m = build_first_level(C_eff, T, base);
    if (spec.eta) m->set_rate(*spec.eta);
    if (spec.sigma) m->set_share_rate(*spec.sigma);
    return m;
  }
  if (name == "second-level") {
    if (clamp_for_block && T < 4) return base();
    auto m = build_second_level(T, base);
    if (spec.eta) m->set_outer_rate(*spec.eta);
    return m;
  }
  if (name == "recursive") return build_recursive(T, base);
  throw std::invalid_argument("unknown algorithm: " + name);
}

}  // namespace

std::unique_ptr<Learner> build_algorithm(const AlgorithmSpec& spec, std::int64_t T, std::int64_t C,
                                         const Domain& domain) {
  if (spec.algo.rfind("doubling:", 0) == 0) {
    const std::string inner = spec.algo.substr(9);
    if (inner.rfind("doubling", 0) == 0) {
      throw std::invalid_argument("doubling wrapper cannot nest another doubling wrapper");
    }
    // Blocks shorter than an algorithm's minimum horizon fall back to the
    // bare base learner.
    return std::make_unique<DoublingLearner>([spec, inner, C, domain](std::int64_t block_T) {
      return build_known_horizon(spec, inner, block_T, C, domain, /*clamp_for_block=*/true);
    });
  }
  return build_known_horizon(spec, spec.algo, T, C, domain, /*clamp_for_block=*/false);
}

void write_trace_csv(std::ostream& out, const RegretTrace& trace) {
  out << kTraceCsvHeader << "\n";
  for (std::int64_t t = 1; t <= trace.horizon(); ++t) {
    out << t << ',' << format_double(trace.expected_loss[t - 1]) << ','
        << format_double(trace.cumulative_loss[t - 1]) << ','
        << format_double(trace.comparator_cumulative[t - 1]) << ','
        << format_double(trace.regret[t - 1]) << ',' << trace.active_learners[t - 1] << "\n";
  }
}

namespace {

struct CommonOpts {
  std::string algo = "recursive";
  std::string base = "ogd";
  std::string env = "piecewise-mean-squared";
  std::int64_t T = 1024;
  std::int64_t C = 1;
  double noise = 0.0;
  std::uint64_t seed = 1;
  std::string out;
  int grid_resolution = 1025;
  double eta = -1.0;    // < 0 means unset
  double sigma = -1.0;  // < 0 means unset
  std::int64_t t_r = 0; // 0 means unset
};

AlgorithmSpec to_spec(const CommonOpts& o) {
  AlgorithmSpec spec;
  spec.algo = o.algo;
  spec.base = o.base;
  if (o.eta >= 0.0) spec.eta = o.eta;
  if (o.sigma >= 0.0) spec.sigma = o.sigma;
  if (o.t_r > 0) spec.reset_period = o.t_r;
  return spec;
}

bool looks_like_kind(const std::string& env) {
  return env == "piecewise-mean-squared" || env == "piecewise-expert-linear";
}

EnvironmentConfig resolve_environment(const CommonOpts& o) {
  if (looks_like_kind(o.env)) {
    EnvironmentConfig cfg;
    cfg.kind = parse_env_kind(o.env);
    cfg.horizon = o.T;
    cfg.changes = o.C;
    cfg.noise = o.noise;
    cfg.seed = o.seed;
    return cfg;
  }
  std::ifstream in(o.env);
  if (!in) throw std::invalid_argument("cannot open environment file: " + o.env);
  std::stringstream buffer;
  buffer << in.rdbuf();
  log_debug("environment loaded from " + o.env);
  return parse_environment(buffer.str());
}

void add_common_options(CLI::App* cmd, CommonOpts& o, bool with_out) {
  cmd->add_option("--algo", o.algo,
                  "base | reset | parallel | first-level | second-level | recursive | "
                  "doubling:<inner>");
  cmd->add_option("--base", o.base, "base learner: ogd | grid");
  cmd->add_option("--env", o.env, "environment kind or path to an environment file");
  cmd->add_option("--T", o.T, "horizon");
  cmd->add_option("--C", o.C, "number of segments");
  cmd->add_option("--noise", o.noise, "environment noise scale");
  cmd->add_option("--seed", o.seed, "seed; expands into per-consumer streams");
  cmd->add_option("--grid-resolution", o.grid_resolution, "comparator grid points per coordinate");
  cmd->add_option("--eta", o.eta, "mixture learning-rate override");
  cmd->add_option("--sigma", o.sigma, "share-rate override (first-level)");
  cmd->add_option("--t-r", o.t_r, "reset-period override (reset)");
  if (with_out) cmd->add_option("--out", o.out, "output CSV path")->required();
  cmd->set_config("--config", "", "key=value config file; flags take precedence");
}

int cmd_run(const CommonOpts& o) {
  const EnvironmentConfig env = resolve_environment(o);
  env.validate();
  const LossSequence seq = generate(env);
  const AlgorithmSpec spec = to_spec(o);
  std::unique_ptr<Learner> algo = build_algorithm(spec, env.horizon, env.changes, env.domain);
  log_info("running " + spec.algo + " on " + to_string(env.kind) + " T=" +
           std::to_string(env.horizon) + " C=" + std::to_string(env.changes));

  const RegretTrace trace = run_experiment(*algo, seq, env.seed, o.grid_resolution);

  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + o.out);
  write_trace_csv(out, trace);
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + o.out);

  const double ratio = bound_ratio(trace, env.changes, env.horizon, base_alpha(spec));
  std::ostringstream summary;
  summary << "algo=" << spec.algo << " env=" << to_string(env.kind) << " T=" << env.horizon
          << " C=" << env.changes << " seed=" << env.seed
          << " final_regret=" << format_double(trace.final_regret())
          << " bound_ratio=" << format_double(ratio)
          << " active_learners=" << algo->active_learner_count();
  if (algo->expert_count()) summary << " experts=" << *algo->expert_count();
  if (seq.clamp_count() > 0) summary << " loss_clamps=" << seq.clamp_count();
  summary << " out=" << o.out;
  std::cout << summary.str() << "\n";
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& horizons_csv, int seeds_per_point,
              double plant) {
  std::vector<std::int64_t> horizons;
  {
    std::istringstream items(horizons_csv);
    std::string item;
    while (std::getline(items, item, ',')) {
      if (!item.empty()) horizons.push_back(std::stoll(item));
    }
  }
  if (horizons.size() < 4) {
    throw std::invalid_argument("sweep: need at least 4 horizons, got " +
                                std::to_string(horizons.size()));
  }

  SweepResult result;
  if (plant > 0.0) {
    // dry run: plant an exact power law instead of measuring
    for (const std::int64_t T : horizons) {
      result.points.push_back(
          SweepPoint{T, std::pow(static_cast<double>(T), plant), 0.0});
    }
    std::vector<double> hs, means;
    for (const auto& p : result.points) {
      hs.push_back(static_cast<double>(p.horizon));
      means.push_back(p.mean_regret);
    }
    result.fit = fit_power_law(hs, means);
  } else {
    const AlgorithmSpec spec = to_spec(o);
    SweepConfig cfg;
    cfg.env_template = resolve_environment(o);
    cfg.horizons = horizons;
    cfg.seeds_per_point = seeds_per_point;
    cfg.grid_resolution = o.grid_resolution;
    const Domain domain = cfg.env_template.domain;
    const std::int64_t C = cfg.env_template.changes;
    cfg.algorithm = [spec, C, domain](std::int64_t T) {
      return build_algorithm(spec, T, C, domain);
    };
    result = run_sweep(cfg);
  }

  std::ofstream out(o.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + o.out);
  out << "T,mean_regret,stderr,slope\n";
  for (const auto& p : result.points) {
    out << p.horizon << ',' << format_double(p.mean_regret) << ','
        << format_double(p.std_error) << ",\n";
  }
  if (!result.fit) {
    std::cout << "sweep points written to " << o.out << "\n";
    throw std::domain_error(result.fit_diagnostic);
  }
  out << "fit,,," << format_double(result.fit->slope) << "\n";
  out.flush();
  if (!out) throw std::runtime_error("failed writing output file: " + o.out);

  std::cout << "points=" << result.points.size() << " seeds_per_point=" << seeds_per_point
            << " slope=" << format_double(result.fit->slope)
            << " intercept=" << format_double(result.fit->intercept) << " out=" << o.out << "\n";
  return 0;
}

int cmd_schedule(std::int64_t T) {
  if (T < 2) throw std::invalid_argument("schedule: T must be >= 2");
  const std::size_t n = ceil_log2(T);
  std::cout << "T=" << T << " experts=" << n << "\n";
  for (std::size_t i = 1; i <= n; ++i) {
    const std::int64_t period = std::int64_t{1} << i;
    const std::int64_t phase = period / 2;
    std::cout << "i=" << i << " period=" << period << " first_reset=" << phase << " resets:";
    for (std::int64_t t = phase; t <= T; t += period) std::cout << ' ' << t;
    std::cout << "\n";
  }
  for (std::int64_t t = 1; t + 1 <= T; ++t) {
    const auto j = reset_target(t, n);
    std::cout << "t=" << t << " -> ";
    if (j) {
      std::cout << "j=" << *j << "\n";
    } else {
      std::cout << "none\n";
    }
  }
  return 0;
}

}  // namespace

int run_main(int argc, const char* const* argv) {
  CLI::App app{"online-learning mixtures for piecewise-stationary environments"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "run one experiment and write its per-step trace");
  add_common_options(run, run_opts, /*with_out=*/true);

  CommonOpts sweep_opts;
  std::string horizons_csv;
  int seeds_per_point = 10;
  double plant = -1.0;
  CLI::App* sweep = app.add_subcommand("sweep", "mean regret across horizons plus exponent fit");
  add_common_options(sweep, sweep_opts, /*with_out=*/true);
  sweep->add_option("--horizons", horizons_csv, "comma-separated horizon list")->required();
  sweep->add_option("--seeds-per-point", seeds_per_point, "independent seeds per horizon");
  sweep->add_option("--plant", plant, "dry run: plant regret T^s instead of measuring");

  std::int64_t schedule_T = 0;
  CLI::App* schedule = app.add_subcommand("schedule", "print the phased reset schedules");
  schedule->add_option("--T", schedule_T, "horizon")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (sweep->parsed()) return cmd_sweep(sweep_opts, horizons_csv, seeds_per_point, plant);
    if (schedule->parsed()) return cmd_schedule(schedule_T);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rexp::cli
