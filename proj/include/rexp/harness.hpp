#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "rexp/environment.hpp"
#include "rexp/evaluation.hpp"
#include "rexp/learner.hpp"

namespace rexp::cli {

// RE_LOG=info|debug routes diagnostics to standard error; results never go
// there.
bool log_info_enabled();
bool log_debug_enabled();
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

/// Which algorithm to drive and with what tuning overrides.
struct AlgorithmSpec {
  std::string algo = "recursive";  // base | reset | parallel | first-level |
                                   // second-level | recursive | doubling:<inner>
  std::string base = "ogd";        // ogd | grid
  std::optional<double> eta;       // mixture learning-rate override
  std::optional<double> sigma;     // share-rate override (first-level)
  std::optional<std::int64_t> reset_period;  // t_r override (reset)
};

double base_alpha(const AlgorithmSpec& spec);
LearnerFactory make_base_factory(const AlgorithmSpec& spec, const Domain& domain);

/// Builds the named algorithm for horizon T and change count C. Throws
/// std::invalid_argument naming the violated precondition.
std::unique_ptr<Learner> build_algorithm(const AlgorithmSpec& spec, std::int64_t T, std::int64_t C,
                                         const Domain& domain);

/// Exact CSV schema written by `run`.
inline constexpr const char* kTraceCsvHeader =
    "t,expected_loss,cumulative_loss,comparator_cumulative,regret,active_learners";

void write_trace_csv(std::ostream& out, const RegretTrace& trace);

std::string format_double(double v);

/// Full command-line entry point (subcommands run, sweep, schedule).
int run_main(int argc, const char* const* argv);

}  // namespace rexp::cli
