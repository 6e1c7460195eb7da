#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sensched/scenario.hpp"
#include "sensched/search.hpp"

namespace sensched {

/// Canonical lowercase token for a method ("bbc", "greedy-star", ...), as
/// used by the CLI and in CSV rows.
std::string method_name(Method method);
std::optional<Method> parse_method(const std::string& name);

struct MethodRun {
    Method method;
    double J_total;                // recomputed from the schedule
    std::vector<double> per_step;  // g_1 .. g_N of the schedule
    Schedule schedule;
    SearchStats stats;
};

struct ComparisonReport {
    std::string scenario_fingerprint;
    int horizon = 0;
    double budget = 0.0;
    std::vector<MethodRun> methods;
};

/// Extra knobs shared by the harness entry points. `swap_trials`/`relax`
/// reach the underlying solvers; `horizon_override` (0 = scenario value)
/// rescales linear budgets automatically.
struct HarnessOptions {
    SearchOptions search;
    int horizon_override = 0;
};

/// Runs each requested method on the scenario and reports schedule, value,
/// and search statistics. All methods share the same system, sensor set, and
/// budget.
ComparisonReport run_compare(const ScenarioConfig& config, const std::vector<Method>& methods,
                             const HarnessOptions& options = {});

/// Schedule + stats for a single method (the building block of run_compare).
MethodRun run_method(const ScenarioConfig& config, Method method,
                     const HarnessOptions& options = {});

struct RmseSeries {
    Method method;
    std::vector<double> rmse_position;  // entry k−1 = RMSE at step k over all runs
};

struct RmseReport {
    std::string scenario_fingerprint;
    int horizon = 0;
    double budget = 0.0;
    std::uint64_t seed = 0;
    int runs = 0;
    std::vector<RmseSeries> methods;
};

/// Monte Carlo tracking evaluation: each method's offline schedule drives a
/// Kalman filter against simulated ground truth. All methods within a run see
/// the same true trajectory and the same measurement noise (common random
/// numbers); run r uses a child seed of config.seed. `zero_noise` zeroes the
/// process/measurement noise for deterministic convergence tests.
RmseReport run_monte_carlo(const ScenarioConfig& config, const std::vector<Method>& methods,
                           int runs = 100, const HarnessOptions& options = {},
                           bool zero_noise = false);

}  // namespace sensched
