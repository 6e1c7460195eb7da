#include "sensched/convert.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>

#include "sensched/errors.hpp"
#include "sensched/rng.hpp"

namespace sensched {

namespace {

double schedule_objective(const LinearGaussianSystem& sys, const SensorSet& sensors,
                          const Schedule& schedule, const ObjectiveSpec& spec, int start_step,
                          const Eigen::MatrixXd* C_init) {
    return eval_J(sys, sensors, schedule.matrix(), spec, start_step, C_init).total;
}

/// Draw one sensor index from the categorical distribution given by `row`.
int draw_categorical(const Eigen::VectorXd& row, Rng& rng) {
    const double r = rng.uniform() * row.sum();
    double cum = 0.0;
    for (int i = 0; i < row.size(); ++i) {
        cum += row(i);
        if (r < cum) return i;
    }
    return static_cast<int>(row.size()) - 1;
}

void check_window(const RelaxedSchedule& relaxed, const FeasibleSet& fs,
                  const SensorSet& sensors) {
    if (relaxed.horizon() != fs.horizon() || relaxed.num_sensors() != fs.num_sensors())
        throw config_error("relaxed schedule shape does not match the feasible set");
    if (fs.num_sensors() != sensors.size())
        throw config_error("feasible set sensor count does not match the sensor set");
}

}  // namespace

Schedule min_cost_schedule(const FeasibleSet& fs) {
    std::vector<int> picks(static_cast<std::size_t>(fs.horizon()));
    for (int k = 0; k < fs.horizon(); ++k) {
        int best = 0;
        for (int i = 1; i < fs.num_sensors(); ++i)
            if (fs.costs()(k, i) < fs.costs()(k, best)) best = i;
        picks[static_cast<std::size_t>(k)] = best;
    }
    Schedule schedule(std::move(picks), fs.num_sensors());
    if (!fs.contains(schedule))
        throw infeasible_error("no schedule fits the budget: even the cheapest selection costs " +
                               std::to_string(fs.cost_of(schedule)));
    return schedule;
}

ConversionResult convert_sampling(const RelaxedSchedule& relaxed, const FeasibleSet& fs,
                                  const LinearGaussianSystem& sys, const SensorSet& sensors,
                                  const ObjectiveSpec& spec, const SamplingOptions& options,
                                  int start_step, const Eigen::MatrixXd* C_init) {
    check_window(relaxed, fs, sensors);
    const int N = fs.horizon();
    const int max_trials = options.max_trials > 0 ? options.max_trials : 50 * N;
    const int stagnation_limit =
        options.stagnation_limit > 0 ? options.stagnation_limit : 10 * N;

    Rng rng(options.seed);
    std::optional<Schedule> best;
    double best_J = std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    int trials = 0;
    int since_improvement = 0;

    std::vector<int> picks(static_cast<std::size_t>(N));
    while (trials < max_trials && since_improvement < stagnation_limit) {
        ++trials;
        for (int k = 0; k < N; ++k)
            picks[static_cast<std::size_t>(k)] =
                draw_categorical(relaxed.matrix().row(k).transpose(), rng);
        Schedule candidate(picks, fs.num_sensors());
        ++since_improvement;
        if (!fs.contains(candidate)) continue;
        const double J =
            schedule_objective(sys, sensors, candidate, spec, start_step, C_init);
        if (J < best_J) {
            best_J = J;
            best = std::move(candidate);
            trace.push_back(J);
            since_improvement = 0;
        }
    }

    if (!best) {
        Schedule fallback = min_cost_schedule(fs);  // throws infeasible_error if over budget
        best_J = schedule_objective(sys, sensors, fallback, spec, start_step, C_init);
        best = std::move(fallback);
        trace.push_back(best_J);
    }
    return ConversionResult{std::move(*best), best_J, trials, ConversionMethod::Sampling,
                            std::move(trace)};
}

ConversionResult convert_swapping(const RelaxedSchedule& relaxed, const FeasibleSet& fs,
                                  const LinearGaussianSystem& sys, const SensorSet& sensors,
                                  const ObjectiveSpec& spec, const SwappingOptions& options,
                                  int start_step, const Eigen::MatrixXd* C_init) {
    check_window(relaxed, fs, sensors);
    const int N = fs.horizon();
    const int S = fs.num_sensors();
    const int max_trials = options.max_trials > 0 ? options.max_trials : S * N;

    Schedule current = min_cost_schedule(fs);
    double current_J = schedule_objective(sys, sensors, current, spec, start_step, C_init);
    std::vector<double> trace{current_J};

    // Candidate order per step: sensors sorted by descending relaxed weight,
    // index ascending on ties. Fixed for the whole run.
    std::vector<std::vector<int>> order(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        auto& ord = order[static_cast<std::size_t>(k)];
        ord.resize(static_cast<std::size_t>(S));
        std::iota(ord.begin(), ord.end(), 0);
        const Eigen::VectorXd row = relaxed.matrix().row(k).transpose();
        std::stable_sort(ord.begin(), ord.end(),
                         [&row](int a, int b) { return row(a) > row(b); });
    }

    int trials = 0;
    bool pass_committed = true;
    while (trials < max_trials && pass_committed) {
        pass_committed = false;
        for (int k = 0; k < N && trials < max_trials; ++k) {
            for (int i : order[static_cast<std::size_t>(k)]) {
                if (i == current.pick(k)) continue;
                if (trials >= max_trials) break;
                ++trials;
                std::vector<int> picks = current.picks();
                picks[static_cast<std::size_t>(k)] = i;
                Schedule candidate(std::move(picks), S);
                if (!fs.contains(candidate)) continue;
                const double J =
                    schedule_objective(sys, sensors, candidate, spec, start_step, C_init);
                if (J < current_J) {
                    current = std::move(candidate);
                    current_J = J;
                    trace.push_back(J);
                    pass_committed = true;
                    break;  // committed: continue at the next time step
                }
            }
        }
    }
    return ConversionResult{std::move(current), current_J, trials, ConversionMethod::Swapping,
                            std::move(trace)};
}

}  // namespace sensched
