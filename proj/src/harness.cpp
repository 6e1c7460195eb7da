#include "sensched/harness.hpp"

#include <chrono>
#include <cmath>

#include "sensched/convert.hpp"
#include "sensched/errors.hpp"
#include "sensched/rng.hpp"

namespace sensched {

std::string method_name(Method method) {
    switch (method) {
        case Method::BBC: return "bbc";
        case Method::BBL: return "bbl";
        case Method::BBZ: return "bbz";
        case Method::Exhaustive: return "exhaustive";
        case Method::Greedy: return "greedy";
        case Method::GreedyStar: return "greedy-star";
        case Method::Convex: return "convex";
    }
    throw config_error("unknown method");
}

std::optional<Method> parse_method(const std::string& name) {
    if (name == "bbc") return Method::BBC;
    if (name == "bbl") return Method::BBL;
    if (name == "bbz") return Method::BBZ;
    if (name == "exhaustive") return Method::Exhaustive;
    if (name == "greedy") return Method::Greedy;
    if (name == "greedy-star" || name == "greedy*") return Method::GreedyStar;
    if (name == "convex") return Method::Convex;
    return std::nullopt;
}

namespace {

MethodRun finish_run(const LinearGaussianSystem& sys, const SensorSet& sensors,
                     Method method, Schedule schedule, SearchStats stats,
                     const ObjectiveSpec& spec) {
    const ObjectiveValue value = eval_J(sys, sensors, schedule, spec);
    return MethodRun{method, value.total, value.per_step, std::move(schedule),
                     std::move(stats)};
}

}  // namespace

MethodRun run_method(const ScenarioConfig& config, Method method,
                     const HarnessOptions& options) {
    const int N = config.effective_horizon(options.horizon_override);
    const LinearGaussianSystem sys = config.build_system(N);
    const SensorSet sensors = config.build_sensors(N);
    const ObjectiveSpec spec = config.objective_spec();
    const FeasibleSet fs(sensors.cost_matrix(), config.budget.evaluate(N));

    switch (method) {
        case Method::BBC:
        case Method::BBL:
        case Method::BBZ: {
            const BBVariant variant = method == Method::BBC   ? BBVariant::BBC
                                      : method == Method::BBL ? BBVariant::BBL
                                                              : BBVariant::BBZ;
            SearchResult res = bb_search(sys, sensors, fs, spec, variant, options.search);
            return finish_run(sys, sensors, method, std::move(res.schedule),
                              std::move(res.stats), spec);
        }
        case Method::Exhaustive: {
            SearchResult res = exhaustive(sys, sensors, fs, spec);
            return finish_run(sys, sensors, method, std::move(res.schedule),
                              std::move(res.stats), spec);
        }
        case Method::Greedy:
        case Method::GreedyStar: {
            SearchResult res =
                greedy(sys, sensors, fs, spec, method == Method::GreedyStar);
            return finish_run(sys, sensors, method, std::move(res.schedule),
                              std::move(res.stats), spec);
        }
        case Method::Convex: {
            const auto t0 = std::chrono::steady_clock::now();
            const RelaxedSolution sol =
                solve_relaxed(sys, sensors, fs, spec, options.search.relax);
            SwappingOptions swap_options;
            swap_options.max_trials = options.search.swap_trials;
            ConversionResult conv =
                convert_swapping(sol.u_star, fs, sys, sensors, spec, swap_options);
            SearchStats stats;
            stats.relaxations_solved = 1;
            stats.wall_time = std::chrono::steady_clock::now() - t0;
            return finish_run(sys, sensors, method, std::move(conv.schedule),
                              std::move(stats), spec);
        }
    }
    throw config_error("unknown method");
}

ComparisonReport run_compare(const ScenarioConfig& config, const std::vector<Method>& methods,
                             const HarnessOptions& options) {
    ComparisonReport report;
    report.scenario_fingerprint = config.fingerprint();
    report.horizon = config.effective_horizon(options.horizon_override);
    report.budget = config.budget.evaluate(report.horizon);
    report.methods.reserve(methods.size());
    for (Method m : methods) report.methods.push_back(run_method(config, m, options));
    return report;
}

RmseReport run_monte_carlo(const ScenarioConfig& config, const std::vector<Method>& methods,
                           int runs, const HarnessOptions& options, bool zero_noise) {
    if (runs < 1) throw config_error("Monte Carlo needs at least one run");
    const int N = config.effective_horizon(options.horizon_override);
    const LinearGaussianSystem sys = config.build_system(N);
    const SensorSet sensors = config.build_sensors(N);

    std::vector<MethodRun> scheduled;
    scheduled.reserve(methods.size());
    for (Method m : methods) scheduled.push_back(run_method(config, m, options));

    std::vector<std::vector<double>> sq_sum(
        methods.size(), std::vector<double>(static_cast<std::size_t>(N), 0.0));

    for (int r = 0; r < runs; ++r) {
        // One shared realization per run: every method filters the same truth
        // and the same measurement noise (common random numbers).
        const Realization real =
            simulate_realization(sys, sensors, child_seed(config.seed, r), zero_noise);
        for (std::size_t mi = 0; mi < scheduled.size(); ++mi) {
            const Schedule& schedule = scheduled[mi].schedule;
            Eigen::VectorXd mean = sys.x0_mean();
            Eigen::MatrixXd cov = sys.C0();
            for (int k = 1; k <= N; ++k) {
                mean = sys.A(k - 1) * mean;
                const Eigen::MatrixXd pred =
                    sys.A(k - 1) * cov * sys.A(k - 1).transpose() + sys.Qw(k - 1);
                cov = 0.5 * (pred + pred.transpose());
                const int pick = schedule.pick(k - 1);
                if (!sensors[pick].is_null()) {
                    const Eigen::VectorXd z = real.measurement(sensors, pick, k);
                    KalmanPosterior post = kalman_update(mean, cov, sensors, pick, k, z);
                    mean = std::move(post.mean);
                    cov = std::move(post.cov);
                }
                double err2 = 0.0;
                for (int p : config.position_indices) {
                    const double d =
                        mean(p) - real.states[static_cast<std::size_t>(k)](p);
                    err2 += d * d;
                }
                sq_sum[mi][static_cast<std::size_t>(k) - 1] += err2;
            }
        }
    }

    RmseReport report;
    report.scenario_fingerprint = config.fingerprint();
    report.horizon = N;
    report.budget = config.budget.evaluate(N);
    report.seed = config.seed;
    report.runs = runs;
    report.methods.reserve(methods.size());
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        RmseSeries series;
        series.method = methods[mi];
        series.rmse_position.reserve(static_cast<std::size_t>(N));
        for (int k = 0; k < N; ++k)
            series.rmse_position.push_back(
                std::sqrt(sq_sum[mi][static_cast<std::size_t>(k)] / runs));
        report.methods.push_back(std::move(series));
    }
    return report;
}

}  // namespace sensched
