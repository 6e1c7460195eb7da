// Command-line front end: schedule computation, method comparison, Monte
// Carlo tracking evaluation, and horizon sweeps over a scenario file.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sensched/csv.hpp"
#include "sensched/errors.hpp"
#include "sensched/harness.hpp"
#include "sensched/scenario.hpp"

namespace {

using namespace sensched;

struct CommonArgs {
    std::string scenario_path;
    int horizon = 0;             // 0 → scenario value
    std::string budget;          // empty → scenario value
    std::string methods;         // comma-separated
    std::string objective;       // empty → scenario value
    std::optional<std::uint64_t> seed;
    std::string out;             // empty → stdout table
    int runs = 100;
    int trials = 0;              // 0 → solver defaults
    bool timing = false;
};

/// Registers the flag set shared by all subcommands.
void add_common_flags(CLI::App* cmd, CommonArgs& args, const std::string& default_methods) {
    cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--horizon", args.horizon, "Override the scenario horizon N")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--budget", args.budget,
                    "Override the budget: VALUE or linear:RATE[:round]");
    args.methods = default_methods;
    cmd->add_option("--method", args.methods,
                    "Methods to run, comma-separated: convex,bbc,bbl,bbz,greedy,greedy-star,"
                    "exhaustive");
    cmd->add_option("--objective", args.objective,
                    "Override the objective: trace, root-det, or max-eig");
    cmd->add_option("--seed", args.seed, "Override the scenario seed");
    cmd->add_option("--out", args.out, "Write CSV here instead of printing a table");
    cmd->add_option("--trials", args.trials,
                    "Conversion swap-trial budget (default: sensors x horizon)");
    cmd->add_flag("--timing", args.timing, "Fill the wall_ms CSV column (non-deterministic)");
}

ScenarioConfig configured_scenario(const CommonArgs& args) {
    ScenarioConfig cfg = load_scenario(args.scenario_path);
    if (!args.budget.empty()) cfg.budget = parse_budget(args.budget);
    if (!args.objective.empty()) {
        if (args.objective == "trace")
            cfg.objective = Measure::Trace;
        else if (args.objective == "root-det")
            cfg.objective = Measure::RootDeterminant;
        else if (args.objective == "max-eig")
            cfg.objective = Measure::MaxEigenvalue;
        else
            throw config_error("unknown objective '" + args.objective +
                               "' (expected trace, root-det, or max-eig)");
    }
    if (args.seed) cfg.seed = *args.seed;
    return cfg;
}

std::vector<Method> parse_methods(const std::string& list) {
    std::vector<Method> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const std::size_t comma = list.find(',', pos);
        const std::string token =
            list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!token.empty()) {
            const std::optional<Method> m = parse_method(token);
            if (!m) throw config_error("unknown method '" + token + "'");
            out.push_back(*m);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw config_error("no methods requested");
    return out;
}

HarnessOptions harness_options(const CommonArgs& args) {
    HarnessOptions options;
    options.horizon_override = args.horizon;
    options.search.swap_trials = args.trials;
    return options;
}

std::string schedule_text(const Schedule& schedule) {
    std::string out;
    for (int k = 0; k < schedule.horizon(); ++k) {
        if (k) out += ';';
        out += std::to_string(schedule.pick(k) + 1);
    }
    return out;
}

void print_comparison(const ComparisonReport& report) {
    std::printf("%-12s %4s %8s %20s %14s %7s  %s\n", "method", "N", "budget", "J_total",
                "nodes_visited", "relax", "schedule");
    for (const MethodRun& run : report.methods)
        std::printf("%-12s %4d %8.6g %20.15g %14lld %7lld  %s\n",
                    method_name(run.method).c_str(), report.horizon, report.budget,
                    run.J_total, static_cast<long long>(run.stats.nodes_visited),
                    static_cast<long long>(run.stats.relaxations_solved),
                    schedule_text(run.schedule).c_str());
}

int cmd_solve(const CommonArgs& args) {
    const ScenarioConfig cfg = configured_scenario(args);
    const std::vector<Method> methods = parse_methods(args.methods);
    if (methods.size() != 1)
        throw config_error("solve expects exactly one --method");
    const ComparisonReport report = run_compare(cfg, methods, harness_options(args));
    if (!args.out.empty()) emit_csv(report, args.out, args.timing);
    print_comparison(report);
    return 0;
}

int cmd_compare(const CommonArgs& args) {
    const ScenarioConfig cfg = configured_scenario(args);
    const ComparisonReport report =
        run_compare(cfg, parse_methods(args.methods), harness_options(args));
    if (!args.out.empty()) {
        emit_csv(report, args.out, args.timing);
        std::printf("wrote %s\n", args.out.c_str());
    } else {
        print_comparison(report);
    }
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const ScenarioConfig cfg = configured_scenario(args);
    const RmseReport report = run_monte_carlo(cfg, parse_methods(args.methods), args.runs,
                                              harness_options(args));
    if (!args.out.empty()) {
        emit_csv(report, args.out);
        std::printf("wrote %s (%d runs, seed %llu)\n", args.out.c_str(), report.runs,
                    static_cast<unsigned long long>(report.seed));
    } else {
        std::printf("%-12s %4s %18s\n", "method", "k", "rmse_position");
        for (const RmseSeries& series : report.methods)
            for (std::size_t k = 0; k < series.rmse_position.size(); ++k)
                std::printf("%-12s %4zu %18.12g\n", method_name(series.method).c_str(), k + 1,
                            series.rmse_position[k]);
    }
    return 0;
}

int cmd_bench(const CommonArgs& args) {
    const ScenarioConfig cfg = configured_scenario(args);
    const std::vector<Method> methods = parse_methods(args.methods);
    const int max_horizon = args.horizon > 0 ? args.horizon : cfg.horizon;
    std::vector<ComparisonReport> reports;
    reports.reserve(static_cast<std::size_t>(max_horizon));
    for (int n = 1; n <= max_horizon; ++n) {
        HarnessOptions options = harness_options(args);
        options.horizon_override = n;
        reports.push_back(run_compare(cfg, methods, options));
    }
    if (!args.out.empty()) {
        emit_csv(reports, args.out, args.timing);
        std::printf("wrote %s\n", args.out.c_str());
    } else {
        for (const ComparisonReport& report : reports) print_comparison(report);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-step sensor scheduling for linear Gaussian systems"};
    app.require_subcommand(1);

    CommonArgs solve_args, compare_args, simulate_args, bench_args;
    int rc = 0;

    CLI::App* solve = app.add_subcommand("solve", "Compute one method's schedule");
    add_common_flags(solve, solve_args, "bbc");
    solve->callback([&] { rc = cmd_solve(solve_args); });

    CLI::App* compare = app.add_subcommand("compare", "Run several methods side by side");
    add_common_flags(compare, compare_args, "convex,bbc,bbl,bbz,greedy,greedy-star");
    compare->callback([&] { rc = cmd_compare(compare_args); });

    CLI::App* simulate =
        app.add_subcommand("simulate", "Monte Carlo tracking-error evaluation");
    add_common_flags(simulate, simulate_args, "greedy,greedy-star,convex,bbc");
    simulate->add_option("--runs", simulate_args.runs, "Number of Monte Carlo runs")
        ->check(CLI::PositiveNumber);
    simulate->callback([&] { rc = cmd_simulate(simulate_args); });

    CLI::App* bench =
        app.add_subcommand("bench", "Sweep horizons 1..N and tabulate search effort");
    add_common_flags(bench, bench_args, "bbc,bbl,bbz");
    bench->callback([&] { rc = cmd_bench(bench_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // malformed invocations are configuration errors
    } catch (const sensched::config_error& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const sensched::infeasible_error& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return 3;
    } catch (const sensched::numerical_error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const sensched::size_error& e) {
        std::fprintf(stderr, "size guard: %s\n", e.what());
        return 5;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return rc;
}
