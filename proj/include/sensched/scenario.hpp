#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "sensched/model.hpp"
#include "sensched/objective.hpp"

namespace sensched {

/// Budget as either a fixed value or a linear-in-horizon rule rate·N,
/// optionally rounded half away from zero.
struct BudgetSpec {
    enum class Kind { Explicit, Linear };
    Kind kind = Kind::Explicit;
    double value = 0.0;            // Explicit
    double rate = 0.0;             // Linear
    bool round_half_away = false;  // Linear: round(rate·N) half away from zero

    static BudgetSpec explicit_value(double v);
    static BudgetSpec linear(double rate, bool round_half_away = false);

    double evaluate(int horizon) const;
};

struct SensorConfig {
    Eigen::MatrixXd H;  // ignored for the null sensor
    Eigen::MatrixXd R;  // ignored for the null sensor
    bool null = false;
    double cost = 0.0;
};

/// A fully described scheduling problem, as read from a scenario file.
/// Dynamics with a single entry broadcast over any horizon; per-step lists
/// must cover the requested horizon.
struct ScenarioConfig {
    std::string name;
    int state_dim = 0;
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::MatrixXd> Qw;
    Eigen::VectorXd x0_mean;
    Eigen::MatrixXd C0;
    std::vector<SensorConfig> sensors;
    Measure objective = Measure::RootDeterminant;
    int horizon = 1;
    BudgetSpec budget;
    std::uint64_t seed = 0;
    std::vector<int> position_indices;  // state coordinates whose error defines tracking RMSE

    /// Horizon actually used given an optional override (0 → config value).
    int effective_horizon(int horizon_override = 0) const;

    LinearGaussianSystem build_system(int horizon_override = 0) const;
    SensorSet build_sensors(int horizon_override = 0) const;
    ObjectiveSpec objective_spec() const;

    /// Stable content hash over every field (16 hex digits); identifies the
    /// scenario in reports independently of file formatting.
    std::string fingerprint() const;
};

/// Reads and validates a scenario JSON file (schema version 1). Errors carry
/// the JSON pointer of the offending field.
ScenarioConfig load_scenario(const std::string& path);

/// Parses a budget given as "VALUE" or "linear:RATE[:round]" (the trailing
/// ":round" enables half-away-from-zero rounding). Used by the CLI.
BudgetSpec parse_budget(const std::string& text);

}  // namespace sensched
