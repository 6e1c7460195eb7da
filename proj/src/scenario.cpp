#include "sensched/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "sensched/errors.hpp"

namespace sensched {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
    throw config_error("scenario" + pointer + ": " + what);
}

const json& require(const json& obj, const char* key, const std::string& pointer) {
    if (!obj.is_object()) fail(pointer, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(pointer + "/" + key, "missing");
    return *it;
}

double as_number(const json& j, const std::string& pointer) {
    if (!j.is_number()) fail(pointer, "expected a number");
    return j.get<double>();
}

int as_int(const json& j, const std::string& pointer) {
    if (!j.is_number_integer()) fail(pointer, "expected an integer");
    return j.get<int>();
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& pointer) {
    if (!j.is_array() || j.empty()) fail(pointer, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) fail(pointer + "/0", "expected a non-empty row");
    const std::size_t cols = j[0].size();
    Eigen::MatrixXd m(static_cast<int>(rows), static_cast<int>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_ptr = pointer + "/" + std::to_string(r);
        if (!j[r].is_array() || j[r].size() != cols)
            fail(row_ptr, "expected a row of length " + std::to_string(cols));
        for (std::size_t c = 0; c < cols; ++c)
            m(static_cast<int>(r), static_cast<int>(c)) =
                as_number(j[r][c], row_ptr + "/" + std::to_string(c));
    }
    return m;
}

Eigen::VectorXd parse_vector(const json& j, const std::string& pointer) {
    if (!j.is_array() || j.empty()) fail(pointer, "expected a non-empty array of numbers");
    Eigen::VectorXd v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<int>(i)) = as_number(j[i], pointer + "/" + std::to_string(i));
    return v;
}

/// A dynamics entry is either one matrix (broadcast) or a list of matrices.
std::vector<Eigen::MatrixXd> parse_matrix_or_list(const json& j, const std::string& pointer) {
    if (!j.is_array() || j.empty()) fail(pointer, "expected a matrix or a list of matrices");
    if (j[0].is_array() && !j[0].empty() && j[0][0].is_array()) {
        std::vector<Eigen::MatrixXd> out;
        out.reserve(j.size());
        for (std::size_t i = 0; i < j.size(); ++i)
            out.push_back(parse_matrix(j[i], pointer + "/" + std::to_string(i)));
        return out;
    }
    return {parse_matrix(j, pointer)};
}

Measure parse_measure(const std::string& text, const std::string& pointer) {
    if (text == "trace") return Measure::Trace;
    if (text == "root-det") return Measure::RootDeterminant;
    if (text == "max-eig") return Measure::MaxEigenvalue;
    fail(pointer, "unknown objective '" + text + "' (expected trace, root-det, or max-eig)");
}

BudgetSpec parse_budget_json(const json& j, const std::string& pointer) {
    if (j.is_number()) return BudgetSpec::explicit_value(j.get<double>());
    if (!j.is_object()) fail(pointer, "expected a number or an object");
    if (j.contains("value")) {
        return BudgetSpec::explicit_value(as_number(j["value"], pointer + "/value"));
    }
    if (j.contains("linear")) {
        const json& lin = j["linear"];
        const std::string lp = pointer + "/linear";
        const double rate = as_number(require(lin, "rate", lp), lp + "/rate");
        bool round_half_away = false;
        if (lin.contains("rounding")) {
            const json& r = lin["rounding"];
            if (!r.is_string()) fail(lp + "/rounding", "expected a string");
            const std::string mode = r.get<std::string>();
            if (mode == "half-away-from-zero")
                round_half_away = true;
            else if (mode != "none")
                fail(lp + "/rounding",
                     "unknown mode '" + mode + "' (expected half-away-from-zero or none)");
        }
        return BudgetSpec::linear(rate, round_half_away);
    }
    fail(pointer, "expected a 'value' or 'linear' budget");
}

void append_matrix(std::string& buf, const Eigen::MatrixXd& m) {
    char tmp[64];
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            std::snprintf(tmp, sizeof(tmp), "%.17g,", m(r, c));
            buf += tmp;
        }
    buf += ';';
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

BudgetSpec BudgetSpec::explicit_value(double v) {
    BudgetSpec b;
    b.kind = Kind::Explicit;
    b.value = v;
    return b;
}

BudgetSpec BudgetSpec::linear(double rate, bool round_half_away) {
    BudgetSpec b;
    b.kind = Kind::Linear;
    b.rate = rate;
    b.round_half_away = round_half_away;
    return b;
}

double BudgetSpec::evaluate(int horizon) const {
    if (horizon < 1) throw config_error("budget evaluation needs a positive horizon");
    if (kind == Kind::Explicit) return value;
    const double raw = rate * static_cast<double>(horizon);
    return round_half_away ? std::round(raw) : raw;
}

int ScenarioConfig::effective_horizon(int horizon_override) const {
    const int N = horizon_override > 0 ? horizon_override : horizon;
    if (N < 1) throw config_error("horizon must be >= 1");
    return N;
}

LinearGaussianSystem ScenarioConfig::build_system(int horizon_override) const {
    const int N = effective_horizon(horizon_override);
    const auto broadcast = [N](const std::vector<Eigen::MatrixXd>& seq,
                               const char* what) -> std::vector<Eigen::MatrixXd> {
        if (seq.size() == 1) return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(N), seq[0]);
        if (static_cast<int>(seq.size()) < N)
            throw config_error(std::string(what) + " lists " + std::to_string(seq.size()) +
                               " steps but the horizon is " + std::to_string(N));
        return {seq.begin(), seq.begin() + N};
    };
    return LinearGaussianSystem(broadcast(A, "dynamics A"), broadcast(Qw, "dynamics Qw"),
                                x0_mean, C0);
}

SensorSet ScenarioConfig::build_sensors(int horizon_override) const {
    const int N = effective_horizon(horizon_override);
    std::vector<Sensor> out;
    out.reserve(sensors.size());
    for (const SensorConfig& sc : sensors) {
        if (sc.null)
            out.push_back(Sensor::null_sensor(state_dim, N, sc.cost));
        else
            out.push_back(Sensor::time_invariant(sc.H, sc.R, sc.cost, state_dim, N));
    }
    return SensorSet(std::move(out));
}

ObjectiveSpec ScenarioConfig::objective_spec() const { return ObjectiveSpec{objective, false}; }

std::string ScenarioConfig::fingerprint() const {
    std::string buf = name + '|' + std::to_string(state_dim) + '|';
    for (const auto& m : A) append_matrix(buf, m);
    buf += '|';
    for (const auto& m : Qw) append_matrix(buf, m);
    buf += '|';
    append_matrix(buf, x0_mean);
    append_matrix(buf, C0);
    for (const SensorConfig& sc : sensors) {
        if (sc.null)
            buf += "null";
        else {
            append_matrix(buf, sc.H);
            append_matrix(buf, sc.R);
        }
        char tmp[64];
        std::snprintf(tmp, sizeof(tmp), "%.17g|", sc.cost);
        buf += tmp;
    }
    buf += std::to_string(static_cast<int>(objective)) + '|' + std::to_string(horizon) + '|';
    {
        char tmp[128];
        std::snprintf(tmp, sizeof(tmp), "%d,%.17g,%.17g,%d|", static_cast<int>(budget.kind),
                      budget.value, budget.rate, budget.round_half_away ? 1 : 0);
        buf += tmp;
    }
    buf += std::to_string(seed) + '|';
    for (int p : position_indices) buf += std::to_string(p) + ',';

    char out[32];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(fnv1a(buf)));
    return out;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open scenario file: " + path);
    json root;
    try {
        in >> root;
    } catch (const json::parse_error& e) {
        throw config_error("scenario " + path + " is not valid JSON: " + e.what());
    }

    if (as_int(require(root, "schema", ""), "/schema") != 1)
        fail("/schema", "unsupported schema version (expected 1)");

    ScenarioConfig cfg;
    if (root.contains("name")) {
        if (!root["name"].is_string()) fail("/name", "expected a string");
        cfg.name = root["name"].get<std::string>();
    }
    cfg.state_dim = as_int(require(root, "state_dim", ""), "/state_dim");
    if (cfg.state_dim < 1) fail("/state_dim", "must be positive");

    const json& dyn = require(root, "dynamics", "");
    cfg.A = parse_matrix_or_list(require(dyn, "A", "/dynamics"), "/dynamics/A");
    cfg.Qw = parse_matrix_or_list(require(dyn, "Qw", "/dynamics"), "/dynamics/Qw");

    const json& init = require(root, "initial", "");
    cfg.x0_mean = parse_vector(require(init, "mean", "/initial"), "/initial/mean");
    cfg.C0 = parse_matrix(require(init, "C0", "/initial"), "/initial/C0");

    const json& sensors = require(root, "sensors", "");
    if (!sensors.is_array() || sensors.empty())
        fail("/sensors", "expected a non-empty array");
    for (std::size_t i = 0; i < sensors.size(); ++i) {
        const std::string sp = "/sensors/" + std::to_string(i);
        const json& sj = sensors[i];
        if (!sj.is_object()) fail(sp, "expected an object");
        SensorConfig sc;
        sc.cost = as_number(require(sj, "cost", sp), sp + "/cost");
        if (sc.cost < 0.0) fail(sp + "/cost", "must be nonnegative");
        const json& R = require(sj, "R", sp);
        if (R.is_string()) {
            if (R.get<std::string>() != "null")
                fail(sp + "/R", "expected a matrix or the string \"null\"");
            sc.null = true;
        } else {
            sc.R = parse_matrix(R, sp + "/R");
            sc.H = parse_matrix(require(sj, "H", sp), sp + "/H");
        }
        cfg.sensors.push_back(std::move(sc));
    }

    const json& obj = require(root, "objective", "");
    if (!obj.is_string()) fail("/objective", "expected a string");
    cfg.objective = parse_measure(obj.get<std::string>(), "/objective");

    cfg.horizon = as_int(require(root, "horizon", ""), "/horizon");
    if (cfg.horizon < 1) fail("/horizon", "must be >= 1");

    cfg.budget = parse_budget_json(require(root, "budget", ""), "/budget");

    if (root.contains("seed")) {
        const json& s = root["seed"];
        if (!s.is_number_integer() || (s.is_number_integer() && s.get<double>() < 0))
            fail("/seed", "expected a nonnegative integer");
        cfg.seed = s.get<std::uint64_t>();
    }
    if (root.contains("position_indices")) {
        const json& p = root["position_indices"];
        if (!p.is_array()) fail("/position_indices", "expected an array of state indices");
        for (std::size_t i = 0; i < p.size(); ++i) {
            const int idx = as_int(p[i], "/position_indices/" + std::to_string(i));
            if (idx < 0 || idx >= cfg.state_dim)
                fail("/position_indices/" + std::to_string(i), "state index out of range");
            cfg.position_indices.push_back(idx);
        }
    }
    if (cfg.position_indices.empty())
        for (int d = 0; d < cfg.state_dim; ++d) cfg.position_indices.push_back(d);

    // Surface dimension/PSD problems now, with the file still in hand.
    try {
        (void)cfg.build_system();
        (void)cfg.build_sensors();
    } catch (const config_error& e) {
        throw config_error("scenario " + path + ": " + e.what());
    }
    return cfg;
}

BudgetSpec parse_budget(const std::string& text) {
    if (text.rfind("linear:", 0) == 0) {
        const std::string rest = text.substr(7);
        const std::size_t colon = rest.find(':');
        const std::string rate_str = colon == std::string::npos ? rest : rest.substr(0, colon);
        bool round_half_away = false;
        if (colon != std::string::npos) {
            const std::string mode = rest.substr(colon + 1);
            if (mode == "round")
                round_half_away = true;
            else
                throw config_error("unknown budget rounding '" + mode + "' (expected 'round')");
        }
        try {
            std::size_t used = 0;
            const double rate = std::stod(rate_str, &used);
            if (used != rate_str.size()) throw std::invalid_argument(rate_str);
            return BudgetSpec::linear(rate, round_half_away);
        } catch (const std::exception&) {
            throw config_error("cannot parse budget rate '" + rate_str + "'");
        }
    }
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return BudgetSpec::explicit_value(value);
    } catch (const std::exception&) {
        throw config_error("cannot parse budget '" + text +
                           "' (expected VALUE or linear:RATE[:round])");
    }
}

}  // namespace sensched
