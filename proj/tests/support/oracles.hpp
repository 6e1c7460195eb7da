#pragma once

// Deliberately naive reference implementations used to cross-check the
// library: explicit inverse() arithmetic instead of factorizations, odometer
// enumeration instead of tree search, bisection on the budget multiplier
// instead of alternating projections. Slow and simple on purpose.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "sensched/model.hpp"
#include "sensched/objective.hpp"
#include "sensched/rng.hpp"

namespace oracles {

/// Straight-line information-form recursion, explicit inverses.
inline std::vector<Eigen::MatrixXd> naive_covariances(const sensched::LinearGaussianSystem& sys,
                                                      const sensched::SensorSet& sensors,
                                                      const Eigen::MatrixXd& u) {
    const int N = static_cast<int>(u.rows());
    std::vector<Eigen::MatrixXd> C;
    C.push_back(sys.C0());
    for (int k = 1; k <= N; ++k) {
        const Eigen::MatrixXd P =
            sys.A(k - 1) * C.back() * sys.A(k - 1).transpose() + sys.Qw(k - 1);
        Eigen::MatrixXd info = P.inverse();
        for (int i = 0; i < sensors.size(); ++i)
            info += u(k - 1, i) * sensors[i].info(k - 1);
        C.push_back(info.inverse());
    }
    return C;
}

inline double naive_g(const Eigen::MatrixXd& C, sensched::Measure kind) {
    switch (kind) {
        case sensched::Measure::Trace:
            return C.trace();
        case sensched::Measure::RootDeterminant:
            return std::sqrt(C.determinant());
        case sensched::Measure::MaxEigenvalue: {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
            return es.eigenvalues().maxCoeff();
        }
    }
    return 0.0;
}

inline double naive_J(const sensched::LinearGaussianSystem& sys,
                      const sensched::SensorSet& sensors, const Eigen::MatrixXd& u,
                      sensched::Measure kind) {
    const std::vector<Eigen::MatrixXd> C = naive_covariances(sys, sensors, u);
    double total = 0.0;
    for (std::size_t k = 1; k < C.size(); ++k) total += naive_g(C[k], kind);
    return total;
}

struct ExhaustiveResult {
    std::vector<int> picks;  // 0-based sensor per step, lexicographically first optimum
    double J = std::numeric_limits<double>::infinity();
};

/// Full enumeration over S^N schedules; nullopt when none fits the budget.
inline std::optional<ExhaustiveResult> naive_exhaustive(const sensched::LinearGaussianSystem& sys,
                                                        const sensched::SensorSet& sensors,
                                                        const Eigen::MatrixXd& costs,
                                                        double budget, sensched::Measure kind) {
    const int N = static_cast<int>(costs.rows());
    const int S = static_cast<int>(costs.cols());
    std::vector<int> picks(static_cast<std::size_t>(N), 0);
    std::optional<ExhaustiveResult> best;
    while (true) {
        double cost = 0.0;
        for (int k = 0; k < N; ++k) cost += costs(k, picks[static_cast<std::size_t>(k)]);
        if (cost <= budget + 1e-9 * std::max(1.0, std::abs(budget))) {
            Eigen::MatrixXd u = Eigen::MatrixXd::Zero(N, S);
            for (int k = 0; k < N; ++k) u(k, picks[static_cast<std::size_t>(k)]) = 1.0;
            const double J = naive_J(sys, sensors, u, kind);
            if (!best || J < best->J) best = ExhaustiveResult{picks, J};
        }
        int k = N - 1;  // odometer increment => lexicographic visiting order
        while (k >= 0 && picks[static_cast<std::size_t>(k)] == S - 1)
            picks[static_cast<std::size_t>(k--)] = 0;
        if (k < 0) break;
        ++picks[static_cast<std::size_t>(k)];
    }
    return best;
}

/// Central finite differences through the library objective.
inline Eigen::MatrixXd fd_grad(const sensched::LinearGaussianSystem& sys,
                               const sensched::SensorSet& sensors, const Eigen::MatrixXd& u,
                               const sensched::ObjectiveSpec& spec, double h = 1e-6) {
    Eigen::MatrixXd grad(u.rows(), u.cols());
    for (int k = 0; k < u.rows(); ++k) {
        for (int i = 0; i < u.cols(); ++i) {
            Eigen::MatrixXd up = u, down = u;
            up(k, i) += h;
            down(k, i) -= h;
            const double fp = sensched::eval_J(sys, sensors, up, spec).total;
            const double fm = sensched::eval_J(sys, sensors, down, spec).total;
            grad(k, i) = (fp - fm) / (2.0 * h);
        }
    }
    return grad;
}

/// Simplex projection, written independently of the library (plain loops).
inline Eigen::VectorXd oracle_simplex(const Eigen::VectorXd& v) {
    std::vector<double> sorted(v.data(), v.data() + v.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumulative = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        cumulative += sorted[j];
        const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
        if (sorted[j] - candidate > 0.0) theta = candidate;
    }
    Eigen::VectorXd out = v.array() - theta;
    return out.cwiseMax(0.0);
}

/// Exact Euclidean projection onto {rows on simplex, <c,u> <= budget} via the
/// Lagrangian: for multiplier mu >= 0 the row-separable minimizer is the
/// simplex projection of v_k - (mu/2) c_k, and the budget usage is monotone
/// non-increasing in mu, so bisection recovers the active multiplier.
inline Eigen::MatrixXd project_polytope_oracle(const Eigen::MatrixXd& v,
                                               const Eigen::MatrixXd& costs, double budget) {
    const auto project_at = [&](double mu) {
        Eigen::MatrixXd x(v.rows(), v.cols());
        for (int k = 0; k < v.rows(); ++k)
            x.row(k) =
                oracle_simplex(v.row(k).transpose() - 0.5 * mu * costs.row(k).transpose())
                    .transpose();
        return x;
    };
    const auto usage = [&](const Eigen::MatrixXd& x) { return (costs.array() * x.array()).sum(); };

    Eigen::MatrixXd x = project_at(0.0);
    if (usage(x) <= budget + 1e-12) return x;
    double lo = 0.0, hi = 1.0;
    while (usage(project_at(hi)) > budget && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (usage(project_at(mid)) > budget)
            lo = mid;
        else
            hi = mid;
    }
    return project_at(hi);
}

/// A randomly generated, always-feasible scheduling problem.
struct Instance {
    sensched::LinearGaussianSystem sys;
    sensched::SensorSet sensors;
    Eigen::MatrixXd costs;  // N x S
    double budget = 0.0;
};

inline Eigen::MatrixXd random_matrix(int rows, int cols, sensched::Rng& rng, double scale = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = scale * (2.0 * rng.uniform() - 1.0);
    return m;
}

inline Eigen::MatrixXd random_spd(int dim, sensched::Rng& rng, double scale, double ridge) {
    const Eigen::MatrixXd b = random_matrix(dim, dim, rng);
    return scale * (b * b.transpose()) + ridge * Eigen::MatrixXd::Identity(dim, dim);
}

/// Dimensions drawn from [2, max_d] x [2, max_S] x [1, max_N]; the last sensor
/// is the free null sensor half of the time. The budget lands strictly between
/// the cheapest and the most expensive schedule unless `loose_budget`.
inline Instance random_instance(std::uint64_t seed, int max_d = 4, int max_S = 4, int max_N = 4,
                                bool loose_budget = false) {
    sensched::Rng rng(seed);
    const int d = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_d - 1));
    const int S = 2 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_S - 1));
    const int N = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_N));

    const Eigen::MatrixXd A =
        Eigen::MatrixXd::Identity(d, d) + random_matrix(d, d, rng, 0.3);
    const Eigen::MatrixXd Qw = random_spd(d, rng, 0.1, 0.01);
    const Eigen::MatrixXd C0 = random_spd(d, rng, 0.5, 0.5);
    const Eigen::VectorXd x0 = random_matrix(d, 1, rng);
    auto sys = sensched::LinearGaussianSystem::time_invariant(A, Qw, x0, C0, N);

    const bool with_null = rng.uniform() < 0.5;
    std::vector<sensched::Sensor> list;
    for (int i = 0; i < S; ++i) {
        if (with_null && i == S - 1) {
            list.push_back(sensched::Sensor::null_sensor(d, N));
            continue;
        }
        const int m = 1 + static_cast<int>(rng.next_u64() % 2);
        const Eigen::MatrixXd H = random_matrix(m, d, rng);
        const Eigen::MatrixXd R = random_spd(m, rng, 0.2, 0.1);
        const double cost = 3.0 * rng.uniform();
        list.push_back(sensched::Sensor::time_invariant(H, R, cost, d, N));
    }
    sensched::SensorSet sensors(std::move(list));

    const Eigen::MatrixXd costs = sensors.cost_matrix();
    const double min_total = costs.rowwise().minCoeff().sum();
    const double max_total = costs.rowwise().maxCoeff().sum();
    const double budget = loose_budget
                              ? max_total + 1.0
                              : min_total + rng.uniform() * (max_total - min_total);
    return Instance{std::move(sys), std::move(sensors), costs, budget};
}

/// Row-stochastic matrix with rows sampled uniformly-ish on the simplex.
inline Eigen::MatrixXd random_row_stochastic(int N, int S, sensched::Rng& rng) {
    Eigen::MatrixXd u(N, S);
    for (int k = 0; k < N; ++k) {
        double sum = 0.0;
        for (int i = 0; i < S; ++i) {
            u(k, i) = -std::log(1.0 - rng.uniform());
            sum += u(k, i);
        }
        u.row(k) /= sum;
    }
    return u;
}

/// The experiment scenario built in code (no file I/O): planar
/// constant-velocity target, six position/velocity sensors plus a free null
/// sensor. Mirrors scenarios/tracking2d.json.
inline Instance tracking_instance(int horizon, double budget) {
    Eigen::MatrixXd block(2, 2);
    block << 1.0, 1.0, 0.0, 1.0;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A.block(0, 0, 2, 2) = block;
    A.block(2, 2, 2, 2) = block;

    Eigen::MatrixXd qblock(2, 2);
    qblock << 1.0 / 3.0, 0.5, 0.5, 1.0;
    Eigen::MatrixXd Qw = Eigen::MatrixXd::Zero(4, 4);
    Qw.block(0, 0, 2, 2) = 0.2 * qblock;
    Qw.block(2, 2, 2, 2) = 0.2 * qblock;

    Eigen::VectorXd x0(4);
    x0 << 0.0, 1.0, 0.0, 1.0;
    const Eigen::MatrixXd C0 = 10.0 * Eigen::MatrixXd::Identity(4, 4);
    auto sys = sensched::LinearGaussianSystem::time_invariant(A, Qw, x0, C0, horizon);

    const std::vector<std::vector<double>> rows = {
        {1, 0, 0, 0}, {0, 0, 1, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}, {0, 1, 0, 0}};
    const std::vector<double> variances = {0.2, 0.1, 0.1, 0.1, 0.05, 0.05};
    const std::vector<double> costs = {1, 2, 3, 2, 3, 2};
    std::vector<sensched::Sensor> list;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        Eigen::MatrixXd H(1, 4);
        for (int c = 0; c < 4; ++c) H(0, c) = rows[i][static_cast<std::size_t>(c)];
        Eigen::MatrixXd R(1, 1);
        R(0, 0) = variances[i];
        list.push_back(sensched::Sensor::time_invariant(H, R, costs[i], 4, horizon));
    }
    list.push_back(sensched::Sensor::null_sensor(4, horizon));
    sensched::SensorSet sensors(std::move(list));
    const Eigen::MatrixXd cost_matrix = sensors.cost_matrix();
    return Instance{std::move(sys), std::move(sensors), cost_matrix, budget};
}

}  // namespace oracles
