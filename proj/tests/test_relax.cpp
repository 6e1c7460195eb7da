#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sensched/errors.hpp"
#include "sensched/relax.hpp"
#include "sensched/rng.hpp"
#include "support/oracles.hpp"

using namespace sensched;

TEST_CASE("simplex projection fixed points and vertices") {
    Eigen::VectorXd a(2);
    a << 0.2, 0.8;
    CHECK((project_row_simplex(a) - a).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::VectorXd b(2);
    b << 2.0, 0.0;
    Eigen::VectorXd vb(2);
    vb << 1.0, 0.0;
    CHECK((project_row_simplex(b) - vb).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::VectorXd c = Eigen::VectorXd::Constant(3, 0.5);
    CHECK((project_row_simplex(c) - Eigen::VectorXd::Constant(3, 1.0 / 3.0))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("simplex projection is a true Euclidean projection") {
    Rng rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const int S = 2 + static_cast<int>(rng.next_u64() % 5);
        Eigen::VectorXd v(S);
        for (int i = 0; i < S; ++i) v(i) = 4.0 * (rng.uniform() - 0.5);
        const Eigen::VectorXd p = project_row_simplex(v);
        CHECK(p.minCoeff() >= 0.0);
        CHECK(std::abs(p.sum() - 1.0) < 1e-12);
        CHECK((project_row_simplex(p) - p).cwiseAbs().maxCoeff() < 1e-12);  // idempotent
        CHECK((p - oracles::oracle_simplex(v)).cwiseAbs().maxCoeff() < 1e-12);
        // No random simplex point may be closer to v than the projection.
        for (int probe = 0; probe < 10; ++probe) {
            const Eigen::VectorXd q =
                oracles::random_row_stochastic(1, S, rng).row(0).transpose();
            CHECK((v - p).squaredNorm() <= (v - q).squaredNorm() + 1e-12);
        }
    }
}

TEST_CASE("feasibility is decided by the cheapest schedule") {
    Eigen::MatrixXd costs(2, 2);
    costs << 1.0, 3.0, 2.0, 5.0;
    CHECK(FeasibleSet(costs, 3.0).feasible());   // min total = 3
    CHECK(FeasibleSet(costs, 2.9).feasible() == false);
    CHECK(FeasibleSet(costs, 3.0).min_total_cost() == 3.0);
    Eigen::MatrixXd negative(1, 2);
    negative << -1.0, 2.0;
    CHECK_THROWS_AS(FeasibleSet(negative, 5.0), config_error);
}

TEST_CASE("membership checks rows, signs, and budget") {
    Eigen::MatrixXd costs(2, 3);
    costs << 1.0, 2.0, 3.0, 1.0, 2.0, 3.0;
    FeasibleSet fs(costs, 4.0);
    Eigen::MatrixXd u(2, 3);
    u << 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;  // cost 3
    CHECK(fs.contains(u));
    u(1, 1) = 0.0;
    u(1, 2) = 1.0;  // cost 4, row still one-hot
    CHECK(fs.contains(u));
    u(1, 2) = 0.9;  // row sums to 0.9
    CHECK_FALSE(fs.contains(u));
    u(1, 2) = 1.0;
    u(0, 0) = 0.0;
    u(0, 2) = 1.0;  // cost 6 > 4
    CHECK_FALSE(fs.contains(u));
    CHECK(fs.cost_of(Schedule({0, 0}, 3)) == 2.0);
    CHECK(fs.contains(Schedule({0, 2}, 3)));
    CHECK_FALSE(fs.contains(Schedule({2, 2}, 3)));
}

TEST_CASE("feasible points are fixed points of the polytope projection") {
    Eigen::MatrixXd costs(3, 3);
    costs << 1.0, 2.0, 0.0, 2.0, 1.0, 0.0, 3.0, 3.0, 0.0;
    FeasibleSet fs(costs, 4.0);
    Rng rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd u = oracles::random_row_stochastic(3, 3, rng);
        if (!fs.contains(u)) continue;
        const RelaxedSchedule p = project_feasible(u, fs);
        CHECK((p.matrix() - u).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("inactive budget reduces to row-wise simplex projection") {
    Eigen::MatrixXd costs(2, 3);
    costs << 1.0, 2.0, 3.0, 1.0, 2.0, 3.0;
    FeasibleSet fs(costs, 6.0);  // sum of row maxima => never binding
    Rng rng(606);
    Eigen::MatrixXd v(2, 3);
    for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 3; ++i) v(k, i) = 3.0 * (rng.uniform() - 0.5);
    const RelaxedSchedule p = project_feasible(v, fs);
    for (int k = 0; k < 2; ++k)
        CHECK((p.matrix().row(k).transpose() - project_row_simplex(v.row(k).transpose()))
                  .cwiseAbs()
                  .maxCoeff() < 1e-8);
}

TEST_CASE("polytope projection matches the multiplier oracle on a 2x3 instance") {
    Eigen::MatrixXd costs(2, 3);
    costs << 3.0, 1.0, 2.0, 2.0, 3.0, 1.0;
    FeasibleSet fs(costs, 3.0);
    Eigen::MatrixXd v(2, 3);  // uniform rows overshoot the budget (cost 4 > 3)
    v.setConstant(1.0 / 3.0);
    const RelaxedSchedule p = project_feasible(v, fs);
    const Eigen::MatrixXd q = oracles::project_polytope_oracle(v, costs, 3.0);
    CHECK((p.matrix() - q).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(fs.contains(p.matrix()));  // within the documented budget band
    // Mass must have moved toward the cheap sensors.
    CHECK(p.matrix()(0, 1) > v(0, 1));
    CHECK(p.matrix()(1, 2) > v(1, 2));
    CHECK(p.matrix()(0, 0) < v(0, 0));
    CHECK(p.matrix()(1, 1) < v(1, 1));
}

TEST_CASE("polytope projection matches the multiplier oracle on random instances") {
    Rng rng(707);
    for (int trial = 0; trial < 30; ++trial) {
        const int N = 1 + static_cast<int>(rng.next_u64() % 4);
        const int S = 2 + static_cast<int>(rng.next_u64() % 3);
        Eigen::MatrixXd costs(N, S);
        for (int k = 0; k < N; ++k)
            for (int i = 0; i < S; ++i) costs(k, i) = 3.0 * rng.uniform();
        const double min_total = costs.rowwise().minCoeff().sum();
        const double max_total = costs.rowwise().maxCoeff().sum();
        const double budget = min_total + 0.4 * (max_total - min_total);
        FeasibleSet fs(costs, budget);
        Eigen::MatrixXd v(N, S);
        for (int k = 0; k < N; ++k)
            for (int i = 0; i < S; ++i) v(k, i) = 2.0 * (rng.uniform() - 0.3);
        const RelaxedSchedule p = project_feasible(v, fs);
        const Eigen::MatrixXd q = oracles::project_polytope_oracle(v, costs, budget);
        CHECK((p.matrix() - q).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(fs.contains(p.matrix()));
    }
}

TEST_CASE("relaxed solve on symmetric sensors reaches the shared optimum") {
    const int d = 2, N = 2;
    const Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd R = 0.5 * Eigen::MatrixXd::Identity(d, d);
    auto sys = LinearGaussianSystem::time_invariant(
        Eigen::MatrixXd::Identity(d, d), 0.1 * Eigen::MatrixXd::Identity(d, d),
        Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), N);
    SensorSet sensors({Sensor::time_invariant(H, R, 1.0, d, N),
                       Sensor::time_invariant(H, R, 1.0, d, N)});
    FeasibleSet fs(sensors.cost_matrix(), 100.0);
    const auto sol = solve_relaxed(sys, sensors, fs, {Measure::Trace});
    const double binary =
        eval_J(sys, sensors, Schedule({0, 0}, 2), {Measure::Trace}).total;
    CHECK(sol.J_lower == doctest::Approx(binary).epsilon(1e-8));
    CHECK(sol.converged);
}

TEST_CASE("relaxed solve concentrates on a dominating sensor") {
    const int d = 2, N = 2;
    const Eigen::MatrixXd Ha = Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd Ra = 0.1 * Eigen::MatrixXd::Identity(d, d);
    const Eigen::MatrixXd Hb = (Eigen::MatrixXd(1, 2) << 1.0, 0.0).finished();
    const Eigen::MatrixXd Rb = 10.0 * Eigen::MatrixXd::Identity(1, 1);
    auto sys = LinearGaussianSystem::time_invariant(
        Eigen::MatrixXd::Identity(d, d), 0.1 * Eigen::MatrixXd::Identity(d, d),
        Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d), N);
    SensorSet sensors({Sensor::time_invariant(Ha, Ra, 1.0, d, N),
                       Sensor::time_invariant(Hb, Rb, 1.0, d, N)});
    FeasibleSet fs(sensors.cost_matrix(), 100.0);
    const auto sol = solve_relaxed(sys, sensors, fs, {Measure::Trace});
    for (int k = 0; k < N; ++k) {
        CHECK(sol.u_star.matrix()(k, 0) > 1.0 - 1e-6);
        CHECK(sol.u_star.matrix()(k, 1) < 1e-6);
    }
}

TEST_CASE("relaxed value lower-bounds every binary schedule") {
    for (int trial = 0; trial < 12; ++trial) {
        auto inst = oracles::random_instance(3000 + trial, 4, 3, 3);
        FeasibleSet fs(inst.costs, inst.budget);
        REQUIRE(fs.feasible());
        const auto sol =
            solve_relaxed(inst.sys, inst.sensors, fs, {Measure::RootDeterminant});
        const auto oracle = oracles::naive_exhaustive(
            inst.sys, inst.sensors, inst.costs, inst.budget, Measure::RootDeterminant);
        REQUIRE(oracle.has_value());
        CHECK(sol.J_lower <= oracle->J + 1e-7 * (1.0 + std::abs(oracle->J)));
        CHECK(fs.contains(sol.u_star.matrix()));
    }
}

TEST_CASE("relaxed solve never exceeds the objective at its own start") {
    auto inst = oracles::tracking_instance(4, 6.0);
    FeasibleSet fs(inst.costs, 6.0);
    const Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(
        4, inst.sensors.size(), 1.0 / static_cast<double>(inst.sensors.size()));
    const RelaxedSchedule start = project_feasible(uniform, fs);
    const double at_start =
        eval_J(inst.sys, inst.sensors, start, {Measure::RootDeterminant}).total;
    const auto sol = solve_relaxed(inst.sys, inst.sensors, fs, {Measure::RootDeterminant});
    CHECK(sol.J_lower <= at_start + 1e-12);
    CHECK(sol.iterations >= 0);
    CHECK(sol.kkt_residual >= 0.0);
}

TEST_CASE("relaxed solve is deterministic") {
    auto inst = oracles::tracking_instance(5, 8.0);
    FeasibleSet fs(inst.costs, 8.0);
    const auto a = solve_relaxed(inst.sys, inst.sensors, fs, {Measure::RootDeterminant});
    const auto b = solve_relaxed(inst.sys, inst.sensors, fs, {Measure::RootDeterminant});
    CHECK(a.iterations == b.iterations);
    CHECK(a.J_lower == b.J_lower);
    CHECK((a.u_star.matrix() - b.u_star.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("warm starts converge to the same value as cold starts") {
    auto inst = oracles::tracking_instance(4, 6.0);
    FeasibleSet fs(inst.costs, 6.0);
    const auto cold = solve_relaxed(inst.sys, inst.sensors, fs, {Measure::RootDeterminant});
    // Warm-start from a perturbed copy of the solution.
    Eigen::MatrixXd warm = cold.u_star.matrix();
    warm(0, 0) += 0.2;
    const auto again = solve_relaxed(inst.sys, inst.sensors, fs, {Measure::RootDeterminant},
                                     {}, 0, nullptr, &warm);
    CHECK(again.J_lower <= cold.J_lower + 1e-6 * (1.0 + std::abs(cold.J_lower)));
}

TEST_CASE("relaxed solve handles the max-eig objective") {
    auto inst = oracles::tracking_instance(3, 5.0);
    FeasibleSet fs(inst.costs, 5.0);
    const auto sol = solve_relaxed(inst.sys, inst.sensors, fs, {Measure::MaxEigenvalue});
    const auto oracle = oracles::naive_exhaustive(inst.sys, inst.sensors, inst.costs, 5.0,
                                                  Measure::MaxEigenvalue);
    REQUIRE(oracle.has_value());
    CHECK(sol.J_lower <= oracle->J + 1e-6 * (1.0 + std::abs(oracle->J)));
    CHECK(fs.contains(sol.u_star.matrix()));
}

TEST_CASE("infeasible sets and star weighting are configuration errors") {
    auto inst = oracles::tracking_instance(2, 100.0);
    Eigen::MatrixXd costs(2, inst.sensors.size());
    costs.setConstant(5.0);
    FeasibleSet infeasible(costs, 1.0);
    CHECK_THROWS_AS(
        solve_relaxed(inst.sys, inst.sensors, infeasible, {Measure::Trace}), config_error);
    FeasibleSet fs(inst.costs, 100.0);
    CHECK_THROWS_AS(
        solve_relaxed(inst.sys, inst.sensors, fs, {Measure::Trace, true}), config_error);
}
