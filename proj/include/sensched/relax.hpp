#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "sensched/model.hpp"
#include "sensched/objective.hpp"

namespace sensched {

/// Constraint set of the scheduling program: one unit of selection mass per
/// time step (row of a simplex each) and a total-cost budget Σ_k c_kᵀu_k ≤ C.
/// Rows may describe a window of a longer horizon (used by tree search for
/// tail subproblems), so the set carries its own cost matrix rather than a
/// reference to the sensor set.
class FeasibleSet {
  public:
    /// `costs`: per-step × per-sensor nonnegative cost matrix; `budget`: C_max.
    FeasibleSet(Eigen::MatrixXd costs, double budget);

    int horizon() const { return static_cast<int>(costs_.rows()); }
    int num_sensors() const { return static_cast<int>(costs_.cols()); }
    const Eigen::MatrixXd& costs() const { return costs_; }
    double budget() const { return budget_; }

    /// True iff the cheapest selection per step fits the budget (within
    /// 1e-9·max(1,|C_max|)); fixed at construction.
    bool feasible() const { return feasible_; }
    double min_total_cost() const { return min_total_cost_; }

    /// Σ_k c_kᵀu_k for a weight matrix of matching shape.
    double cost_of(const Eigen::MatrixXd& u) const;

    /// Membership within tolerances: entries ≥ −1e-9, row sums within 1e-9 of
    /// one, budget violation ≤ 1e-9·max(1,|C_max|).
    bool contains(const Eigen::MatrixXd& u) const;

    /// Budget feasibility of a binary schedule (same budget tolerance).
    bool contains(const Schedule& schedule) const;
    double cost_of(const Schedule& schedule) const;

  private:
    Eigen::MatrixXd costs_;
    double budget_;
    double min_total_cost_;
    bool feasible_;
};

/// Euclidean projection of a vector onto the probability simplex
/// (sort-and-threshold). Output has nonnegative entries summing to one.
Eigen::VectorXd project_row_simplex(const Eigen::VectorXd& v);

/// Euclidean projection onto the feasible set via Dykstra's alternating
/// projection between the product of row simplices and the budget halfspace.
/// Runs until the successive-iterate Frobenius change drops below 1e-10
/// (throws numerical_error after 10000 sweeps, with the residuals in the
/// message). Requires fs.feasible().
RelaxedSchedule project_feasible(const Eigen::MatrixXd& u, const FeasibleSet& fs);

struct RelaxOptions {
    int max_iter = 5000;
    double tol = 1e-8;       // relative-decrease stall threshold
    std::uint64_t seed = 0;  // reserved for stochastic variants; the solver is deterministic
};

struct RelaxedSolution {
    RelaxedSchedule u_star;
    double J_lower = 0.0;     // eval_J at u_star — a lower bound on every binary schedule
    int iterations = 0;       // accepted gradient steps
    bool converged = false;   // true iff the stall criterion fired
    double kkt_residual = 0.0;  // ‖u − Π(u − ∇J)‖_∞ at u_star (first-order stationarity)
};

/// Minimizes J over the relaxed feasible set by projected gradient descent
/// with Armijo backtracking (c = 1e-4, halving, at most 20 halvings) from the
/// uniform-rows start projected to feasibility. Stops once the relative
/// objective decrease stays below options.tol for 10 consecutive iterations
/// (converged = true) or at max_iter / line-search failure (converged = false,
/// best iterate returned). MaxEigenvalue runs the same loop with the trial
/// step divided by ceil(iter/100). `start_step`/`C_init` window the system as
/// in eval_J; fs must match the window length. `u_init`, when given with the
/// right shape, replaces the uniform start (projected to feasibility first) —
/// tree search warm-starts tail solves with the parent's solution this way.
/// Throws config_error for an infeasible set or greedy-star weighting.
RelaxedSolution solve_relaxed(const LinearGaussianSystem& sys, const SensorSet& sensors,
                              const FeasibleSet& fs, const ObjectiveSpec& spec,
                              const RelaxOptions& options = {}, int start_step = 0,
                              const Eigen::MatrixXd* C_init = nullptr,
                              const Eigen::MatrixXd* u_init = nullptr);

}  // namespace sensched
