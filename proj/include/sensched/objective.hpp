#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sensched/model.hpp"

namespace sensched {

/// Scalar uncertainty measure applied to a posterior covariance matrix.
enum class Measure { Trace, RootDeterminant, MaxEigenvalue };

/// What to minimize. With `greedy_star_weighting` each per-step value is
/// multiplied by (1 + c_kᵀu_k); that variant exists for the cost-aware greedy
/// baseline only and is rejected by the relaxation solver and by grad_J.
struct ObjectiveSpec {
    Measure kind = Measure::RootDeterminant;
    bool greedy_star_weighting = false;
};

struct ObjectiveValue {
    double total = 0.0;
    std::vector<double> per_step;  // g_1 .. g_N (the initial covariance is excluded)
};

/// Per-step measure g(C): trace, sqrt(det), or largest eigenvalue, multiplied
/// by (1 + cost_dot) iff greedy_star_weighting (cost_dot = c_kᵀu_k for the
/// step). Throws numerical_error when C is not positive definite.
double eval_g(const Eigen::MatrixXd& C, const ObjectiveSpec& spec, double cost_dot = 0.0);

/// Cumulative objective J(u) = Σ_{k=1..N} g_k. `u` is an n×S weight matrix
/// whose row r drives global step start_step+1+r; `C_init` overrides the
/// starting covariance (defaults to the system's C0). The windowed form lets
/// tree search evaluate tail subproblems without rebuilding the model.
ObjectiveValue eval_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                      const Eigen::MatrixXd& u, const ObjectiveSpec& spec, int start_step = 0,
                      const Eigen::MatrixXd* C_init = nullptr);
ObjectiveValue eval_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                      const Schedule& schedule, const ObjectiveSpec& spec);
ObjectiveValue eval_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                      const RelaxedSchedule& relaxed, const ObjectiveSpec& spec);

struct Gradient {
    Eigen::MatrixXd d_u;       // ∂J/∂u_{k,i}, same shape as the input weights
    bool subgradient = false;  // true for MaxEigenvalue (nonsmooth at repeated eigenvalues)
};

/// Reverse-mode gradient of eval_J with respect to the schedule weights.
/// Forward pass stores the covariance recursion; the backward pass maintains
/// the adjoint S_k = ∂J/∂C_k, giving ∂J/∂u_{k,i} = −tr(C_k S_k C_k · M_k^i)
/// and S_{k−1} = ∂g_{k−1}/∂C + A_{k−1}ᵀ P_k⁻¹ (C_k S_k C_k) P_k⁻¹ A_{k−1}.
/// Rejects greedy_star_weighting (config_error). Windowing as in eval_J.
Gradient grad_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                const Eigen::MatrixXd& u, const ObjectiveSpec& spec, int start_step = 0,
                const Eigen::MatrixXd* C_init = nullptr);
Gradient grad_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                const RelaxedSchedule& relaxed, const ObjectiveSpec& spec);

}  // namespace sensched
