#include "sensched/objective.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "sensched/errors.hpp"

namespace sensched {

namespace {

/// sqrt(det C) via Cholesky in the log domain, so large/small determinants
/// neither overflow nor underflow.
double root_det(const Eigen::MatrixXd& C) {
    Eigen::LLT<Eigen::MatrixXd> llt(C);
    if (llt.info() != Eigen::Success)
        throw numerical_error("covariance is not positive definite");
    double half_logdet = 0.0;
    const auto& L = llt.matrixLLT();
    for (int j = 0; j < C.rows(); ++j) half_logdet += std::log(L(j, j));
    return std::exp(half_logdet);
}

double max_eigenvalue(const Eigen::MatrixXd& C) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw numerical_error("eigendecomposition failed");
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw numerical_error("covariance is not positive definite");
    return es.eigenvalues().maxCoeff();
}

/// ∂g/∂C at C for the plain (unweighted) measures.
Eigen::MatrixXd measure_gradient(const Eigen::MatrixXd& C, Measure kind) {
    switch (kind) {
        case Measure::Trace:
            return Eigen::MatrixXd::Identity(C.rows(), C.cols());
        case Measure::RootDeterminant: {
            Eigen::LLT<Eigen::MatrixXd> llt(C);
            if (llt.info() != Eigen::Success)
                throw numerical_error("covariance is not positive definite");
            Eigen::MatrixXd Cinv =
                llt.solve(Eigen::MatrixXd::Identity(C.rows(), C.cols()));
            return 0.5 * root_det(C) * 0.5 * (Cinv + Cinv.transpose());
        }
        case Measure::MaxEigenvalue: {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
            if (es.info() != Eigen::Success)
                throw numerical_error("eigendecomposition failed");
            const Eigen::VectorXd v = es.eigenvectors().col(C.rows() - 1);
            return v * v.transpose();
        }
    }
    throw config_error("unknown objective kind");
}

double cost_dot_row(const SensorSet& sensors, const Eigen::MatrixXd& u, int row, int step_k) {
    double dot = 0.0;
    for (int i = 0; i < u.cols(); ++i) dot += sensors[i].cost(step_k - 1) * u(row, i);
    return dot;
}

}  // namespace

double eval_g(const Eigen::MatrixXd& C, const ObjectiveSpec& spec, double cost_dot) {
    if (C.rows() != C.cols()) throw config_error("covariance is not square");
    double g = 0.0;
    switch (spec.kind) {
        case Measure::Trace: {
            Eigen::LLT<Eigen::MatrixXd> llt(C);
            if (llt.info() != Eigen::Success)
                throw numerical_error("covariance is not positive definite");
            g = C.trace();
            break;
        }
        case Measure::RootDeterminant:
            g = root_det(C);
            break;
        case Measure::MaxEigenvalue:
            g = max_eigenvalue(C);
            break;
    }
    if (spec.greedy_star_weighting) g *= 1.0 + cost_dot;
    return g;
}

ObjectiveValue eval_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                      const Eigen::MatrixXd& u, const ObjectiveSpec& spec, int start_step,
                      const Eigen::MatrixXd* C_init) {
    const CovarianceTrajectory traj =
        propagate_covariance(sys, sensors, u, start_step, C_init);
    ObjectiveValue value;
    value.per_step.reserve(traj.C.size() - 1);
    for (std::size_t r = 1; r < traj.C.size(); ++r) {
        const int k = start_step + static_cast<int>(r);
        const double dot = spec.greedy_star_weighting
                               ? cost_dot_row(sensors, u, static_cast<int>(r) - 1, k)
                               : 0.0;
        value.per_step.push_back(eval_g(traj.C[r], spec, dot));
        value.total += value.per_step.back();
    }
    return value;
}

ObjectiveValue eval_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                      const Schedule& schedule, const ObjectiveSpec& spec) {
    return eval_J(sys, sensors, schedule.matrix(), spec);
}

ObjectiveValue eval_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                      const RelaxedSchedule& relaxed, const ObjectiveSpec& spec) {
    return eval_J(sys, sensors, relaxed.matrix(), spec);
}

Gradient grad_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                const Eigen::MatrixXd& u, const ObjectiveSpec& spec, int start_step,
                const Eigen::MatrixXd* C_init) {
    if (spec.greedy_star_weighting)
        throw config_error("grad_J does not support greedy-star weighting");

    const CovarianceTrajectory traj =
        propagate_covariance(sys, sensors, u, start_step, C_init);
    const int n_steps = static_cast<int>(u.rows());
    const int S = static_cast<int>(u.cols());

    Gradient grad;
    grad.d_u.resize(n_steps, S);
    grad.subgradient = (spec.kind == Measure::MaxEigenvalue);

    // Backward sweep. S_adj accumulates ∂J/∂C_k for the current step; at each
    // step the local measure gradient enters, the weight derivatives are read
    // off via W = C_k S_adj C_k, and the adjoint is pulled through the
    // prediction to step k−1.
    Eigen::MatrixXd S_adj = Eigen::MatrixXd::Zero(sys.state_dim(), sys.state_dim());
    for (int r = n_steps - 1; r >= 0; --r) {
        const int k = start_step + r + 1;
        const Eigen::MatrixXd& C = traj.C[static_cast<std::size_t>(r) + 1];
        S_adj += measure_gradient(C, spec.kind);
        const Eigen::MatrixXd W = C * S_adj * C;
        for (int i = 0; i < S; ++i)
            grad.d_u(r, i) = -(W.cwiseProduct(sensors[i].info(k - 1))).sum();
        const Eigen::MatrixXd T = traj.Pinv[static_cast<std::size_t>(r)] * sys.A(k - 1);
        S_adj = T.transpose() * W * T;
    }
    return grad;
}

Gradient grad_J(const LinearGaussianSystem& sys, const SensorSet& sensors,
                const RelaxedSchedule& relaxed, const ObjectiveSpec& spec) {
    return grad_J(sys, sensors, relaxed.matrix(), spec);
}

}  // namespace sensched
