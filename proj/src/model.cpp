#include "sensched/model.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <utility>

#include "sensched/errors.hpp"
#include "sensched/rng.hpp"

namespace sensched {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;
constexpr double kRcondFloor = 1e-14;  // condition number guard of 1e14

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

void require_symmetric_psd(const Eigen::MatrixXd& m, const std::string& name) {
    if (m.rows() != m.cols()) throw config_error(name + " is not square");
    if (!is_symmetric(m, kSymmetryTol)) throw config_error(name + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw config_error(name + " is not positive semi-definite");
}

void require_symmetric_pd(const Eigen::MatrixXd& m, const std::string& name) {
    if (m.rows() != m.cols()) throw config_error(name + " is not square");
    if (!is_symmetric(m, kSymmetryTol)) throw config_error(name + " is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw config_error(name + " is not positive definite");
}

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Cholesky-based symmetric inverse with a condition-number guard.
Eigen::MatrixXd pd_inverse(const Eigen::MatrixXd& m, int step, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success || llt.rcond() < kRcondFloor)
        throw numerical_error(std::string(what) + " is numerically singular at step " +
                              std::to_string(step));
    return symmetrized(llt.solve(Eigen::MatrixXd::Identity(m.rows(), m.cols())));
}

}  // namespace

// ---------------------------------------------------------------------------
// LinearGaussianSystem

LinearGaussianSystem::LinearGaussianSystem(std::vector<Eigen::MatrixXd> A,
                                           std::vector<Eigen::MatrixXd> Qw,
                                           Eigen::VectorXd x0_mean, Eigen::MatrixXd C0)
    : A_(std::move(A)), Qw_(std::move(Qw)), x0_mean_(std::move(x0_mean)), C0_(std::move(C0)) {
    validate(true);
}

LinearGaussianSystem LinearGaussianSystem::time_invariant(const Eigen::MatrixXd& A,
                                                          const Eigen::MatrixXd& Qw,
                                                          const Eigen::VectorXd& x0_mean,
                                                          const Eigen::MatrixXd& C0,
                                                          int horizon) {
    if (horizon < 1) throw config_error("horizon must be >= 1");
    const std::size_t n = static_cast<std::size_t>(horizon);
    return LinearGaussianSystem(std::vector<Eigen::MatrixXd>(n, A),
                                std::vector<Eigen::MatrixXd>(n, Qw), x0_mean, C0);
}

LinearGaussianSystem LinearGaussianSystem::unchecked(std::vector<Eigen::MatrixXd> A,
                                                     std::vector<Eigen::MatrixXd> Qw,
                                                     Eigen::VectorXd x0_mean,
                                                     Eigen::MatrixXd C0) {
    LinearGaussianSystem sys;
    sys.A_ = std::move(A);
    sys.Qw_ = std::move(Qw);
    sys.x0_mean_ = std::move(x0_mean);
    sys.C0_ = std::move(C0);
    sys.validate(false);
    return sys;
}

void LinearGaussianSystem::validate(bool check_pd_c0) const {
    const int d = state_dim();
    if (d < 1) throw config_error("state_dim must be positive");
    if (A_.empty() || A_.size() != Qw_.size())
        throw config_error("A and Qw sequences must be non-empty and equally long");
    for (std::size_t k = 0; k < A_.size(); ++k) {
        if (A_[k].rows() != d || A_[k].cols() != d)
            throw config_error("A[" + std::to_string(k) + "] has wrong dimensions");
        require_symmetric_psd(Qw_[k], "Qw[" + std::to_string(k) + "]");
        if (Qw_[k].rows() != d)
            throw config_error("Qw[" + std::to_string(k) + "] has wrong dimensions");
    }
    if (C0_.rows() != d || C0_.cols() != d) throw config_error("C0 has wrong dimensions");
    if (check_pd_c0) {
        require_symmetric_pd(C0_, "C0");
    } else {
        require_symmetric_psd(C0_, "C0");
    }
}

// ---------------------------------------------------------------------------
// Sensor / SensorSet

Sensor::Sensor(std::vector<Eigen::MatrixXd> H, std::vector<Eigen::MatrixXd> R,
               std::vector<double> cost, int state_dim)
    : H_(std::move(H)), R_(std::move(R)), cost_(std::move(cost)) {
    if (H_.empty() || H_.size() != R_.size() || H_.size() != cost_.size())
        throw config_error("sensor H, R, cost sequences must be non-empty and equally long");
    const int m = static_cast<int>(H_[0].rows());
    if (m < 1) throw config_error("sensor measurement dimension must be positive");
    info_.reserve(H_.size());
    for (std::size_t k = 0; k < H_.size(); ++k) {
        if (H_[k].rows() != m || H_[k].cols() != state_dim)
            throw config_error("H[" + std::to_string(k) + "] has wrong dimensions");
        require_symmetric_pd(R_[k], "R[" + std::to_string(k) + "]");
        if (R_[k].rows() != m)
            throw config_error("R[" + std::to_string(k) + "] has wrong dimensions");
        if (cost_[k] < 0.0) throw config_error("sensor costs must be nonnegative");
        Eigen::LLT<Eigen::MatrixXd> llt(R_[k]);
        info_.push_back(symmetrized(H_[k].transpose() * llt.solve(H_[k])));
    }
}

Sensor Sensor::time_invariant(const Eigen::MatrixXd& H, const Eigen::MatrixXd& R, double cost,
                              int state_dim, int horizon) {
    if (horizon < 1) throw config_error("horizon must be >= 1");
    const std::size_t n = static_cast<std::size_t>(horizon);
    return Sensor(std::vector<Eigen::MatrixXd>(n, H), std::vector<Eigen::MatrixXd>(n, R),
                  std::vector<double>(n, cost), state_dim);
}

Sensor Sensor::null_sensor(int state_dim, int horizon, double cost) {
    if (horizon < 1) throw config_error("horizon must be >= 1");
    if (cost < 0.0) throw config_error("sensor costs must be nonnegative");
    Sensor s;
    s.is_null_ = true;
    s.cost_.assign(static_cast<std::size_t>(horizon), cost);
    s.info_.assign(static_cast<std::size_t>(horizon),
                   Eigen::MatrixXd::Zero(state_dim, state_dim));
    return s;
}

SensorSet::SensorSet(std::vector<Sensor> sensors) : sensors_(std::move(sensors)) {
    if (sensors_.empty()) throw config_error("sensor set is empty");
    const int n = sensors_[0].horizon();
    for (std::size_t i = 0; i < sensors_.size(); ++i) {
        if (sensors_[i].horizon() != n)
            throw config_error("sensor horizons differ within the set");
        if (sensors_[i].is_null()) {
            if (null_index_) throw config_error("more than one null sensor in the set");
            null_index_ = static_cast<int>(i);
        }
    }
}

Eigen::MatrixXd SensorSet::cost_matrix() const {
    const int n = horizon();
    Eigen::MatrixXd c(n, size());
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < size(); ++i) c(k, i) = sensors_[static_cast<std::size_t>(i)].cost(k);
    return c;
}

// ---------------------------------------------------------------------------
// Schedules

Schedule::Schedule(std::vector<int> picks, int num_sensors)
    : picks_(std::move(picks)), num_sensors_(num_sensors) {
    if (picks_.empty()) throw config_error("schedule is empty");
    if (num_sensors_ < 1) throw config_error("schedule needs at least one sensor");
    for (int p : picks_)
        if (p < 0 || p >= num_sensors_) throw config_error("schedule pick out of range");
}

Eigen::MatrixXd Schedule::matrix() const {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(horizon(), num_sensors_);
    for (int k = 0; k < horizon(); ++k) u(k, pick(k)) = 1.0;
    return u;
}

double Schedule::total_cost(const SensorSet& sensors) const {
    double total = 0.0;
    for (int k = 0; k < horizon(); ++k) total += sensors[pick(k)].cost(k);
    return total;
}

RelaxedSchedule::RelaxedSchedule(Eigen::MatrixXd u) : u_(std::move(u)) {
    if (u_.rows() < 1 || u_.cols() < 1) throw config_error("relaxed schedule is empty");
    if (u_.minCoeff() < -1e-12 || u_.maxCoeff() > 1.0 + 1e-12)
        throw config_error("relaxed schedule entries outside [0, 1]");
    for (int k = 0; k < u_.rows(); ++k) {
        if (std::abs(u_.row(k).sum() - 1.0) > 1e-9)
            throw config_error("relaxed schedule row " + std::to_string(k) +
                               " does not sum to 1");
    }
    u_ = u_.cwiseMax(0.0).cwiseMin(1.0);
}

// ---------------------------------------------------------------------------
// Covariance recursion

Eigen::MatrixXd covariance_step(const LinearGaussianSystem& sys, const Eigen::MatrixXd& C_prev,
                                const Eigen::MatrixXd& M, int k) {
    const Eigen::MatrixXd& A = sys.A(k - 1);
    const Eigen::MatrixXd P = symmetrized(A * C_prev * A.transpose() + sys.Qw(k - 1));
    const Eigen::MatrixXd Pinv = pd_inverse(P, k, "predicted covariance");
    return pd_inverse(Pinv + M, k, "information sum");
}

CovarianceTrajectory propagate_covariance(const LinearGaussianSystem& sys,
                                          const SensorSet& sensors, const Eigen::MatrixXd& u,
                                          int start_step, const Eigen::MatrixXd* C_init) {
    const int n_steps = static_cast<int>(u.rows());
    const int S = sensors.size();
    const int d = sys.state_dim();
    if (n_steps < 1) throw config_error("schedule must cover at least one step");
    if (u.cols() != S) throw config_error("schedule column count does not match sensor count");
    if (sensors.horizon() < start_step + n_steps || sys.horizon() < start_step + n_steps)
        throw config_error("system/sensor sequences shorter than the requested horizon");

    CovarianceTrajectory traj;
    traj.C.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.P.reserve(static_cast<std::size_t>(n_steps));
    traj.Pinv.reserve(static_cast<std::size_t>(n_steps));
    traj.C.push_back(C_init ? *C_init : sys.C0());
    if (traj.C[0].rows() != d || traj.C[0].cols() != d)
        throw config_error("initial covariance has wrong dimensions");

    Eigen::MatrixXd M(d, d);
    for (int r = 0; r < n_steps; ++r) {
        const int k = start_step + r + 1;  // global 1-based step
        const Eigen::MatrixXd& A = sys.A(k - 1);
        Eigen::MatrixXd P = symmetrized(A * traj.C.back() * A.transpose() + sys.Qw(k - 1));
        Eigen::MatrixXd Pinv = pd_inverse(P, k, "predicted covariance");
        M.setZero();
        for (int i = 0; i < S; ++i) {
            const double w = u(r, i);
            if (w != 0.0) M.noalias() += w * sensors[i].info(k - 1);
        }
        traj.C.push_back(pd_inverse(Pinv + M, k, "information sum"));
        traj.P.push_back(std::move(P));
        traj.Pinv.push_back(std::move(Pinv));
    }
    return traj;
}

CovarianceTrajectory propagate_covariance(const LinearGaussianSystem& sys,
                                          const SensorSet& sensors, const Schedule& schedule) {
    return propagate_covariance(sys, sensors, schedule.matrix());
}

CovarianceTrajectory propagate_covariance(const LinearGaussianSystem& sys,
                                          const SensorSet& sensors,
                                          const RelaxedSchedule& relaxed) {
    return propagate_covariance(sys, sensors, relaxed.matrix());
}

// ---------------------------------------------------------------------------
// Kalman filter pieces

KalmanPosterior kalman_update(const Eigen::VectorXd& prior_mean,
                              const Eigen::MatrixXd& prior_cov, const SensorSet& sensors,
                              int i, int k, const Eigen::VectorXd& z) {
    if (i < 0 || i >= sensors.size()) throw config_error("sensor index out of range");
    const Sensor& sensor = sensors[i];
    if (sensor.is_null()) throw config_error("kalman_update called with the null sensor");
    const Eigen::MatrixXd& H = sensor.H(k - 1);
    const Eigen::MatrixXd& R = sensor.R(k - 1);
    if (z.size() != H.rows() || prior_mean.size() != H.cols())
        throw config_error("kalman_update dimension mismatch");

    const Eigen::MatrixXd innovation_cov = symmetrized(H * prior_cov * H.transpose() + R);
    Eigen::LLT<Eigen::MatrixXd> llt(innovation_cov);
    if (llt.info() != Eigen::Success || llt.rcond() < kRcondFloor)
        throw numerical_error("singular innovation covariance at step " + std::to_string(k));

    const Eigen::MatrixXd K = llt.solve(H * prior_cov).transpose();
    KalmanPosterior post;
    post.mean = prior_mean + K * (z - H * prior_mean);
    const Eigen::MatrixXd J =
        Eigen::MatrixXd::Identity(prior_cov.rows(), prior_cov.cols()) - K * H;
    post.cov = symmetrized(J * prior_cov * J.transpose() + K * R * K.transpose());
    return post;
}

// ---------------------------------------------------------------------------
// Sampling

Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                Rng& rng) {
    const int d = static_cast<int>(mean.size());
    if (cov.cwiseAbs().maxCoeff() == 0.0) {
        // Still consume d draws so downstream streams do not shift.
        for (int j = 0; j < d; ++j) (void)rng.normal();
        return mean;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw numerical_error("eigendecomposition failed");
    Eigen::VectorXd scale = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::VectorXd draws(d);
    for (int j = 0; j < d; ++j) draws(j) = rng.normal();
    return mean + es.eigenvectors() * scale.asDiagonal() * draws;
}

Realization simulate_realization(const LinearGaussianSystem& sys, const SensorSet& sensors,
                                 std::uint64_t seed, bool zero_noise) {
    const int N = sys.horizon();
    const int S = sensors.size();
    Rng rng(seed);

    Realization real;
    real.states.reserve(static_cast<std::size_t>(N) + 1);
    real.states.push_back(sample_gaussian(sys.x0_mean(), sys.C0(), rng));
    real.noise.resize(static_cast<std::size_t>(N));

    const Eigen::MatrixXd zero_q =
        Eigen::MatrixXd::Zero(sys.state_dim(), sys.state_dim());
    for (int k = 0; k < N; ++k) {
        const Eigen::VectorXd w = sample_gaussian(Eigen::VectorXd::Zero(sys.state_dim()),
                                                  zero_noise ? zero_q : sys.Qw(k), rng);
        real.states.push_back(sys.A(k) * real.states.back() + w);
        auto& step_noise = real.noise[static_cast<std::size_t>(k)];
        step_noise.resize(static_cast<std::size_t>(S));
        for (int i = 0; i < S; ++i) {
            if (sensors[i].is_null()) continue;
            const int m = sensors[i].measurement_dim();
            const Eigen::MatrixXd zero_r = Eigen::MatrixXd::Zero(m, m);
            step_noise[static_cast<std::size_t>(i)] =
                sample_gaussian(Eigen::VectorXd::Zero(m),
                                zero_noise ? zero_r : sensors[i].R(k), rng);
        }
    }
    return real;
}

Eigen::VectorXd Realization::measurement(const SensorSet& sensors, int i, int k) const {
    const Sensor& sensor = sensors[i];
    if (sensor.is_null()) throw config_error("null sensor produces no measurement");
    return sensor.H(k - 1) * states[static_cast<std::size_t>(k)] +
           noise[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
}

SimulatedTrajectory simulate_trajectory(const LinearGaussianSystem& sys,
                                        const SensorSet& sensors, const Schedule& schedule,
                                        std::uint64_t seed) {
    if (schedule.horizon() != sys.horizon())
        throw config_error("schedule horizon does not match the system horizon");
    const Realization real = simulate_realization(sys, sensors, seed);
    SimulatedTrajectory out;
    out.states = real.states;
    out.measurements.reserve(static_cast<std::size_t>(schedule.horizon()));
    for (int k = 1; k <= schedule.horizon(); ++k) {
        const int i = schedule.pick(k - 1);
        if (sensors[i].is_null())
            out.measurements.emplace_back();
        else
            out.measurements.push_back(real.measurement(sensors, i, k));
    }
    return out;
}

}  // namespace sensched
