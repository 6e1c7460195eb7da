#ifndef SENSCHED_MODEL_HPP
#define SENSCHED_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace sensched {

/// Discrete-time linear dynamics x_{k+1} = A_k x_k + w_k with w_k ~ N(0, Qw[k]),
/// plus Gaussian initial state statistics. Matrices are stored per step; use
/// time_invariant() to broadcast a single matrix over the horizon.
class LinearGaussianSystem {
  public:
    LinearGaussianSystem(std::vector<Eigen::MatrixXd> A,
                         std::vector<Eigen::MatrixXd> Qw,
                         Eigen::VectorXd x0_mean,
                         Eigen::MatrixXd C0);

    static LinearGaussianSystem time_invariant(const Eigen::MatrixXd& A,
                                               const Eigen::MatrixXd& Qw,
                                               const Eigen::VectorXd& x0_mean,
                                               const Eigen::MatrixXd& C0,
                                               int horizon);

    /// Skips the positive-definiteness check on C0. Intended for tests that
    /// exercise degenerate noise-free setups (C0 = 0).
    static LinearGaussianSystem unchecked(std::vector<Eigen::MatrixXd> A,
                                          std::vector<Eigen::MatrixXd> Qw,
                                          Eigen::VectorXd x0_mean,
                                          Eigen::MatrixXd C0);

    int state_dim() const { return static_cast<int>(x0_mean_.size()); }
    int horizon() const { return static_cast<int>(A_.size()); }
    const Eigen::MatrixXd& A(int k) const { return A_[static_cast<std::size_t>(k)]; }
    const Eigen::MatrixXd& Qw(int k) const { return Qw_[static_cast<std::size_t>(k)]; }
    const Eigen::VectorXd& x0_mean() const { return x0_mean_; }
    const Eigen::MatrixXd& C0() const { return C0_; }

  private:
    LinearGaussianSystem() = default;
    void validate(bool check_pd_c0) const;

    std::vector<Eigen::MatrixXd> A_;
    std::vector<Eigen::MatrixXd> Qw_;
    Eigen::VectorXd x0_mean_;
    Eigen::MatrixXd C0_;
};

/// One sensor's measurement model over the horizon. A "null" sensor models
/// performing no measurement: it has no H/R, contributes the zero information
/// matrix, and is skipped by the filter. Infinite noise variance never appears
/// as a number.
class Sensor {
  public:
    Sensor(std::vector<Eigen::MatrixXd> H, std::vector<Eigen::MatrixXd> R,
           std::vector<double> cost, int state_dim);

    static Sensor time_invariant(const Eigen::MatrixXd& H, const Eigen::MatrixXd& R,
                                 double cost, int state_dim, int horizon);
    static Sensor null_sensor(int state_dim, int horizon, double cost = 0.0);

    bool is_null() const { return is_null_; }
    int horizon() const { return static_cast<int>(info_.size()); }
    /// Measurement dimension (0 for the null sensor).
    int measurement_dim() const { return is_null_ ? 0 : static_cast<int>(H_[0].rows()); }
    const Eigen::MatrixXd& H(int k) const { return H_[static_cast<std::size_t>(k)]; }
    const Eigen::MatrixXd& R(int k) const { return R_[static_cast<std::size_t>(k)]; }
    double cost(int k) const { return cost_[static_cast<std::size_t>(k)]; }
    /// Information matrix M_k = H_k^T R_k^{-1} H_k (exactly zero for null).
    const Eigen::MatrixXd& info(int k) const { return info_[static_cast<std::size_t>(k)]; }

  private:
    Sensor() = default;

    std::vector<Eigen::MatrixXd> H_;
    std::vector<Eigen::MatrixXd> R_;
    std::vector<double> cost_;
    std::vector<Eigen::MatrixXd> info_;
    bool is_null_ = false;
};

class SensorSet {
  public:
    explicit SensorSet(std::vector<Sensor> sensors);

    int size() const { return static_cast<int>(sensors_.size()); }
    int horizon() const { return sensors_.empty() ? 0 : sensors_[0].horizon(); }
    const Sensor& operator[](int i) const { return sensors_[static_cast<std::size_t>(i)]; }
    std::optional<int> null_sensor_index() const { return null_index_; }

    /// N x S matrix of per-step sensor costs.
    Eigen::MatrixXd cost_matrix() const;

  private:
    std::vector<Sensor> sensors_;
    std::optional<int> null_index_;
};

/// Binary one-sensor-per-step schedule, stored as the picked sensor index per
/// step (0-based). Row-sums-to-one holds by construction.
class Schedule {
  public:
    Schedule(std::vector<int> picks, int num_sensors);

    int horizon() const { return static_cast<int>(picks_.size()); }
    int num_sensors() const { return num_sensors_; }
    int pick(int k) const { return picks_[static_cast<std::size_t>(k)]; }
    const std::vector<int>& picks() const { return picks_; }

    /// One-hot N x S selection matrix.
    Eigen::MatrixXd matrix() const;

    double total_cost(const SensorSet& sensors) const;

    bool operator==(const Schedule& other) const = default;

  private:
    std::vector<int> picks_;
    int num_sensors_;
};

/// Fractional schedule with each row on the probability simplex.
/// Entries are validated against [-1e-12, 1+1e-12], clamped to [0,1], and each
/// row must sum to 1 within 1e-9.
class RelaxedSchedule {
  public:
    explicit RelaxedSchedule(Eigen::MatrixXd u);

    int horizon() const { return static_cast<int>(u_.rows()); }
    int num_sensors() const { return static_cast<int>(u_.cols()); }
    const Eigen::MatrixXd& matrix() const { return u_; }

  private:
    Eigen::MatrixXd u_;
};

/// Covariances along a schedule: C holds C_0 .. C_N, P holds the predicted
/// covariances C_1^p .. C_N^p, and Pinv their inverses (kept for reuse by the
/// objective gradient).
struct CovarianceTrajectory {
    std::vector<Eigen::MatrixXd> C;
    std::vector<Eigen::MatrixXd> P;
    std::vector<Eigen::MatrixXd> Pinv;
};

/// Scheduled covariance recursion in information form,
///   C_k = ( (A_{k-1} C_{k-1} A_{k-1}^T + Qw_{k-1})^{-1} + sum_i u_{k,i} M_k^i )^{-1},
/// starting from C_0 = C0. `u` may be fractional; rows need not sum to one
/// here (the relaxation's box is larger than the simplex). `start_step` and
/// `C_init` evaluate a tail window: row r of `u` drives global step
/// start_step + 1 + r with C_init standing in for C_{start_step}.
CovarianceTrajectory propagate_covariance(const LinearGaussianSystem& sys,
                                          const SensorSet& sensors,
                                          const Eigen::MatrixXd& u,
                                          int start_step = 0,
                                          const Eigen::MatrixXd* C_init = nullptr);

CovarianceTrajectory propagate_covariance(const LinearGaussianSystem& sys,
                                          const SensorSet& sensors,
                                          const Schedule& schedule);

CovarianceTrajectory propagate_covariance(const LinearGaussianSystem& sys,
                                          const SensorSet& sensors,
                                          const RelaxedSchedule& relaxed);

/// One-step covariance/information update used by the schedulers:
/// C_next = ( (A C A^T + Qw)^{-1} + M )^{-1} for global step `k` (1-based).
Eigen::MatrixXd covariance_step(const LinearGaussianSystem& sys, const Eigen::MatrixXd& C_prev,
                                const Eigen::MatrixXd& M, int k);

struct KalmanPosterior {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
};

/// Standard linear Gaussian measurement update (Joseph form) with sensor `i`
/// at step `k` (1-based). The caller must not pass the null sensor; skipping
/// the update is the null sensor's contract.
KalmanPosterior kalman_update(const Eigen::VectorXd& prior_mean,
                              const Eigen::MatrixXd& prior_cov,
                              const SensorSet& sensors, int i, int k,
                              const Eigen::VectorXd& z);

/// A sampled ground-truth trajectory together with measurement noise for every
/// sensor at every step. Drawing noise for all sensors (not just scheduled
/// ones) keeps realizations identical across schedules, which the Monte Carlo
/// harness relies on (common random numbers).
struct Realization {
    std::vector<Eigen::VectorXd> states;                    // x_0 .. x_N
    std::vector<std::vector<Eigen::VectorXd>> noise;        // noise[k-1][i], empty for null
    Eigen::VectorXd measurement(const SensorSet& sensors, int i, int k) const;
};

/// Deterministic given the seed. `zero_noise` draws x_0 from N(x0_mean, C0)
/// but zeroes process and measurement noise (test mode).
Realization simulate_realization(const LinearGaussianSystem& sys, const SensorSet& sensors,
                                 std::uint64_t seed, bool zero_noise = false);

struct SimulatedTrajectory {
    std::vector<Eigen::VectorXd> states;        // x_0 .. x_N
    std::vector<Eigen::VectorXd> measurements;  // z_1 .. z_N (empty vector at null steps)
};

/// Samples states and the scheduled sensors' measurements. Built on
/// simulate_realization, so two schedules under the same seed observe the same
/// underlying world.
SimulatedTrajectory simulate_trajectory(const LinearGaussianSystem& sys,
                                        const SensorSet& sensors,
                                        const Schedule& schedule, std::uint64_t seed);

/// PSD-safe Gaussian sample (eigendecomposition square root, so singular
/// covariances are allowed).
Eigen::VectorXd sample_gaussian(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                                class Rng& rng);

}  // namespace sensched

#endif
