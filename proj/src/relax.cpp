#include "sensched/relax.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sensched/errors.hpp"

namespace sensched {

namespace {

double budget_tol(double budget) { return 1e-9 * std::max(1.0, std::abs(budget)); }

/// Projection onto {u : Σ c∘u ≤ C_max}.
Eigen::MatrixXd project_budget_halfspace(const Eigen::MatrixXd& u, const Eigen::MatrixXd& c,
                                         double budget) {
    const double total = (c.cwiseProduct(u)).sum();
    if (total <= budget) return u;
    const double c_norm2 = c.squaredNorm();
    if (c_norm2 == 0.0) return u;  // zero costs cannot violate a feasible budget
    return u - ((total - budget) / c_norm2) * c;
}

Eigen::MatrixXd project_rows_to_simplices(const Eigen::MatrixXd& u) {
    Eigen::MatrixXd out(u.rows(), u.cols());
    for (int k = 0; k < u.rows(); ++k)
        out.row(k) = project_row_simplex(u.row(k).transpose()).transpose();
    return out;
}

/// Exact projection onto {rows on simplices, ⟨c,u⟩ ≤ budget} through the KKT
/// system: the budget constraint couples the rows only through its multiplier
/// μ, so the minimizer is the rowwise simplex projection of v − (μ/2)c, and
/// the spend is non-increasing in μ. Bisection recovers the active
/// multiplier. Slower than the alternating sweeps but immune to the
/// small-angle stalls they suffer near degenerate corners (e.g. a budget that
/// admits only the free sensor).
Eigen::MatrixXd project_polytope_exact(const Eigen::MatrixXd& v, const Eigen::MatrixXd& c,
                                       double budget) {
    const auto at = [&](double mu) {
        return project_rows_to_simplices(v - (0.5 * mu) * c);
    };
    const auto spend = [&](const Eigen::MatrixXd& u) { return c.cwiseProduct(u).sum(); };
    double lo = 0.0, hi = 1.0;
    while (spend(at(hi)) > budget && hi < 1e12) hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (spend(at(mid)) > budget)
            lo = mid;
        else
            hi = mid;
    }
    return at(hi);
}

}  // namespace

FeasibleSet::FeasibleSet(Eigen::MatrixXd costs, double budget)
    : costs_(std::move(costs)), budget_(budget) {
    if (costs_.rows() < 1 || costs_.cols() < 1) throw config_error("cost matrix is empty");
    if (costs_.minCoeff() < 0.0) throw config_error("sensor costs must be nonnegative");
    min_total_cost_ = costs_.rowwise().minCoeff().sum();
    feasible_ = min_total_cost_ <= budget_ + budget_tol(budget_);
}

double FeasibleSet::cost_of(const Eigen::MatrixXd& u) const {
    if (u.rows() != costs_.rows() || u.cols() != costs_.cols())
        throw config_error("weight matrix shape does not match the feasible set");
    return (costs_.cwiseProduct(u)).sum();
}

bool FeasibleSet::contains(const Eigen::MatrixXd& u) const {
    if (u.rows() != costs_.rows() || u.cols() != costs_.cols()) return false;
    if (u.minCoeff() < -1e-9) return false;
    for (int k = 0; k < u.rows(); ++k)
        if (std::abs(u.row(k).sum() - 1.0) > 1e-9) return false;
    return cost_of(u) <= budget_ + budget_tol(budget_);
}

double FeasibleSet::cost_of(const Schedule& schedule) const {
    if (schedule.horizon() != horizon() || schedule.num_sensors() != num_sensors())
        throw config_error("schedule shape does not match the feasible set");
    double total = 0.0;
    for (int k = 0; k < horizon(); ++k) total += costs_(k, schedule.pick(k));
    return total;
}

bool FeasibleSet::contains(const Schedule& schedule) const {
    return cost_of(schedule) <= budget_ + budget_tol(budget_);
}

Eigen::VectorXd project_row_simplex(const Eigen::VectorXd& v) {
    const int n = static_cast<int>(v.size());
    if (n < 1) throw config_error("cannot project an empty vector");
    if (!v.allFinite()) throw config_error("cannot project non-finite entries");

    std::vector<double> sorted(v.data(), v.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    double cumsum = 0.0;
    double theta = 0.0;
    for (int j = 0; j < n; ++j) {
        cumsum += sorted[static_cast<std::size_t>(j)];
        const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - t > 0.0) theta = t;
    }
    return (v.array() - theta).cwiseMax(0.0);
}

RelaxedSchedule project_feasible(const Eigen::MatrixXd& u, const FeasibleSet& fs) {
    if (!fs.feasible()) throw config_error("feasible set is empty for the given budget");
    if (u.rows() != fs.horizon() || u.cols() != fs.num_sensors())
        throw config_error("weight matrix shape does not match the feasible set");

    constexpr int kMaxSweeps = 1000;
    constexpr double kChangeTol = 1e-10;

    Eigen::MatrixXd x = u;
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(u.rows(), u.cols());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(u.rows(), u.cols());

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        const Eigen::MatrixXd x_prev = x;
        const Eigen::MatrixXd y = project_rows_to_simplices(x + p);
        p = x + p - y;
        x = project_budget_halfspace(y + q, fs.costs(), fs.budget());
        q = y + q - x;
        if ((x - x_prev).norm() < kChangeTol) break;
    }

    // Epilogue: an exact pass through the simplices so rows sum to one and
    // entries are nonnegative. When the sweeps stalled or ran out while still
    // over budget, fall back to the exact Lagrangian projection of the
    // original point.
    Eigen::MatrixXd out = project_rows_to_simplices(x);
    if (fs.cost_of(out) - fs.budget() > budget_tol(fs.budget()))
        out = project_polytope_exact(u, fs.costs(), fs.budget());
    const double excess = fs.cost_of(out) - fs.budget();
    if (excess > budget_tol(fs.budget())) {
        std::ostringstream msg;
        msg << "projection could not reach the budget (excess " << excess << ")";
        throw numerical_error(msg.str());
    }
    return RelaxedSchedule(out);
}

RelaxedSolution solve_relaxed(const LinearGaussianSystem& sys, const SensorSet& sensors,
                              const FeasibleSet& fs, const ObjectiveSpec& spec,
                              const RelaxOptions& options, int start_step,
                              const Eigen::MatrixXd* C_init, const Eigen::MatrixXd* u_init) {
    if (spec.greedy_star_weighting)
        throw config_error("the relaxation solver does not support greedy-star weighting");
    if (!fs.feasible()) throw config_error("feasible set is empty for the given budget");
    if (fs.num_sensors() != sensors.size())
        throw config_error("feasible set sensor count does not match the sensor set");

    constexpr double kArmijoC = 1e-4;
    constexpr int kMaxHalvings = 20;
    constexpr int kStallWindow = 10;

    const bool warm = u_init && u_init->rows() == fs.horizon() &&
                      u_init->cols() == fs.num_sensors() && u_init->allFinite();
    const Eigen::MatrixXd start =
        warm ? *u_init
             : Eigen::MatrixXd::Constant(fs.horizon(), fs.num_sensors(),
                                         1.0 / static_cast<double>(fs.num_sensors()));
    Eigen::MatrixXd u = project_feasible(start, fs).matrix();
    double f = eval_J(sys, sensors, u, spec, start_step, C_init).total;

    Eigen::MatrixXd best_u = u;
    double best_f = f;
    int iterations = 0;
    bool converged = false;
    int stall = 0;

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const Eigen::MatrixXd g = grad_J(sys, sensors, u, spec, start_step, C_init).d_u;
        double step = 1.0;
        if (spec.kind == Measure::MaxEigenvalue)
            step /= std::ceil(static_cast<double>(iter) / 100.0);

        bool accepted = false;
        Eigen::MatrixXd u_try;
        double f_try = f;
        for (int h = 0; h < kMaxHalvings; ++h) {
            u_try = project_feasible(u - step * g, fs).matrix();
            f_try = eval_J(sys, sensors, u_try, spec, start_step, C_init).total;
            const double directional = (g.cwiseProduct(u_try - u)).sum();
            if (f_try <= f + kArmijoC * directional) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // line-search failure: return the best iterate

        const double rel_decrease = (f - f_try) / std::max(1.0, std::abs(f));
        u = u_try;
        f = f_try;
        iterations = iter;
        if (f < best_f) {
            best_f = f;
            best_u = u;
        }
        stall = (rel_decrease < options.tol) ? stall + 1 : 0;
        if (stall >= kStallWindow) {
            converged = true;
            break;
        }
    }

    const Eigen::MatrixXd g_final =
        grad_J(sys, sensors, best_u, spec, start_step, C_init).d_u;
    const Eigen::MatrixXd fixed_point = project_feasible(best_u - g_final, fs).matrix();
    const double kkt = (best_u - fixed_point).cwiseAbs().maxCoeff();

    return RelaxedSolution{RelaxedSchedule(best_u), best_f, iterations, converged, kkt};
}

}  // namespace sensched
