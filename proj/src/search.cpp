#include "sensched/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>

#include "sensched/errors.hpp"

namespace sensched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double budget_tol(double budget) { return 1e-9 * std::max(1.0, std::abs(budget)); }

/// suffix[m] = Σ over rows m..N−1 of the row minimum (suffix[N] = 0): the
/// cheapest way to fill the remaining steps.
std::vector<double> suffix_min_costs(const Eigen::MatrixXd& costs) {
    const int N = static_cast<int>(costs.rows());
    std::vector<double> suffix(static_cast<std::size_t>(N) + 1, 0.0);
    for (int m = N - 1; m >= 0; --m)
        suffix[static_cast<std::size_t>(m)] =
            costs.row(m).minCoeff() + suffix[static_cast<std::size_t>(m) + 1];
    return suffix;
}

class BranchAndBound {
  public:
    BranchAndBound(const LinearGaussianSystem& sys, const SensorSet& sensors,
                   const FeasibleSet& fs, const ObjectiveSpec& spec, BBVariant variant,
                   const SearchOptions& options)
        : sys_(sys),
          sensors_(sensors),
          fs_(fs),
          spec_(spec),
          variant_(variant),
          options_(options),
          N_(fs.horizon()),
          S_(fs.num_sensors()),
          cost_tol_(budget_tol(fs.budget())),
          suffix_min_(suffix_min_costs(fs.costs())) {}

    SearchResult run() {
        const auto t0 = std::chrono::steady_clock::now();
        if (!fs_.feasible())
            throw infeasible_error("no schedule fits the budget " +
                                   std::to_string(fs_.budget()));
        if (fs_.num_sensors() != sensors_.size())
            throw config_error("feasible set sensor count does not match the sensor set");
        if (fs_.horizon() != sys_.horizon() || fs_.horizon() != sensors_.horizon())
            throw config_error("feasible set horizon does not match the system");

        stats_.nodes_visited = 1;  // the root itself

        std::vector<Frame> stack;
        {
            Frame root;
            root.prefix_cost = 0.0;
            root.candidates = build_candidates({}, 0.0, 0.0, sys_.C0(), Eigen::MatrixXd());
            ++stats_.nodes_expanded;
            stack.push_back(std::move(root));
        }

        while (!stack.empty()) {
            Frame& frame = stack.back();
            if (frame.next >= frame.candidates.size()) {
                stack.pop_back();
                continue;
            }
            Candidate& cand = frame.candidates[frame.next++];
            if (cand.neighbor_pruned) continue;  // counted when the node was built

            const double J_l = cand.bounds.J_partial + cand.bounds.J_lower_tail;
            if (J_l > J_min_ + options_.prune_slack) {
                ++stats_.pruned_by_lower_bound;
                continue;
            }
            const int depth = static_cast<int>(frame.prefix.size());
            if (depth + 1 == N_) {  // candidate completes the schedule
                if (cand.bounds.J_partial < J_min_) {
                    std::vector<int> full = frame.prefix;
                    full.push_back(cand.sensor);
                    set_incumbent(std::move(full), cand.bounds.J_partial);
                }
                continue;
            }
            Frame child;
            child.prefix = frame.prefix;
            child.prefix.push_back(cand.sensor);
            child.prefix_cost = frame.prefix_cost + fs_.costs()(depth, cand.sensor);
            child.candidates = build_candidates(child.prefix, child.prefix_cost,
                                                cand.bounds.J_partial, cand.C_next,
                                                cand.warm_tail);
            ++stats_.nodes_expanded;
            stack.push_back(std::move(child));  // invalidates `frame`/`cand`
        }

        if (!incumbent_)
            throw infeasible_error("search finished without a feasible schedule");
        Schedule schedule(std::move(*incumbent_), S_);
        const double J_opt = eval_J(sys_, sensors_, schedule, spec_).total;
        stats_.wall_time = std::chrono::steady_clock::now() - t0;
        Method method = variant_ == BBVariant::BBC   ? Method::BBC
                        : variant_ == BBVariant::BBL ? Method::BBL
                                                     : Method::BBZ;
        return SearchResult{std::move(schedule), J_opt, std::move(stats_), method};
    }

  private:
    struct Candidate {
        int sensor = -1;
        NodeBounds bounds;
        Eigen::MatrixXd C_next;     // covariance after taking this sensor
        Eigen::MatrixXd warm_tail;  // relaxed tail solution, reused by the child
        bool neighbor_pruned = false;
    };

    struct Frame {
        std::vector<int> prefix;
        double prefix_cost = 0.0;
        std::vector<Candidate> candidates;  // ascending lower bound
        std::size_t next = 0;
    };

    void set_incumbent(std::vector<int> picks, double value) {
        incumbent_ = std::move(picks);
        J_min_ = value;
        stats_.incumbent_trace.push_back(value);
    }

    /// Evaluates, bounds, filters, and sorts all one-step extensions of a
    /// node. Admission needs the cheapest completion within budget and the
    /// prefix value within the incumbent; BBC/BBL then bound the tail by a
    /// convex relaxation, and BBC converts each relaxed tail to a feasible
    /// completion, using it both as the sibling-filter upper bound and to
    /// tighten the incumbent immediately.
    std::vector<Candidate> build_candidates(const std::vector<int>& prefix,
                                            double prefix_cost, double prefix_J,
                                            const Eigen::MatrixXd& C,
                                            const Eigen::MatrixXd& warm_tail) {
        const int depth = static_cast<int>(prefix.size());
        const int step = depth + 1;        // 1-based time step being decided
        const int tail_len = N_ - step;    // steps after `step`

        // Parent's relaxed tail covered steps `step`..N; dropping its first
        // row leaves a start for this node's tail windows (steps step+1..N).
        Eigen::MatrixXd warm;
        if (tail_len > 0 && warm_tail.rows() == tail_len + 1)
            warm = warm_tail.bottomRows(tail_len);

        std::vector<Candidate> out;
        out.reserve(static_cast<std::size_t>(S_));
        for (int i = 0; i < S_; ++i) {
            const double cost_min = prefix_cost + fs_.costs()(depth, i) +
                                    suffix_min_[static_cast<std::size_t>(step)];
            if (cost_min > fs_.budget() + cost_tol_) {
                ++stats_.pruned_by_cost;
                continue;
            }
            Candidate cand;
            cand.sensor = i;
            cand.C_next = covariance_step(sys_, C, sensors_[i].info(step - 1), step);
            cand.bounds.J_partial = prefix_J + eval_g(cand.C_next, spec_);
            cand.bounds.cost_min_completion = cost_min;
            ++stats_.nodes_visited;
            if (cand.bounds.J_partial > J_min_ + options_.prune_slack) {
                ++stats_.pruned_by_incumbent;
                continue;
            }

            if (tail_len == 0) {  // completing candidate: bounds are exact
                cand.bounds.J_lower_tail = 0.0;
                cand.bounds.J_upper_tail = 0.0;
            } else if (variant_ == BBVariant::BBZ) {
                cand.bounds.J_lower_tail = 0.0;  // every step measure is nonnegative
                cand.bounds.J_upper_tail = kInf;
            } else {
                const double tail_budget =
                    fs_.budget() - prefix_cost - fs_.costs()(depth, i);
                FeasibleSet fs_tail(fs_.costs().bottomRows(tail_len), tail_budget);
                if (!fs_tail.feasible()) {  // borderline budget rounding
                    ++stats_.pruned_by_cost;
                    continue;
                }
                const RelaxedSolution sol =
                    solve_relaxed(sys_, sensors_, fs_tail, spec_, options_.relax, step,
                                  &cand.C_next, warm.size() > 0 ? &warm : nullptr);
                ++stats_.relaxations_solved;
                cand.bounds.J_lower_tail = sol.J_lower;
                cand.bounds.J_upper_tail = kInf;
                cand.warm_tail = sol.u_star.matrix();

                if (variant_ == BBVariant::BBC) {
                    SwappingOptions swap_options;
                    swap_options.max_trials = options_.swap_trials;
                    const ConversionResult conv =
                        convert_swapping(sol.u_star, fs_tail, sys_, sensors_, spec_,
                                         swap_options, step, &cand.C_next);
                    cand.bounds.J_upper_tail = conv.J_upper;
                    const double J_u = cand.bounds.J_partial + conv.J_upper;
                    if (J_u < J_min_) {
                        std::vector<int> full = prefix;
                        full.push_back(i);
                        full.insert(full.end(), conv.schedule.picks().begin(),
                                    conv.schedule.picks().end());
                        set_incumbent(std::move(full), J_u);
                    }
                }
            }
            out.push_back(std::move(cand));
        }

        if (variant_ == BBVariant::BBC) {
            double best_upper = kInf;
            for (const Candidate& c : out)
                best_upper = std::min(best_upper, c.bounds.J_partial + c.bounds.J_upper_tail);
            for (Candidate& c : out) {
                if (c.bounds.J_partial + c.bounds.J_lower_tail >
                    best_upper + options_.prune_slack) {
                    c.neighbor_pruned = true;
                    ++stats_.pruned_by_neighbor_upper;
                }
            }
        }

        std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
            return a.bounds.J_partial + a.bounds.J_lower_tail <
                   b.bounds.J_partial + b.bounds.J_lower_tail;
        });
        return out;
    }

    const LinearGaussianSystem& sys_;
    const SensorSet& sensors_;
    const FeasibleSet& fs_;
    const ObjectiveSpec& spec_;
    const BBVariant variant_;
    const SearchOptions& options_;
    const int N_;
    const int S_;
    const double cost_tol_;
    const std::vector<double> suffix_min_;

    SearchStats stats_;
    double J_min_ = kInf;
    std::optional<std::vector<int>> incumbent_;
};

}  // namespace

double min_possible_cost(const std::vector<int>& prefix, int candidate, const FeasibleSet& fs) {
    const int k = static_cast<int>(prefix.size());
    if (k >= fs.horizon()) throw config_error("prefix already covers the whole horizon");
    if (candidate < 0 || candidate >= fs.num_sensors())
        throw config_error("candidate sensor index out of range");
    double total = 0.0;
    for (int n = 0; n < k; ++n) {
        const int p = prefix[static_cast<std::size_t>(n)];
        if (p < 0 || p >= fs.num_sensors()) throw config_error("prefix pick out of range");
        total += fs.costs()(n, p);
    }
    total += fs.costs()(k, candidate);
    for (int n = k + 1; n < fs.horizon(); ++n) total += fs.costs().row(n).minCoeff();
    return total;
}

SearchResult bb_search(const LinearGaussianSystem& sys, const SensorSet& sensors,
                       const FeasibleSet& fs, const ObjectiveSpec& spec, BBVariant variant,
                       const SearchOptions& options) {
    return BranchAndBound(sys, sensors, fs, spec, variant, options).run();
}

SearchResult exhaustive(const LinearGaussianSystem& sys, const SensorSet& sensors,
                        const FeasibleSet& fs, const ObjectiveSpec& spec) {
    const auto t0 = std::chrono::steady_clock::now();
    const int N = fs.horizon();
    const int S = fs.num_sensors();
    double leaves = 1.0;
    for (int k = 0; k < N; ++k) {
        leaves *= static_cast<double>(S);
        if (leaves > 1e7)
            throw size_error("exhaustive enumeration over " + std::to_string(S) + "^" +
                             std::to_string(N) + " schedules exceeds the 1e7 guard");
    }
    if (!fs.feasible())
        throw infeasible_error("no schedule fits the budget " + std::to_string(fs.budget()));
    if (fs.num_sensors() != sensors.size())
        throw config_error("feasible set sensor count does not match the sensor set");
    if (fs.horizon() != sys.horizon() || fs.horizon() != sensors.horizon())
        throw config_error("feasible set horizon does not match the system");

    const double cost_tol = budget_tol(fs.budget());
    const std::vector<double> suffix_min = suffix_min_costs(fs.costs());

    SearchStats stats;
    stats.nodes_visited = 1;
    double best_J = kInf;
    std::optional<std::vector<int>> best;

    // Depth-first over sensor indices in ascending order, reusing the prefix
    // covariance; with strict improvement this returns the lexicographically
    // smallest optimum. Subtrees that cannot meet the budget are skipped.
    struct Level {
        int next_sensor = 0;
        Eigen::MatrixXd C;
        double prefix_J = 0.0;
        double prefix_cost = 0.0;
    };
    std::vector<Level> levels(static_cast<std::size_t>(N) + 1);
    levels[0].C = sys.C0();
    std::vector<int> picks;
    picks.reserve(static_cast<std::size_t>(N));

    int depth = 0;
    ++stats.nodes_expanded;
    while (depth >= 0) {
        Level& lvl = levels[static_cast<std::size_t>(depth)];
        if (lvl.next_sensor >= S) {
            --depth;
            if (!picks.empty()) picks.pop_back();
            continue;
        }
        const int i = lvl.next_sensor++;
        const int step = depth + 1;
        const double cost_min = lvl.prefix_cost + fs.costs()(depth, i) +
                                suffix_min[static_cast<std::size_t>(step)];
        if (cost_min > fs.budget() + cost_tol) {
            ++stats.pruned_by_cost;
            continue;
        }
        Eigen::MatrixXd C_next = covariance_step(sys, lvl.C, sensors[i].info(step - 1), step);
        const double J_i = lvl.prefix_J + eval_g(C_next, spec);
        ++stats.nodes_visited;
        if (step == N) {
            if (J_i < best_J) {
                best_J = J_i;
                picks.push_back(i);
                best = picks;
                picks.pop_back();
                stats.incumbent_trace.push_back(J_i);
            }
            continue;
        }
        picks.push_back(i);
        Level& child = levels[static_cast<std::size_t>(depth + 1)];
        child.next_sensor = 0;
        child.C = std::move(C_next);
        child.prefix_J = J_i;
        child.prefix_cost = lvl.prefix_cost + fs.costs()(depth, i);
        ++depth;
        ++stats.nodes_expanded;
    }

    if (!best) throw infeasible_error("enumeration found no schedule within budget");
    Schedule schedule(std::move(*best), S);
    const double J_opt = eval_J(sys, sensors, schedule, spec).total;
    stats.wall_time = std::chrono::steady_clock::now() - t0;
    return SearchResult{std::move(schedule), J_opt, std::move(stats), Method::Exhaustive};
}

SearchResult greedy(const LinearGaussianSystem& sys, const SensorSet& sensors,
                    const FeasibleSet& fs, const ObjectiveSpec& spec, bool star) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!fs.feasible())
        throw infeasible_error("no schedule fits the budget " + std::to_string(fs.budget()));
    if (fs.num_sensors() != sensors.size())
        throw config_error("feasible set sensor count does not match the sensor set");
    if (fs.horizon() != sys.horizon() || fs.horizon() != sensors.horizon())
        throw config_error("feasible set horizon does not match the system");

    ObjectiveSpec plain = spec;
    plain.greedy_star_weighting = false;

    const int N = fs.horizon();
    const int S = fs.num_sensors();
    const double cost_tol = budget_tol(fs.budget());
    const std::vector<double> suffix_min = suffix_min_costs(fs.costs());

    SearchStats stats;
    stats.nodes_visited = 1;
    std::vector<int> picks;
    picks.reserve(static_cast<std::size_t>(N));
    Eigen::MatrixXd C = sys.C0();
    double prefix_cost = 0.0;

    for (int step = 1; step <= N; ++step) {
        int best_i = -1;
        double best_key = kInf;
        double best_cost = kInf;
        Eigen::MatrixXd best_C;
        for (int i = 0; i < S; ++i) {
            const double cost_i = fs.costs()(step - 1, i);
            const double cost_min =
                prefix_cost + cost_i + suffix_min[static_cast<std::size_t>(step)];
            if (cost_min > fs.budget() + cost_tol) {
                ++stats.pruned_by_cost;
                continue;
            }
            Eigen::MatrixXd C_i = covariance_step(sys, C, sensors[i].info(step - 1), step);
            double g = eval_g(C_i, plain);
            ++stats.nodes_visited;
            if (star) g *= 1.0 + cost_i;
            if (g < best_key || (g == best_key && cost_i < best_cost)) {
                best_i = i;
                best_key = g;
                best_cost = cost_i;
                best_C = std::move(C_i);
            }
        }
        if (best_i < 0)
            throw infeasible_error("no sensor fits the budget at step " + std::to_string(step));
        picks.push_back(best_i);
        prefix_cost += fs.costs()(step - 1, best_i);
        C = std::move(best_C);
        ++stats.nodes_expanded;
    }

    Schedule schedule(std::move(picks), S);
    const double J_opt = eval_J(sys, sensors, schedule, plain).total;
    stats.wall_time = std::chrono::steady_clock::now() - t0;
    return SearchResult{std::move(schedule), J_opt, std::move(stats),
                        star ? Method::GreedyStar : Method::Greedy};
}

}  // namespace sensched
