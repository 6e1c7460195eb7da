#pragma once

#include <chrono>
#include <cstdint>
#include <vector>

#include "sensched/convert.hpp"
#include "sensched/model.hpp"
#include "sensched/objective.hpp"
#include "sensched/relax.hpp"

namespace sensched {

/// Branch-and-bound flavors, differing in how a node's tail is bounded:
///  - BBC: convex tail relaxation for the lower bound plus a swapping
///         conversion for an upper bound (which also seeds the incumbent).
///  - BBL: convex tail relaxation, lower bound only.
///  - BBZ: tail bounded below by zero (prefix value alone).
enum class BBVariant { BBC, BBL, BBZ };

enum class Method { BBC, BBL, BBZ, Exhaustive, Greedy, GreedyStar, Convex };

/// Bounds computed for one candidate extension of a search node.
struct NodeBounds {
    double J_partial = 0.0;      // exact value of the extended prefix
    double J_lower_tail = 0.0;   // lower bound on the remaining steps
    double J_upper_tail = 0.0;   // upper bound on the remaining steps (+inf if unknown)
    double cost_min_completion = 0.0;  // cheapest total cost of any completion
};

struct SearchStats {
    std::int64_t nodes_visited = 0;   // candidate extensions whose prefix value was evaluated (+ root)
    std::int64_t nodes_expanded = 0;  // internal nodes whose children were generated
    std::int64_t pruned_by_cost = 0;
    std::int64_t pruned_by_incumbent = 0;
    std::int64_t pruned_by_lower_bound = 0;
    std::int64_t pruned_by_neighbor_upper = 0;
    std::int64_t relaxations_solved = 0;
    std::chrono::duration<double> wall_time{0.0};
    std::vector<double> incumbent_trace;  // incumbent value after each improvement
};

struct SearchResult {
    Schedule schedule;
    double J_opt;
    SearchStats stats;
    Method method;
};

/// Cheapest achievable total cost of any schedule that starts with `prefix`
/// and picks `candidate` next: spent cost + candidate cost + per-step minima
/// for the remaining steps.
double min_possible_cost(const std::vector<int>& prefix, int candidate,
                         const FeasibleSet& fs);

struct SearchOptions {
    RelaxOptions relax;        // settings for the tail relaxations (BBC/BBL)
    int swap_trials = 0;       // ≤0 → sensors × tail length (BBC conversions)
    double prune_slack = 1e-9; // absolute slack on bound comparisons (never prune ties)
};

/// Depth-first branch-and-bound over one-hot schedules. Candidate extensions
/// are admitted when their cheapest completion fits the budget and their
/// prefix value does not exceed the incumbent; admitted candidates are bounded
/// per the variant, filtered against the smallest sibling upper bound (BBC),
/// sorted by ascending lower bound, and re-checked against the incumbent at
/// expansion time. Returns a provably optimal schedule. Throws
/// infeasible_error when no schedule fits the budget.
SearchResult bb_search(const LinearGaussianSystem& sys, const SensorSet& sensors,
                       const FeasibleSet& fs, const ObjectiveSpec& spec, BBVariant variant,
                       const SearchOptions& options = {});

/// Enumerates every one-hot schedule within budget (depth-first, ascending
/// sensor index, so the first optimum found is lexicographically smallest).
/// Guarded to S^N ≤ 1e7 (size_error beyond). The reference optimizer for
/// tests and small instances.
SearchResult exhaustive(const LinearGaussianSystem& sys, const SensorSet& sensors,
                        const FeasibleSet& fs, const ObjectiveSpec& spec);

/// Myopic baseline: at each step picks the sensor minimizing the step measure
/// (weighted by (1 + cost) when star), among sensors whose cheapest completion
/// fits the budget. Ties break toward lower cost, then lower index. J_opt is
/// the plain unweighted objective of the chosen schedule.
SearchResult greedy(const LinearGaussianSystem& sys, const SensorSet& sensors,
                    const FeasibleSet& fs, const ObjectiveSpec& spec, bool star = false);

}  // namespace sensched
