#pragma once

#include <cstdint>
#include <vector>

#include "sensched/model.hpp"
#include "sensched/objective.hpp"
#include "sensched/relax.hpp"

namespace sensched {

enum class ConversionMethod { Sampling, Swapping };

struct ConversionResult {
    Schedule schedule;
    double J_upper;    // eval_J(schedule), an upper bound on the binary optimum
    int trials_used;   // draws performed / swaps attempted
    ConversionMethod method;
    std::vector<double> improvement_trace;  // J after each accepted improvement
};

/// One-hot schedule picking the cheapest sensor per step (lowest index on
/// ties). Throws infeasible_error when even this schedule exceeds the budget.
Schedule min_cost_schedule(const FeasibleSet& fs);

struct SamplingOptions {
    int max_trials = 0;        // ≤0 → 50·N
    int stagnation_limit = 0;  // ≤0 → 10·N (draws without improvement)
    std::uint64_t seed = 0;
};

/// Binary schedule via categorical sampling: each row of the relaxed solution
/// is treated as a distribution over sensors; budget-violating draws are
/// discarded; the feasible draw with smallest J wins. Stops at max_trials
/// draws or after stagnation_limit draws without improvement. Falls back to
/// min_cost_schedule when no draw is feasible; throws infeasible_error when
/// that fallback is itself over budget. `start_step`/`C_init` window the
/// system as in eval_J (fs and `relaxed` must match the window).
ConversionResult convert_sampling(const RelaxedSchedule& relaxed, const FeasibleSet& fs,
                                  const LinearGaussianSystem& sys, const SensorSet& sensors,
                                  const ObjectiveSpec& spec, const SamplingOptions& options = {},
                                  int start_step = 0, const Eigen::MatrixXd* C_init = nullptr);

struct SwappingOptions {
    int max_trials = 0;  // ≤0 → S·N (attempted swaps)
};

/// Binary schedule via deterministic swapping: starting from the min-cost
/// schedule, visit time steps cyclically and try replacing the scheduled
/// sensor with each unselected sensor in descending order of its relaxed
/// weight (sensor index breaks ties). A swap is committed iff it keeps the
/// budget and strictly decreases J; a committed schedule seeds further trials
/// and the scan proceeds at the next step. Stops after max_trials attempted
/// swaps or a full pass without a commit. Windowing as in convert_sampling.
ConversionResult convert_swapping(const RelaxedSchedule& relaxed, const FeasibleSet& fs,
                                  const LinearGaussianSystem& sys, const SensorSet& sensors,
                                  const ObjectiveSpec& spec, const SwappingOptions& options = {},
                                  int start_step = 0, const Eigen::MatrixXd* C_init = nullptr);

}  // namespace sensched
