#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "flwin/geometry.hpp"
#include "flwin/link_analysis.hpp"
#include "flwin/network.hpp"

namespace flwin {

/// Resource limits. Infinite bandwidths and an empty compute list mean
/// "unbounded".
struct ResourceBudget {
    double b_up_max = std::numeric_limits<double>::infinity();    ///< [Hz]
    double b_down_max = std::numeric_limits<double>::infinity();  ///< [Hz]
    std::vector<double> per_ue_compute_max;                      ///< C_i [cycles/s]

    bool compute_unbounded() const { return per_ue_compute_max.empty(); }
    double compute_sum() const;
    void validate() const;
};

struct ResourcePlan {
    int case_tag = 1;
    std::int64_t tau = 0;
    std::int64_t k_rounds = 0;
    std::optional<std::int64_t> k_max;  ///< round cap implied by the bandwidth budget
    double eps_local_target = 0.0;
    double eps_global_target = 0.0;
    double eps_local_effective = 0.0;
    double eps_global_effective = 0.0;
    double b_up = 0.0;     ///< [Hz] over all rounds
    double b_down = 0.0;   ///< [Hz] over all rounds
    double c_total = 0.0;  ///< [cycles]
    bool feasible = true;
    std::string diagnostics;
};

/// Integer ceiling that ignores round-off just above an integer.
std::int64_t ceil_bound(double x);

/// ceil(2 / ((2 - L xi) xi gamma) * ln(1/eps_local)).
std::int64_t min_local_iterations(double lipschitz_l, double gamma, double xi, double eps_local);

/// ceil(2 L^2 ln(1/eps_global) / ((1 - eps_local) gamma^2 zeta)); 0 when
/// eps_global = 1.
std::int64_t min_rounds(double lipschitz_l, double gamma, double zeta, double eps_local, double eps_global);

std::int64_t min_local_iterations(const FlHyperParams& hyper);
std::int64_t min_rounds(const FlHyperParams& hyper);

/// Accuracy/iteration pair forced by a cap of k_max rounds at the target eps_global.
struct RoundCapResult {
    bool feasible = false;
    double eps_local_cap = 1.0;  ///< 1 - 2 L^2 ln(1/eps_g) / (k_max gamma^2 zeta)
    std::int64_t tau = 0;
    std::int64_t k_rounds = 0;
};
RoundCapResult plan_for_round_cap(std::int64_t k_max, const FlHyperParams& hyper);

/// Accuracy/iteration pair forced by a compute budget sum C_i = ratio * C_UE.
struct ComputeRatioResult {
    bool feasible = false;
    double eps_local_floor = 1.0;  ///< exp((L xi - 2) xi gamma ratio / 2)
    std::int64_t tau = 0;
    std::int64_t k_rounds = 0;
};
ComputeRatioResult plan_for_compute_ratio(double ratio, const FlHyperParams& hyper);

struct PlanOptions {
    BandwidthOptions bandwidth;  ///< uplink bandwidth sampling
};

/// Per-round expected bandwidths (K = 1).
struct RoundBandwidth {
    double up = 0.0;
    double down = 0.0;
};
RoundBandwidth per_round_bandwidth(const UePopulation& population, const NetworkConfig& config,
                                   const PathLossModel& model, const FlHyperParams& hyper,
                                   const PlanOptions& opts = {});

/// Both resources ample: tau and K from the target accuracies.
ResourcePlan plan_case1(const FlHyperParams& hyper, const UePopulation& population, const NetworkConfig& config,
                        const PathLossModel& model, const PlanOptions& opts = {});

/// Bandwidth capped: K_max from the budget fixes the local accuracy cap.
ResourcePlan plan_case2(const ResourceBudget& budget, const FlHyperParams& hyper, const UePopulation& population,
                        const NetworkConfig& config, const PathLossModel& model, const PlanOptions& opts = {});

/// Compute capped: the budget fixes the local accuracy floor.
ResourcePlan plan_case3(const ResourceBudget& budget, const FlHyperParams& hyper, const UePopulation& population,
                        const NetworkConfig& config, const PathLossModel& model, const PlanOptions& opts = {});

std::string plan_to_json(const ResourcePlan& plan);
std::string plan_to_table(const ResourcePlan& plan);

}  // namespace flwin
