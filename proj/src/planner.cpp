#include "flwin/planner.hpp"

#include <cmath>
#include <cstdio>
#include <json.hpp>
#include <numeric>

#include "flwin/errors.hpp"

namespace flwin {

namespace {

constexpr double kHugeRounds = 9e15;

double local_rate(double l, double gamma, double xi) { return 2.0 / ((2.0 - l * xi) * xi * gamma); }

void check_local(double l, double gamma, double xi) {
    if (!(gamma > 0.0 && gamma <= l)) throw PreconditionError("requires 0 < gamma <= L");
    if (!(xi > 0.0 && xi < 2.0 / l)) throw PreconditionError("infeasible step size: xi must lie in (0, 2/L)");
}

void check_global(double l, double gamma, double zeta, double eps_global) {
    if (!(gamma > 0.0 && gamma <= l)) throw PreconditionError("requires 0 < gamma <= L");
    if (!(zeta > 0.0 && zeta < gamma / l)) throw PreconditionError("zeta must lie in (0, gamma/L)");
    if (!(eps_global > 0.0 && eps_global <= 1.0)) throw PreconditionError("eps_global must lie in (0, 1]");
}

double area_factor(const NetworkConfig& config) {
    return (config.d0 * config.d0 - config.d_min * config.d_min) / (config.r0 * config.r0);
}

const char* kAreaNote = "compute total includes the (d0^2 - d_min^2)/r0^2 area factor";

void append(std::string& text, const std::string& note) {
    if (!text.empty()) text += "; ";
    text += note;
}

void fill_resources(ResourcePlan& plan, const RoundBandwidth& per_round, double c_ue, bool with_area,
                    const NetworkConfig& config) {
    const double k = static_cast<double>(plan.k_rounds);
    plan.b_up = k * per_round.up;
    plan.b_down = k * per_round.down;
    plan.c_total = total_compute(plan.tau, plan.k_rounds, c_ue);
    if (with_area) {
        plan.c_total *= area_factor(config);
        append(plan.diagnostics, kAreaNote);
    }
}

ResourcePlan base_plan(int case_tag, const FlHyperParams& hyper) {
    ResourcePlan plan;
    plan.case_tag = case_tag;
    plan.eps_local_target = hyper.eps_local;
    plan.eps_global_target = hyper.eps_global;
    plan.eps_local_effective = hyper.eps_local;
    plan.eps_global_effective = hyper.eps_global;
    return plan;
}

ResourcePlan infeasible(ResourcePlan plan, const std::string& why) {
    plan.feasible = false;
    plan.tau = 0;
    plan.k_rounds = 0;
    plan.b_up = plan.b_down = plan.c_total = 0.0;
    append(plan.diagnostics, why);
    return plan;
}

}  // namespace

double ResourceBudget::compute_sum() const {
    return std::accumulate(per_ue_compute_max.begin(), per_ue_compute_max.end(), 0.0);
}

void ResourceBudget::validate() const {
    if (!(b_up_max >= 0.0) || !(b_down_max >= 0.0)) throw PreconditionError("bandwidth budgets must be nonnegative");
    for (double c : per_ue_compute_max) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw PreconditionError("compute budgets must be finite and nonnegative");
    }
}

std::int64_t ceil_bound(double x) {
    if (std::isnan(x)) throw NumericalError("bound evaluated to NaN", x);
    if (!(std::fabs(x) < kHugeRounds)) throw NumericalError("bound too large for an integer count", x);
    return static_cast<std::int64_t>(std::ceil(x - 1e-9 * std::max(1.0, std::fabs(x))));
}

std::int64_t min_local_iterations(double lipschitz_l, double gamma, double xi, double eps_local) {
    check_local(lipschitz_l, gamma, xi);
    if (!(eps_local > 0.0 && eps_local <= 1.0)) throw PreconditionError("eps_local must lie in (0, 1]");
    return ceil_bound(local_rate(lipschitz_l, gamma, xi) * std::log(1.0 / eps_local));
}

std::int64_t min_rounds(double lipschitz_l, double gamma, double zeta, double eps_local, double eps_global) {
    check_global(lipschitz_l, gamma, zeta, eps_global);
    if (eps_global == 1.0) return 0;
    if (!(eps_local >= 0.0 && eps_local < 1.0)) throw PreconditionError("eps_local must lie in [0, 1)");
    const double l2 = lipschitz_l * lipschitz_l;
    return ceil_bound(2.0 * l2 * std::log(1.0 / eps_global) / ((1.0 - eps_local) * gamma * gamma * zeta));
}

std::int64_t min_local_iterations(const FlHyperParams& hyper) {
    return min_local_iterations(hyper.lipschitz_l, hyper.strong_convexity_gamma, hyper.gd_step_xi, hyper.eps_local);
}

std::int64_t min_rounds(const FlHyperParams& hyper) {
    return min_rounds(hyper.lipschitz_l, hyper.strong_convexity_gamma, hyper.zeta, hyper.eps_local,
                      hyper.eps_global);
}

RoundCapResult plan_for_round_cap(std::int64_t k_max, const FlHyperParams& hyper) {
    hyper.validate();
    if (k_max < 0) throw PreconditionError("round cap must be nonnegative");
    const double l = hyper.lipschitz_l;
    const double gamma = hyper.strong_convexity_gamma;
    const double need = 2.0 * l * l * std::log(1.0 / hyper.eps_global);
    const double have = static_cast<double>(k_max) * gamma * gamma * hyper.zeta;
    RoundCapResult out;
    if (!(have > need)) return out;
    out.feasible = true;
    out.eps_local_cap = 1.0 - need / have;
    out.tau = ceil_bound(local_rate(l, gamma, hyper.gd_step_xi) * std::log(have / (have - need)));
    out.k_rounds = ceil_bound(need / ((1.0 - out.eps_local_cap) * gamma * gamma * hyper.zeta));
    return out;
}

ComputeRatioResult plan_for_compute_ratio(double ratio, const FlHyperParams& hyper) {
    hyper.validate();
    if (!(ratio >= 0.0) || std::isinf(ratio)) throw PreconditionError("compute ratio must be finite and nonnegative");
    const double l = hyper.lipschitz_l;
    const double gamma = hyper.strong_convexity_gamma;
    const double xi = hyper.gd_step_xi;
    const double log_floor = (l * xi - 2.0) * xi * gamma * ratio / 2.0;
    ComputeRatioResult out;
    out.eps_local_floor = std::exp(log_floor);
    if (!(out.eps_local_floor < 1.0)) return out;
    out.feasible = true;
    out.tau = ceil_bound(-log_floor * local_rate(l, gamma, xi));
    out.k_rounds = min_rounds(l, gamma, hyper.zeta, out.eps_local_floor, hyper.eps_global);
    return out;
}

RoundBandwidth per_round_bandwidth(const UePopulation& population, const NetworkConfig& config,
                                   const PathLossModel& model, const FlHyperParams& hyper, const PlanOptions& opts) {
    RoundBandwidth out;
    out.up = expected_uplink_bandwidth(population, config, model, 1, hyper.model_size_bits, opts.bandwidth);
    out.down = expected_downlink_bandwidth(population, config, model, 1, hyper.model_size_bits);
    return out;
}

ResourcePlan plan_case1(const FlHyperParams& hyper, const UePopulation& population, const NetworkConfig& config,
                        const PathLossModel& model, const PlanOptions& opts) {
    hyper.validate();
    config.validate();
    ResourcePlan plan = base_plan(1, hyper);
    plan.tau = min_local_iterations(hyper);
    plan.k_rounds = min_rounds(hyper);
    const RoundBandwidth per_round =
        plan.k_rounds > 0 ? per_round_bandwidth(population, config, model, hyper, opts) : RoundBandwidth{};
    fill_resources(plan, per_round, expected_compute_per_iteration(population, config, model), true, config);
    return plan;
}

ResourcePlan plan_case2(const ResourceBudget& budget, const FlHyperParams& hyper, const UePopulation& population,
                        const NetworkConfig& config, const PathLossModel& model, const PlanOptions& opts) {
    hyper.validate();
    config.validate();
    budget.validate();
    ResourcePlan plan = base_plan(2, hyper);
    const double c_ue = expected_compute_per_iteration(population, config, model);
    const RoundBandwidth per_round = per_round_bandwidth(population, config, model, hyper, opts);

    auto rounds_allowed = [](double budget_hz, double per_round_hz) {
        if (std::isinf(budget_hz) || per_round_hz == 0.0) return std::numeric_limits<double>::infinity();
        return budget_hz / per_round_hz;
    };
    const double cap =
        std::min(rounds_allowed(budget.b_down_max, per_round.down), rounds_allowed(budget.b_up_max, per_round.up));
    if (!(cap < kHugeRounds)) {
        plan.tau = min_local_iterations(hyper);
        plan.k_rounds = min_rounds(hyper);
        append(plan.diagnostics, "bandwidth budget unbounded; round count set by the accuracy targets");
        fill_resources(plan, per_round, c_ue, true, config);
        return plan;
    }
    plan.k_max = static_cast<std::int64_t>(std::floor(cap));
    const RoundCapResult r = plan_for_round_cap(*plan.k_max, hyper);
    if (!r.feasible) return infeasible(plan, "communication budget below minimum for eps_g");
    plan.eps_local_effective = r.eps_local_cap;
    plan.tau = r.tau;
    plan.k_rounds = r.k_rounds;
    fill_resources(plan, per_round, c_ue, true, config);
    return plan;
}

ResourcePlan plan_case3(const ResourceBudget& budget, const FlHyperParams& hyper, const UePopulation& population,
                        const NetworkConfig& config, const PathLossModel& model, const PlanOptions& opts) {
    hyper.validate();
    config.validate();
    budget.validate();
    ResourcePlan plan = base_plan(3, hyper);
    const double c_ue = expected_compute_per_iteration(population, config, model);

    if (budget.compute_unbounded()) {
        plan.tau = min_local_iterations(hyper);
        plan.k_rounds = min_rounds(hyper);
        append(plan.diagnostics, "compute budget unbounded; local accuracy set by the target");
    } else {
        const double sum_c = budget.compute_sum();
        if (sum_c == 0.0) return infeasible(plan, "compute budget is zero");
        if (c_ue == 0.0) return infeasible(plan, "no UE is expected to receive the global model");
        const ComputeRatioResult r = plan_for_compute_ratio(sum_c / c_ue, hyper);
        plan.eps_local_effective = r.eps_local_floor;
        if (!r.feasible) return infeasible(plan, "compute budget too small for any local progress");
        plan.tau = r.tau;
        plan.k_rounds = r.k_rounds;
        if (static_cast<double>(plan.tau) * c_ue > sum_c * (1.0 + 1e-9)) {
            append(plan.diagnostics, "tau rounded up past the compute budget");
        }
    }
    const RoundBandwidth per_round =
        plan.k_rounds > 0 ? per_round_bandwidth(population, config, model, hyper, opts) : RoundBandwidth{};
    fill_resources(plan, per_round, c_ue, false, config);
    return plan;
}

std::string plan_to_json(const ResourcePlan& plan) {
    nlohmann::json j = {
        {"case", plan.case_tag},
        {"tau", plan.tau},
        {"k_rounds", plan.k_rounds},
        {"k_max", plan.k_max ? nlohmann::json(*plan.k_max) : nlohmann::json(nullptr)},
        {"eps_local_target", plan.eps_local_target},
        {"eps_global_target", plan.eps_global_target},
        {"eps_local_effective", plan.eps_local_effective},
        {"eps_global_effective", plan.eps_global_effective},
        {"b_up", plan.b_up},
        {"b_down", plan.b_down},
        {"c_total", plan.c_total},
        {"feasible", plan.feasible},
        {"diagnostics", plan.diagnostics},
    };
    return j.dump(2);
}

std::string plan_to_table(const ResourcePlan& plan) {
    std::string out;
    auto row = [&](const char* name, const std::string& value) {
        char line[128];
        std::snprintf(line, sizeof line, "%-22s %s\n", name, value.c_str());
        out += line;
    };
    auto num = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return std::string(buf);
    };
    row("case", std::to_string(plan.case_tag));
    row("feasible", plan.feasible ? "yes" : "no");
    row("tau", std::to_string(plan.tau));
    row("K", std::to_string(plan.k_rounds));
    row("K_max", plan.k_max ? std::to_string(*plan.k_max) : "-");
    row("eps_local (target)", num(plan.eps_local_target));
    row("eps_local (effective)", num(plan.eps_local_effective));
    row("eps_global (target)", num(plan.eps_global_target));
    row("eps_global (effective)", num(plan.eps_global_effective));
    row("B_up [Hz]", num(plan.b_up));
    row("B_down [Hz]", num(plan.b_down));
    row("C_total [cycles]", num(plan.c_total));
    if (!plan.diagnostics.empty()) row("notes", plan.diagnostics);
    return out;
}

}  // namespace flwin
