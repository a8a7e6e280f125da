// Acceptance checks. Usage: flwin_acceptance <criterion 1-8>
// Prints one line "criterion N: PASS|FAIL: detail" and exits 0 on pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "flwin/config.hpp"
#include "flwin/experiment.hpp"
#include "flwin/fl_engine.hpp"
#include "flwin/geometry.hpp"
#include "flwin/link_analysis.hpp"
#include "flwin/monte_carlo.hpp"
#include "flwin/planner.hpp"

using namespace flwin;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

constexpr std::uint64_t kSeed = 20240601;
constexpr std::int64_t kTrials = 100000;

Verdict uplink_grid() {
    const auto start = std::chrono::steady_clock::now();
    const PathLossModel model;
    double worst = 0.0;
    std::string worst_at;
    for (double lambda : {0.5e-4, 1e-4, 2e-4}) {
        for (double beta : {-15.0, -10.0, -5.0}) {
            NetworkConfig net;
            net.lambda_i = lambda;
            net.beta_up_db = beta;
            const double analytic = uplink_success_probability(net, model);
            const double mc = estimate_uplink_success(net, model, kTrials, kSeed).mean;
            const double diff = std::fabs(analytic - mc);
            if (diff > worst) {
                worst = diff;
                worst_at = fmt("lambda_i=%g beta_up=%g analytic=%.4f mc=%.4f", lambda, beta, analytic, mc);
            }
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= 0.03 && elapsed < 60.0,
            fmt("max |analytic - mc| = %.4f (limit 0.03) at %s; %.1f s (limit 60 s)", worst, worst_at.c_str(),
                elapsed)};
}

Verdict downlink_grid() {
    const PathLossModel model;
    double worst = 0.0;
    bool monotone = true;
    double prev_a = 2.0, prev_m = 2.0;
    std::string values;
    for (double beta : {5.0, 15.0, 25.0}) {
        NetworkConfig net;
        net.beta_down_db = beta;
        const double analytic = downlink_success_probability(net, model);
        const double mc = estimate_downlink_success(net, model, kTrials, kSeed).mean;
        worst = std::max(worst, std::fabs(analytic - mc));
        monotone = monotone && analytic <= prev_a && mc <= prev_m;
        prev_a = analytic;
        prev_m = mc;
        values += fmt(" %g dB: %.6f/%.6f", beta, analytic, mc);
    }
    return {worst <= 0.01 && monotone,
            fmt("max |analytic - mc| = %.2e (limit 0.01), monotone=%s;%s", worst, monotone ? "yes" : "no",
                values.c_str())};
}

std::map<std::string, std::map<std::string, double>> read_worksheet() {
    std::ifstream in(std::string(FLWIN_FIXTURE_DIR) + "/bounds_worksheet.csv");
    if (!in) throw std::runtime_error("cannot open bounds_worksheet.csv");
    std::map<std::string, std::map<std::string, double>> sheet;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string bound, step, value;
        std::getline(row, bound, ',');
        std::getline(row, step, ',');
        std::getline(row, value, ',');
        sheet[bound][step] = std::stod(value);
    }
    return sheet;
}

Verdict bound_values() {
    auto sheet = read_worksheet();
    auto& lo = sheet.at("local");
    auto& ro = sheet.at("rounds");
    // Every worksheet step must follow from the previous ones.
    const auto close = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, std::fabs(b)); };
    std::vector<std::pair<const char*, bool>> steps = {
        {"local L*xi", close(lo.at("L") * lo.at("xi"), lo.at("L_times_xi"))},
        {"local 2-L*xi", close(2.0 - lo.at("L_times_xi"), lo.at("two_minus_L_xi"))},
        {"local denominator", close(lo.at("two_minus_L_xi") * lo.at("xi") * lo.at("gamma"), lo.at("denominator"))},
        {"local factor", close(2.0 / lo.at("denominator"), lo.at("factor"))},
        {"local log", close(std::log(1.0 / lo.at("eps_local")), lo.at("log_inv_eps"))},
        {"local product", close(lo.at("factor") * lo.at("log_inv_eps"), lo.at("product"))},
        {"local ceiling", std::ceil(lo.at("product")) == lo.at("ceiling")},
        {"rounds log", close(std::log(1.0 / ro.at("eps_global")), ro.at("log_inv_eps"))},
        {"rounds numerator", close(2.0 * ro.at("L") * ro.at("L") * ro.at("log_inv_eps"), ro.at("numerator"))},
        {"rounds gamma2 zeta", close(ro.at("gamma") * ro.at("gamma") * ro.at("zeta"), ro.at("gamma2_zeta"))},
        {"rounds denominator", close((1.0 - ro.at("eps_local")) * ro.at("gamma2_zeta"), ro.at("denominator"))},
        {"rounds quotient", close(ro.at("numerator") / ro.at("denominator"), ro.at("quotient"))},
        {"rounds ceiling", std::ceil(ro.at("quotient")) == ro.at("ceiling")},
    };
    for (const auto& [name, ok] : steps) {
        if (!ok) return {false, fmt("worksheet step '%s' does not follow from the previous ones", name)};
    }
    const auto tau = min_local_iterations(0.1, 0.1, 0.1, 0.2);
    const auto k = min_rounds(0.1, 0.1, 0.1, 0.2, 0.2);
    const bool ok = tau == 162 && k == 41 && tau == static_cast<std::int64_t>(lo.at("ceiling")) &&
                    k == static_cast<std::int64_t>(ro.at("ceiling"));
    return {ok, fmt("min_local_iterations=%lld (expected 162, worksheet %g), min_rounds=%lld (expected 41, "
                    "worksheet %g)",
                    static_cast<long long>(tau), lo.at("ceiling"), static_cast<long long>(k), ro.at("ceiling"))};
}

Verdict convergence() {
    const auto start = std::chrono::steady_clock::now();
    FlHyperParams hyper;
    const NetworkConfig net;
    const PathLossModel model;
    int local_ok = 0, rounds_ok = 0;
    std::int64_t worst_local = 0, worst_rounds = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto task = make_task(20, 10, hyper.lipschitz_l, hyper.strong_convexity_gamma, WeightLaw::Equal, seed);
        const Eigen::VectorXd w0 = Eigen::VectorXd::Zero(task.dimension());
        const Eigen::VectorXd g = task.global_gradient(w0);
        std::int64_t most = 0;
        for (std::size_t i = 0; i < task.n_ues(); ++i) {
            const auto res = local_gd(task, i, w0, g, hyper, TargetAccuracy{hyper.eps_local});
            most = std::max(most, res.iterations);
        }
        worst_local = std::max(worst_local, most);
        if (most <= 162) ++local_ok;

        const auto trace = run_federated(task, net, model, hyper, LinkMode::ideal(), 100);
        const auto rounds = trace.rounds_to_target < 0 ? 1000 : trace.rounds_to_target;
        worst_rounds = std::max(worst_rounds, rounds);
        if (trace.converged && trace.rounds_to_target <= 41) ++rounds_ok;
    }
    const double elapsed = seconds_since(start);
    return {local_ok == 20 && rounds_ok >= 18 && elapsed < 30.0,
            fmt("local GD within 162 iterations in %d/20 (worst %lld), loop within 41 rounds in %d/20 (worst %lld); "
                "%.1f s (limit 30 s)",
                local_ok, static_cast<long long>(worst_local), rounds_ok, static_cast<long long>(worst_rounds),
                elapsed)};
}

Verdict thinning() {
    double worst = 0.0;
    for (double mean : {0.5, 2.7166, 10.0}) {
        NetworkConfig net;
        net.lambda_i = mean / (std::numbers::pi * net.d0 * net.d0 * active_probability(net.t_up, net.lambda_a));
        const auto trunc = poisson_truncation(std::numbers::pi * net.d0 * net.d0 * net.lambda_i);
        for (std::int64_t n = 0; n <= 40; ++n) {
            const double direct = std::exp(n * std::log(mean) - mean - std::lgamma(n + 1.0));
            worst = std::max(worst, std::fabs(interferer_count_pmf(n, net, trunc) - direct));
        }
    }
    return {worst <= 1e-10, fmt("max pointwise deviation %.3e (limit 1e-10)", worst)};
}

Verdict tradeoff() {
    FlHyperParams hyper;
    std::vector<std::int64_t> rounds, iters;
    for (double el : {0.4, 0.3, 0.2, 0.1}) {
        rounds.push_back(min_rounds(0.1, 0.1, 0.1, el, 0.2));
        iters.push_back(min_local_iterations(0.1, 0.1, 0.1, el));
    }
    bool monotone = true;
    for (std::size_t i = 1; i < rounds.size(); ++i) {
        monotone = monotone && rounds[i] < rounds[i - 1] && iters[i] > iters[i - 1];
    }

    // Oracles in closed form: cap 1 - 2L^2 ln5 / (50 gamma^2 zeta), floor exp(-(2 - L xi) xi gamma 200 / 2).
    const double cap_oracle = 1.0 - 2.0 * 0.01 * std::log(5.0) / (50.0 * 0.001);
    const double floor_oracle = std::exp(-1.99 * 0.01 * 200.0 / 2.0);

    const auto cap = plan_for_round_cap(50, hyper);
    const auto floor = plan_for_compute_ratio(200.0, hyper);

    // Same numbers through the full plans, with budgets chosen to produce K_max = 50 and ratio 200.
    const NetworkConfig net;
    const PathLossModel model;
    const auto pop = sample_population(net, DatasetLaw{}, kSeed);
    PlanOptions opts;
    opts.bandwidth.samples = 20000;
    opts.bandwidth.seed = kSeed;
    const auto per_round = per_round_bandwidth(pop, net, model, hyper, opts);
    ResourceBudget bw_budget;
    bw_budget.b_up_max = 50.5 * per_round.up;
    bw_budget.b_down_max = 50.5 * per_round.down;
    const auto plan2 = plan_case2(bw_budget, hyper, pop, net, model, opts);

    ResourceBudget c_budget;
    const double c_ue = expected_compute_per_iteration(pop, net, model);
    c_budget.per_ue_compute_max.assign(pop.size(), 200.0 * c_ue / static_cast<double>(pop.size()));
    const auto plan3 = plan_case3(c_budget, hyper, pop, net, model, opts);

    const bool ok = monotone && std::fabs(cap.eps_local_cap - 0.35623) <= 1e-4 && cap.tau == 104 &&
                    std::fabs(cap.eps_local_cap - cap_oracle) <= 1e-12 &&
                    std::fabs(floor.eps_local_floor - 0.13671) <= 1e-4 &&
                    std::fabs(floor.eps_local_floor - floor_oracle) <= 1e-12 && plan2.k_max &&
                    *plan2.k_max == 50 && std::fabs(plan2.eps_local_effective - 0.35623) <= 1e-4 &&
                    plan2.tau == 104 && std::fabs(plan3.eps_local_effective - 0.13671) <= 1e-4;
    return {ok, fmt("monotone=%s; K_max=50: cap %.5f tau %lld (plan %.5f, %lld); ratio 200: floor %.5f (plan %.5f)",
                    monotone ? "yes" : "no", cap.eps_local_cap, static_cast<long long>(cap.tau),
                    plan2.eps_local_effective, static_cast<long long>(plan2.tau), floor.eps_local_floor,
                    plan3.eps_local_effective)};
}

Verdict resources() {
    const ExperimentConfig cfg;
    const auto& net = cfg.network;
    const auto& model = cfg.path_loss;
    const auto pop = sample_population(net, cfg.dataset_law, kSeed);
    const double s = cfg.fl.model_size_bits;
    const auto k = min_rounds(cfg.fl);
    const auto tau = min_local_iterations(cfg.fl);
    const BandwidthOptions bw{static_cast<std::size_t>(kTrials), kSeed, 0};

    const auto rel = [](double a, double m) { return std::fabs(a - m) / std::fabs(a); };
    const double up = rel(expected_uplink_bandwidth(pop, net, model, k, s, bw),
                          estimate_bandwidth(pop, net, model, k, LinkDirection::Uplink, s, kTrials, kSeed).mean);
    const double down = rel(expected_downlink_bandwidth(pop, net, model, k, s),
                            estimate_bandwidth(pop, net, model, k, LinkDirection::Downlink, s, kTrials, kSeed).mean);
    const double comp = rel(total_compute(tau, k, expected_compute_per_iteration(pop, net, model)),
                            estimate_compute(pop, net, model, tau, k, kTrials, kSeed).mean);

    bool decreasing = true;
    double prev_up = INFINITY, prev_down = INFINITY;
    for (double eg : {0.1, 0.2, 0.3}) {
        FlHyperParams h = cfg.fl;
        h.eps_global = eg;
        const auto kk = min_rounds(h);
        const double bu = expected_uplink_bandwidth(pop, net, model, kk, s, {20000, kSeed, 0});
        const double bd = expected_downlink_bandwidth(pop, net, model, kk, s);
        decreasing = decreasing && bu < prev_up && bd < prev_down;
        prev_up = bu;
        prev_down = bd;
    }
    const bool ok = up <= 0.02 && down <= 0.02 && comp <= 0.02 && decreasing;
    return {ok, fmt("relative gaps: bandwidth-up %.2e, bandwidth-down %.2e, compute %.2e (limit 0.02); bandwidth "
                    "decreasing in eps_g=%s",
                    up, down, comp, decreasing ? "yes" : "no")};
}

Verdict determinism() {
    std::vector<std::pair<ExperimentKind, bool>> kinds = {
        {ExperimentKind::SuccessProbUp, false}, {ExperimentKind::SuccessProbDown, false},
        {ExperimentKind::Bandwidth, false},     {ExperimentKind::Compute, false},
        {ExperimentKind::Train, true},          {ExperimentKind::Sweep, false},
    };
    int identical = 0;
    std::string mismatched;
    for (const auto& [kind, stochastic] : kinds) {
        ExperimentSpec spec;
        spec.kind = kind;
        spec.seed = kSeed;
        spec.trials = 20000;
        spec.stochastic_links = stochastic;
        spec.max_rounds = 60;
        if (kind == ExperimentKind::SuccessProbUp) spec.sweep = parse_sweep("lambda_i=0.5e-4,2e-4");
        std::vector<std::string> outputs;
        for (unsigned workers : {1u, 2u, 3u, 8u}) {
            spec.workers = workers;
            outputs.push_back(run_experiment(spec).csv);
        }
        if (std::all_of(outputs.begin(), outputs.end(), [&](const std::string& o) { return o == outputs[0]; })) {
            ++identical;
        } else {
            mismatched += std::string(" ") + kind_name(kind);
        }
    }
    return {identical == static_cast<int>(kinds.size()),
            fmt("%d/%zu experiment kinds byte-identical across 1, 2, 3 and 8 workers%s%s", identical, kinds.size(),
                mismatched.empty() ? "" : "; differing:", mismatched.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Verdict()>> checks = {uplink_grid, downlink_grid, bound_values, convergence,
                                                          thinning,    tradeoff,      resources,    determinism};
    const int n = argc == 2 ? std::atoi(argv[1]) : 0;
    if (n < 1 || n > static_cast<int>(checks.size())) {
        std::fprintf(stderr, "usage: flwin_acceptance <criterion 1-8>\n");
        return 2;
    }
    Verdict v;
    try {
        v = checks[n - 1]();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d: %s: %s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    return v.pass ? 0 : 1;
}
