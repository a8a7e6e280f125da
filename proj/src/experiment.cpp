#include "flwin/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "flwin/errors.hpp"
#include "flwin/link_analysis.hpp"
#include "flwin/monte_carlo.hpp"
#include "flwin/planner.hpp"

namespace flwin {

namespace {

struct KindName {
    ExperimentKind kind;
    const char* name;
};

constexpr KindName kKinds[] = {
    {ExperimentKind::SuccessProbUp, "success-prob-up"},
    {ExperimentKind::SuccessProbDown, "success-prob-down"},
    {ExperimentKind::Bandwidth, "bandwidth"},
    {ExperimentKind::Compute, "compute"},
    {ExperimentKind::Train, "train"},
    {ExperimentKind::Plan, "plan"},
    {ExperimentKind::Sweep, "sweep"},
};

std::string format_int(std::int64_t v) { return std::to_string(v); }

class CsvWriter {
public:
    CsvWriter(const std::string& hash, std::uint64_t seed, const std::vector<std::string>& columns) {
        out_ << "# flwin v1, config_hash=" << hash << ", seed=" << seed << '\n';
        row(columns);
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

/// One point of the sweep axis (or the unswept config).
struct SweepPoint {
    ExperimentConfig config;
    std::string hash;
    std::string param = "none";
    std::string value = "nan";
};

std::vector<SweepPoint> expand(const ExperimentSpec& spec) {
    std::vector<SweepPoint> points;
    if (!spec.sweep) {
        points.push_back({spec.config, config_hash(spec.config)});
        return points;
    }
    const auto names = parameter_names();
    if (std::find(names.begin(), names.end(), spec.sweep->param) == names.end()) {
        throw UnknownParameterError("unknown sweep parameter '" + spec.sweep->param + "'");
    }
    if (spec.sweep->values.empty()) throw PreconditionError("sweep needs at least one value");
    for (double v : spec.sweep->values) {
        SweepPoint p{spec.config, "", spec.sweep->param, format_double(v)};
        set_parameter(p.config, spec.sweep->param, v);
        p.config.validate();
        p.hash = config_hash(p.config);
        points.push_back(std::move(p));
    }
    return points;
}

const std::vector<std::string> kValidationColumns = {
    "quantity", "config_hash", "seed", "sweep_param", "sweep_value", "trials", "tau", "k_rounds", "analytic",
    "mc_mean", "mc_std_error", "mc_ci_low", "mc_ci_high", "abs_diff", "rel_diff"};

void validation_row(CsvWriter& csv, const char* quantity, const SweepPoint& p, std::uint64_t seed,
                    std::int64_t trials, std::optional<std::int64_t> tau, std::optional<std::int64_t> k,
                    double analytic, const McEstimate& mc) {
    const double diff = std::fabs(analytic - mc.mean);
    const double rel = analytic != 0.0 ? diff / std::fabs(analytic) : std::nan("");
    csv.row({quantity, p.hash, std::to_string(seed), p.param, p.value, format_int(trials),
             tau ? format_int(*tau) : "nan", k ? format_int(*k) : "nan", format_double(analytic),
             format_double(mc.mean), format_double(mc.std_error), format_double(mc.ci95_low),
             format_double(mc.ci95_high), format_double(diff), format_double(rel)});
}

void validation_point(CsvWriter& csv, ExperimentKind kind, const SweepPoint& p, const ExperimentSpec& spec,
                      std::uint64_t seed) {
    const auto& cfg = p.config;
    const auto& net = cfg.network;
    const auto& model = cfg.path_loss;
    const McOptions mc_opts{false, spec.workers};
    const bool all = kind == ExperimentKind::Sweep;

    if (all || kind == ExperimentKind::SuccessProbUp) {
        validation_row(csv, "success-prob-up", p, seed, spec.trials, {}, {}, uplink_success_probability(net, model),
                       estimate_uplink_success(net, model, spec.trials, seed, mc_opts));
    }
    if (all || kind == ExperimentKind::SuccessProbDown) {
        validation_row(csv, "success-prob-down", p, seed, spec.trials, {}, {},
                       downlink_success_probability(net, model),
                       estimate_downlink_success(net, model, spec.trials, seed, mc_opts));
    }
    if (!(all || kind == ExperimentKind::Bandwidth || kind == ExperimentKind::Compute)) return;

    const UePopulation pop = sample_population(net, cfg.dataset_law, seed);
    if (pop.size() == 0) throw PreconditionError("sampled population is empty");
    const std::int64_t k = min_rounds(cfg.fl);
    const double s = cfg.fl.model_size_bits;
    if (all || kind == ExperimentKind::Bandwidth) {
        const BandwidthOptions bw{static_cast<std::size_t>(spec.trials), seed, spec.workers};
        validation_row(csv, "bandwidth-up", p, seed, spec.trials, {}, k,
                       expected_uplink_bandwidth(pop, net, model, k, s, bw),
                       estimate_bandwidth(pop, net, model, k, LinkDirection::Uplink, s, spec.trials, seed, mc_opts));
        validation_row(csv, "bandwidth-down", p, seed, spec.trials, {}, k,
                       expected_downlink_bandwidth(pop, net, model, k, s),
                       estimate_bandwidth(pop, net, model, k, LinkDirection::Downlink, s, spec.trials, seed, mc_opts));
    }
    if (all || kind == ExperimentKind::Compute) {
        const std::int64_t tau = min_local_iterations(cfg.fl);
        validation_row(csv, "compute", p, seed, spec.trials, tau, k,
                       total_compute(tau, k, expected_compute_per_iteration(pop, net, model)),
                       estimate_compute(pop, net, model, tau, k, spec.trials, seed, mc_opts));
    }
}

ExperimentResult run_validation(const ExperimentSpec& spec, const std::vector<SweepPoint>& points,
                                std::uint64_t seed) {
    CsvWriter csv(config_hash(spec.config), seed, kValidationColumns);
    for (const auto& p : points) validation_point(csv, spec.kind, p, spec, seed);
    ExperimentResult out;
    out.csv = csv.str();
    out.summary = kind_name(spec.kind) + ": " + std::to_string(points.size()) + " sweep point(s)\n";
    return out;
}

ExperimentResult run_train(const ExperimentSpec& spec, const std::vector<SweepPoint>& points, std::uint64_t seed) {
    CsvWriter csv(config_hash(spec.config), seed,
                  {"config_hash", "seed", "sweep_param", "sweep_value", "round", "global_loss", "loss_ratio",
                   "n_up_success", "n_down_success", "skipped"});
    ExperimentResult out;
    for (const auto& p : points) {
        const auto& cfg = p.config;
        const FederatedTask task =
            make_task(cfg.n_ues, cfg.dimension, cfg.fl.lipschitz_l, cfg.fl.strong_convexity_gamma, cfg.weights, seed,
                      cfg.dataset_law);
        const LinkMode link = spec.stochastic_links ? LinkMode::stochastic(seed) : LinkMode::ideal();
        const TrainingTrace trace = run_federated(task, cfg.network, cfg.path_loss, cfg.fl, link, spec.max_rounds);
        for (const auto& rec : trace.rounds) {
            csv.row({p.hash, std::to_string(seed), p.param, p.value, format_int(rec.round),
                     format_double(rec.global_loss), format_double(rec.loss_ratio), format_int(rec.n_up_success()),
                     format_int(rec.n_down_success()), rec.skipped ? "1" : "0"});
        }
        out.summary += "train " + p.param + "=" + p.value + ": " +
                       (trace.converged ? "reached eps_global at round " + std::to_string(trace.rounds_to_target)
                                        : std::string("did not reach eps_global")) +
                       ", final loss ratio " + format_double(trace.achieved_eps_global) + "\n";
    }
    out.csv = csv.str();
    return out;
}

ExperimentResult run_plan(const ExperimentSpec& spec, const std::vector<SweepPoint>& points, std::uint64_t seed) {
    if (spec.plan_case < 1 || spec.plan_case > 3) throw PreconditionError("--case must be 1, 2 or 3");
    CsvWriter csv(config_hash(spec.config), seed,
                  {"config_hash", "seed", "sweep_param", "sweep_value", "case", "tau", "k_rounds", "k_max",
                   "eps_local_target", "eps_local_effective", "eps_global_target", "eps_global_effective", "b_up",
                   "b_down", "c_total", "feasible"});
    ExperimentResult out;
    for (const auto& p : points) {
        const auto& cfg = p.config;
        const UePopulation pop = sample_population(cfg.network, cfg.dataset_law, seed);
        if (pop.size() == 0) throw PreconditionError("sampled population is empty");
        PlanOptions opts;
        opts.bandwidth = {static_cast<std::size_t>(spec.trials), seed, spec.workers};
        const ResourceBudget budget = cfg.budget_for(pop.size());
        ResourcePlan plan;
        switch (spec.plan_case) {
            case 1: plan = plan_case1(cfg.fl, pop, cfg.network, cfg.path_loss, opts); break;
            case 2: plan = plan_case2(budget, cfg.fl, pop, cfg.network, cfg.path_loss, opts); break;
            default: plan = plan_case3(budget, cfg.fl, pop, cfg.network, cfg.path_loss, opts); break;
        }
        out.infeasible_plan = out.infeasible_plan || !plan.feasible;
        csv.row({p.hash, std::to_string(seed), p.param, p.value, format_int(plan.case_tag), format_int(plan.tau),
                 format_int(plan.k_rounds), plan.k_max ? format_int(*plan.k_max) : "nan",
                 format_double(plan.eps_local_target), format_double(plan.eps_local_effective),
                 format_double(plan.eps_global_target), format_double(plan.eps_global_effective),
                 format_double(plan.b_up), format_double(plan.b_down), format_double(plan.c_total),
                 plan.feasible ? "1" : "0"});
        if (spec.sweep) out.summary += p.param + " = " + p.value + "\n";
        out.summary += plan_to_table(plan);
    }
    out.csv = csv.str();
    return out;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

ExperimentKind parse_kind(const std::string& name) {
    for (const auto& k : kKinds) {
        if (name == k.name) return k.kind;
    }
    throw PreconditionError("unknown experiment kind '" + name + "'");
}

std::string kind_name(ExperimentKind kind) {
    for (const auto& k : kKinds) {
        if (kind == k.kind) return k.name;
    }
    return "unknown";
}

SweepAxis parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw PreconditionError("sweep must look like param=v1,v2,...");
    SweepAxis axis;
    axis.param = text.substr(0, eq);
    std::stringstream rest(text.substr(eq + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw PreconditionError("sweep value '" + item + "' is not a number");
        axis.values.push_back(v);
    }
    if (axis.values.empty()) throw PreconditionError("sweep needs at least one value");
    return axis;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (!spec.seed) throw PreconditionError("--seed is required");
    if (spec.trials < 1) throw PreconditionError("trials must be at least 1");
    if (spec.max_rounds < 1) throw PreconditionError("max-rounds must be at least 1");
    spec.config.validate();
    const auto points = expand(spec);
    switch (spec.kind) {
        case ExperimentKind::Train: return run_train(spec, points, *spec.seed);
        case ExperimentKind::Plan: return run_plan(spec, points, *spec.seed);
        default: return run_validation(spec, points, *spec.seed);
    }
}

}  // namespace flwin
