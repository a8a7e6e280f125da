#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "flwin/config.hpp"
#include "flwin/errors.hpp"
#include "flwin/experiment.hpp"
#include "flwin/fl_engine.hpp"
#include "flwin/geometry.hpp"
#include "flwin/link_analysis.hpp"
#include "flwin/monte_carlo.hpp"
#include "flwin/planner.hpp"

namespace py = pybind11;
using namespace flwin;

namespace {

py::dict estimate_dict(const McEstimate& e) {
    py::dict d;
    d["mean"] = e.mean;
    d["std_error"] = e.std_error;
    d["trials"] = e.trials;
    d["ci_low"] = e.ci95_low;
    d["ci_high"] = e.ci95_high;
    return d;
}

UePopulation population_of(const ExperimentConfig& c, std::uint64_t seed) {
    return sample_population(c.network, c.dataset_law, seed);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Federated learning over wireless links: link analysis, Monte Carlo and resource planning";

    auto precondition = py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<UnknownParameterError>(m, "UnknownParameterError", precondition.ptr());
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<ExperimentConfig>(m, "Config")
        .def(py::init<>())
        .def_static("from_json", [](const std::string& text) { return config_from_json(nlohmann::json::parse(text)); })
        .def_static("load", &load_config, py::arg("path"))
        .def("to_json", [](const ExperimentConfig& c) { return config_to_json(c).dump(); })
        .def("hash", &config_hash)
        .def("set", &set_parameter, py::arg("name"), py::arg("value"))
        .def_static("parameter_names", &parameter_names)
        .def("__repr__", [](const ExperimentConfig& c) { return "<flwin.Config " + config_hash(c) + ">"; });

    m.def("mean_interferers", [](const ExperimentConfig& c) { return mean_interferers(c.network); });
    m.def("interferer_count_pmf", [](const ExperimentConfig& c, std::int64_t n) {
        const double area_mean = 3.14159265358979323846 * c.network.d0 * c.network.d0 * c.network.lambda_i;
        return interferer_count_pmf(n, c.network, poisson_truncation(area_mean));
    });
    m.def("analyze_links", [](const ExperimentConfig& c) {
        const auto s = analyze_links(c.network, c.path_loss);
        py::dict d;
        d["mu_interference"] = s.mu_i_interf;
        d["sigma_interference"] = s.sigma_i_interf;
        d["p_up_success"] = s.p_up_success;
        d["p_down_success"] = s.p_down_success;
        return d;
    });
    m.def("uplink_success_probability",
          [](const ExperimentConfig& c) { return uplink_success_probability(c.network, c.path_loss); });
    m.def("downlink_success_probability",
          [](const ExperimentConfig& c) { return downlink_success_probability(c.network, c.path_loss); });

    m.def(
        "estimate_uplink_success",
        [](const ExperimentConfig& c, std::int64_t trials, std::uint64_t seed, unsigned workers) {
            return estimate_dict(estimate_uplink_success(c.network, c.path_loss, trials, seed, {false, workers}));
        },
        py::arg("config"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 0);
    m.def(
        "estimate_downlink_success",
        [](const ExperimentConfig& c, std::int64_t trials, std::uint64_t seed, unsigned workers) {
            return estimate_dict(estimate_downlink_success(c.network, c.path_loss, trials, seed, {false, workers}));
        },
        py::arg("config"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 0);

    m.def(
        "expected_resources",
        [](const ExperimentConfig& c, std::uint64_t seed, std::size_t samples) {
            const auto pop = population_of(c, seed);
            const auto k = min_rounds(c.fl);
            const auto tau = min_local_iterations(c.fl);
            const double s = c.fl.model_size_bits;
            py::dict d;
            d["k_rounds"] = k;
            d["tau"] = tau;
            d["bandwidth_up"] = expected_uplink_bandwidth(pop, c.network, c.path_loss, k, s, {samples, seed, 0});
            d["bandwidth_down"] = expected_downlink_bandwidth(pop, c.network, c.path_loss, k, s);
            d["compute"] = total_compute(tau, k, expected_compute_per_iteration(pop, c.network, c.path_loss));
            return d;
        },
        py::arg("config"), py::arg("seed"), py::arg("samples") = 100000);
    m.def(
        "estimate_resources",
        [](const ExperimentConfig& c, std::int64_t trials, std::uint64_t seed, unsigned workers) {
            const auto pop = population_of(c, seed);
            const auto k = min_rounds(c.fl);
            const auto tau = min_local_iterations(c.fl);
            const double s = c.fl.model_size_bits;
            const McOptions opts{false, workers};
            py::dict d;
            d["bandwidth_up"] = estimate_dict(
                estimate_bandwidth(pop, c.network, c.path_loss, k, LinkDirection::Uplink, s, trials, seed, opts));
            d["bandwidth_down"] = estimate_dict(
                estimate_bandwidth(pop, c.network, c.path_loss, k, LinkDirection::Downlink, s, trials, seed, opts));
            d["compute"] = estimate_dict(estimate_compute(pop, c.network, c.path_loss, tau, k, trials, seed, opts));
            return d;
        },
        py::arg("config"), py::arg("trials"), py::arg("seed"), py::arg("workers") = 0);

    m.def("min_local_iterations",
          py::overload_cast<double, double, double, double>(&min_local_iterations), py::arg("L"),
          py::arg("gamma"), py::arg("xi"), py::arg("eps_local"));
    m.def("min_rounds", py::overload_cast<double, double, double, double, double>(&min_rounds), py::arg("L"),
          py::arg("gamma"), py::arg("zeta"), py::arg("eps_local"), py::arg("eps_global"));
    m.def("plan_for_round_cap", [](const ExperimentConfig& c, std::int64_t k_max) {
        const auto r = plan_for_round_cap(k_max, c.fl);
        py::dict d;
        d["feasible"] = r.feasible;
        d["eps_local_cap"] = r.eps_local_cap;
        d["tau"] = r.tau;
        d["k_rounds"] = r.k_rounds;
        return d;
    });
    m.def("plan_for_compute_ratio", [](const ExperimentConfig& c, double ratio) {
        const auto r = plan_for_compute_ratio(ratio, c.fl);
        py::dict d;
        d["feasible"] = r.feasible;
        d["eps_local_floor"] = r.eps_local_floor;
        d["tau"] = r.tau;
        d["k_rounds"] = r.k_rounds;
        return d;
    });

    m.def(
        "train",
        [](const ExperimentConfig& c, std::uint64_t seed, bool stochastic, std::int64_t max_rounds) {
            const auto task = make_task(c.n_ues, c.dimension, c.fl.lipschitz_l, c.fl.strong_convexity_gamma,
                                        c.weights, seed, c.dataset_law);
            const auto link = stochastic ? LinkMode::stochastic(seed) : LinkMode::ideal();
            return trace_to_json(run_federated(task, c.network, c.path_loss, c.fl, link, max_rounds));
        },
        py::arg("config"), py::arg("seed"), py::arg("stochastic") = false, py::arg("max_rounds") = 100);

    m.def(
        "run_experiment",
        [](const std::string& kind, const ExperimentConfig& c, std::uint64_t seed, std::int64_t trials,
           std::optional<std::string> sweep, int plan_case, bool stochastic, std::int64_t max_rounds,
           unsigned workers) {
            ExperimentSpec spec;
            spec.kind = parse_kind(kind);
            spec.config = c;
            spec.seed = seed;
            spec.trials = trials;
            if (sweep) spec.sweep = parse_sweep(*sweep);
            spec.plan_case = plan_case;
            spec.stochastic_links = stochastic;
            spec.max_rounds = max_rounds;
            spec.workers = workers;
            const auto r = [&] {
                py::gil_scoped_release release;
                return run_experiment(spec);
            }();
            return py::make_tuple(r.csv, r.infeasible_plan, r.summary);
        },
        py::arg("kind"), py::arg("config"), py::arg("seed"), py::arg("trials") = 100000, py::arg("sweep") = py::none(),
        py::arg("plan_case") = 1, py::arg("stochastic_links") = false, py::arg("max_rounds") = 100,
        py::arg("workers") = 0);
}
