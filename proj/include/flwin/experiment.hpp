#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flwin/config.hpp"

namespace flwin {

enum class ExperimentKind { SuccessProbUp, SuccessProbDown, Bandwidth, Compute, Train, Plan, Sweep };

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind kind);

struct SweepAxis {
    std::string param;
    std::vector<double> values;
};

/// Parses "param=v1,v2,..."; the parameter name is checked by run_experiment.
SweepAxis parse_sweep(const std::string& text);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::Sweep;
    ExperimentConfig config;
    std::optional<std::uint64_t> seed;
    std::int64_t trials = 100000;
    std::optional<SweepAxis> sweep;
    int plan_case = 1;
    bool stochastic_links = false;
    std::int64_t max_rounds = 100;
    unsigned workers = 0;
};

struct ExperimentResult {
    std::string csv;
    bool infeasible_plan = false;
    std::string summary;  ///< human-readable text for the terminal
};

/// Runs the experiment and renders its CSV. Every kind draws random numbers
/// (populations, tasks, channels), so a seed is required. Throws
/// UnknownParameterError for an unknown sweep parameter and
/// PreconditionError for an invalid spec.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// %.9g rendering used for every float in the CSV output.
std::string format_double(double v);

}  // namespace flwin
