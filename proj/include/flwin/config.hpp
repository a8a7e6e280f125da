#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flwin/fl_engine.hpp"
#include "flwin/geometry.hpp"
#include "flwin/network.hpp"
#include "flwin/planner.hpp"

namespace flwin {

/// Compute budget as written in a config: one value per UE, or one value
/// applied to every UE of the sampled population, or unbounded.
struct ComputeBudgetSpec {
    std::optional<double> per_ue;
    std::vector<double> list;

    bool unbounded() const { return !per_ue && list.empty(); }
    std::vector<double> resolve(std::size_t n_ues) const;
};

/// Everything an experiment needs besides seed and trial count.
struct ExperimentConfig {
    NetworkConfig network;
    PathLossModel path_loss;
    FlHyperParams fl;
    std::size_t n_ues = 20;  ///< UEs of the synthetic training task
    int dimension = 10;
    WeightLaw weights = WeightLaw::Equal;
    double b_up_max = std::numeric_limits<double>::infinity();
    double b_down_max = std::numeric_limits<double>::infinity();
    ComputeBudgetSpec compute_budget;
    DatasetLaw dataset_law;

    ResourceBudget budget_for(std::size_t population_size) const;
    void validate() const;
};

/// Reads sections network, path_loss, fl, budget and dataset_law; missing
/// keys keep their defaults, unknown keys raise UnknownParameterError.
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

/// Names accepted by set_parameter.
std::vector<std::string> parameter_names();

/// Overrides one scalar field; throws UnknownParameterError for other names.
void set_parameter(ExperimentConfig& config, const std::string& name, double value);

}  // namespace flwin
