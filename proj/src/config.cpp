#include "flwin/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "flwin/errors.hpp"

namespace flwin {

namespace {

using nlohmann::json;

template <class T>
using Field = std::pair<const char*, double T::*>;

const std::vector<Field<NetworkConfig>>& network_fields() {
    static const std::vector<Field<NetworkConfig>> f = {
        {"r0", &NetworkConfig::r0},
        {"d0", &NetworkConfig::d0},
        {"d_min", &NetworkConfig::d_min},
        {"lambda_i", &NetworkConfig::lambda_i},
        {"lambda_a", &NetworkConfig::lambda_a},
        {"t_up", &NetworkConfig::t_up},
        {"p_up_dbm", &NetworkConfig::p_up_dbm},
        {"p_down_dbm", &NetworkConfig::p_down_dbm},
        {"noise_dbm", &NetworkConfig::noise_dbm},
        {"beta_up_db", &NetworkConfig::beta_up_db},
        {"beta_down_db", &NetworkConfig::beta_down_db},
        {"deadline_up_s", &NetworkConfig::deadline_up_s},
        {"deadline_down_s", &NetworkConfig::deadline_down_s},
    };
    return f;
}

const std::vector<Field<FlHyperParams>>& fl_fields() {
    static const std::vector<Field<FlHyperParams>> f = {
        {"lipschitz_l", &FlHyperParams::lipschitz_l},
        {"strong_convexity_gamma", &FlHyperParams::strong_convexity_gamma},
        {"gd_step_xi", &FlHyperParams::gd_step_xi},
        {"zeta", &FlHyperParams::zeta},
        {"eps_local", &FlHyperParams::eps_local},
        {"eps_global", &FlHyperParams::eps_global},
        {"model_size_bits", &FlHyperParams::model_size_bits},
    };
    return f;
}

const std::vector<Field<DatasetLaw>>& law_fields() {
    static const std::vector<Field<DatasetLaw>> f = {
        {"mu_min", &DatasetLaw::mu_min},
        {"mu_max", &DatasetLaw::mu_max},
        {"sigma_min", &DatasetLaw::sigma_min},
        {"sigma_max", &DatasetLaw::sigma_max},
        {"cycles_min", &DatasetLaw::cycles_min},
        {"cycles_max", &DatasetLaw::cycles_max},
        {"iter_time_min", &DatasetLaw::iter_time_min},
        {"iter_time_max", &DatasetLaw::iter_time_max},
    };
    return f;
}

template <class T>
bool assign(const std::vector<Field<T>>& fields, T& target, const std::string& key, double value) {
    for (const auto& [name, member] : fields) {
        if (key == name) {
            target.*member = value;
            return true;
        }
    }
    return false;
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw PreconditionError("config key '" + key + "' must be a number");
    return v.get<double>();
}

/// null means unbounded.
double bound(const json& v, const std::string& key) {
    if (v.is_null()) return std::numeric_limits<double>::infinity();
    return number(v, key);
}

json bound_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

const json& section(const json& doc, const char* name) {
    static const json empty = json::object();
    if (!doc.contains(name)) return empty;
    const json& s = doc.at(name);
    if (!s.is_object()) throw PreconditionError(std::string("config section '") + name + "' must be an object");
    return s;
}

template <class T>
void read_fields(const json& sec, const char* where, const std::vector<Field<T>>& fields, T& target,
                 const std::vector<std::string>& extra = {}) {
    for (const auto& [key, value] : sec.items()) {
        if (std::find(extra.begin(), extra.end(), key) != extra.end()) continue;
        if (!assign(fields, target, key, number(value, key))) {
            throw UnknownParameterError(std::string("unknown key '") + key + "' in section '" + where + "'");
        }
    }
}

PathLossModel read_path_loss(const json& sec) {
    if (sec.empty()) return PathLossModel{};
    const std::string kind = sec.value("kind", "power_law_db");
    if (kind == "power_law_db") {
        PowerLawDb law;
        for (const auto& [key, value] : sec.items()) {
            if (key == "kind") continue;
            if (key == "intercept_db") {
                law.intercept_db = number(value, key);
            } else if (key == "slope_db_per_decade") {
                law.slope_db_per_decade = number(value, key);
            } else {
                throw UnknownParameterError("unknown key '" + key + "' in section 'path_loss'");
            }
        }
        return PathLossModel(law);
    }
    if (kind == "custom") {
        TabulatedGain table;
        for (const auto& [key, value] : sec.items()) {
            if (key == "kind") continue;
            if (key == "points") {
                for (const auto& p : value) {
                    if (!p.is_array() || p.size() != 2) throw PreconditionError("gain table points are [distance, gain]");
                    table.points.emplace_back(number(p[0], "points"), number(p[1], "points"));
                }
            } else if (key == "interpolation") {
                const std::string rule = value.get<std::string>();
                if (rule == "linear") {
                    table.rule = Interpolation::Linear;
                } else if (rule == "loglog") {
                    table.rule = Interpolation::LogLog;
                } else {
                    throw PreconditionError("interpolation must be 'linear' or 'loglog'");
                }
            } else {
                throw UnknownParameterError("unknown key '" + key + "' in section 'path_loss'");
            }
        }
        return PathLossModel(std::move(table));
    }
    throw PreconditionError("path_loss kind must be 'power_law_db' or 'custom'");
}

json path_loss_json(const PathLossModel& model) {
    if (model.is_power_law()) {
        const auto& law = std::get<PowerLawDb>(model.repr());
        return {{"kind", "power_law_db"},
                {"intercept_db", law.intercept_db},
                {"slope_db_per_decade", law.slope_db_per_decade}};
    }
    const auto& table = std::get<TabulatedGain>(model.repr());
    json points = json::array();
    for (const auto& [d, g] : table.points) points.push_back({d, g});
    return {{"kind", "custom"},
            {"points", points},
            {"interpolation", table.rule == Interpolation::Linear ? "linear" : "loglog"}};
}

std::size_t count_value(double v, const char* name) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
        throw PreconditionError(std::string(name) + " must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<double> ComputeBudgetSpec::resolve(std::size_t n_ues) const {
    if (per_ue) return std::vector<double>(n_ues, *per_ue);
    return list;
}

ResourceBudget ExperimentConfig::budget_for(std::size_t population_size) const {
    ResourceBudget b;
    b.b_up_max = b_up_max;
    b.b_down_max = b_down_max;
    b.per_ue_compute_max = compute_budget.resolve(population_size);
    return b;
}

void ExperimentConfig::validate() const {
    network.validate();
    fl.validate();
    dataset_law.validate();
    budget_for(0).validate();
    if (compute_budget.per_ue && !(*compute_budget.per_ue >= 0.0)) {
        throw PreconditionError("compute budgets must be nonnegative");
    }
    if (n_ues < 1 || dimension < 1) throw PreconditionError("n_ues and dimension must be positive");
}

ExperimentConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw PreconditionError("config must be a JSON object");
    static const std::vector<std::string> sections = {"network", "path_loss", "fl", "budget", "dataset_law"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(sections.begin(), sections.end(), key) == sections.end()) {
            throw UnknownParameterError("unknown config section '" + key + "'");
        }
    }
    ExperimentConfig cfg;

    const json& net = section(doc, "network");
    read_fields(net, "network", network_fields(), cfg.network, {"uplink_norm"});
    if (net.contains("uplink_norm")) {
        const std::string norm = net.at("uplink_norm").get<std::string>();
        if (norm == "interfering_radius") {
            cfg.network.uplink_norm = UplinkDistanceNorm::InterferingRadius;
        } else if (norm == "coverage_radius") {
            cfg.network.uplink_norm = UplinkDistanceNorm::CoverageRadius;
        } else {
            throw PreconditionError("uplink_norm must be 'interfering_radius' or 'coverage_radius'");
        }
    }

    cfg.path_loss = read_path_loss(section(doc, "path_loss"));

    const json& fl = section(doc, "fl");
    read_fields(fl, "fl", fl_fields(), cfg.fl, {"n_ues", "dimension", "weights"});
    if (fl.contains("n_ues")) cfg.n_ues = count_value(number(fl.at("n_ues"), "n_ues"), "n_ues");
    if (fl.contains("dimension")) {
        cfg.dimension = static_cast<int>(count_value(number(fl.at("dimension"), "dimension"), "dimension"));
    }
    if (fl.contains("weights")) {
        const std::string w = fl.at("weights").get<std::string>();
        if (w == "equal") {
            cfg.weights = WeightLaw::Equal;
        } else if (w == "dataset") {
            cfg.weights = WeightLaw::Dataset;
        } else {
            throw PreconditionError("fl.weights must be 'equal' or 'dataset'");
        }
    }

    for (const auto& [key, value] : section(doc, "budget").items()) {
        if (key == "b_up_max") {
            cfg.b_up_max = bound(value, key);
        } else if (key == "b_down_max") {
            cfg.b_down_max = bound(value, key);
        } else if (key == "per_ue_compute_max") {
            if (value.is_null()) {
                cfg.compute_budget = {};
            } else if (value.is_array()) {
                cfg.compute_budget.per_ue.reset();
                for (const auto& c : value) cfg.compute_budget.list.push_back(number(c, key));
            } else {
                cfg.compute_budget.per_ue = number(value, key);
            }
        } else {
            throw UnknownParameterError("unknown key '" + key + "' in section 'budget'");
        }
    }

    read_fields(section(doc, "dataset_law"), "dataset_law", law_fields(), cfg.dataset_law);
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw PreconditionError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& cfg) {
    json net = json::object();
    for (const auto& [name, member] : network_fields()) net[name] = cfg.network.*member;
    net["uplink_norm"] =
        cfg.network.uplink_norm == UplinkDistanceNorm::InterferingRadius ? "interfering_radius" : "coverage_radius";
    json fl = json::object();
    for (const auto& [name, member] : fl_fields()) fl[name] = cfg.fl.*member;
    fl["n_ues"] = cfg.n_ues;
    fl["dimension"] = cfg.dimension;
    fl["weights"] = cfg.weights == WeightLaw::Equal ? "equal" : "dataset";
    json compute = nullptr;
    if (cfg.compute_budget.per_ue) {
        compute = *cfg.compute_budget.per_ue;
    } else if (!cfg.compute_budget.list.empty()) {
        compute = cfg.compute_budget.list;
    }
    json law = json::object();
    for (const auto& [name, member] : law_fields()) law[name] = cfg.dataset_law.*member;
    return {
        {"network", net},
        {"path_loss", path_loss_json(cfg.path_loss)},
        {"fl", fl},
        {"budget", {{"b_up_max", bound_json(cfg.b_up_max)},
                    {"b_down_max", bound_json(cfg.b_down_max)},
                    {"per_ue_compute_max", compute}}},
        {"dataset_law", law},
    };
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = config_to_json(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> parameter_names() {
    std::vector<std::string> names;
    for (const auto& f : network_fields()) names.emplace_back(f.first);
    names.emplace_back("intercept_db");
    names.emplace_back("slope_db_per_decade");
    for (const auto& f : fl_fields()) names.emplace_back(f.first);
    names.emplace_back("n_ues");
    names.emplace_back("dimension");
    names.emplace_back("b_up_max");
    names.emplace_back("b_down_max");
    names.emplace_back("per_ue_compute_max");
    for (const auto& f : law_fields()) names.emplace_back(f.first);
    return names;
}

void set_parameter(ExperimentConfig& cfg, const std::string& name, double value) {
    if (assign(network_fields(), cfg.network, name, value)) return;
    if (assign(fl_fields(), cfg.fl, name, value)) return;
    if (assign(law_fields(), cfg.dataset_law, name, value)) return;
    if (name == "intercept_db" || name == "slope_db_per_decade") {
        if (!cfg.path_loss.is_power_law()) {
            throw UnknownParameterError("'" + name + "' applies only to the power-law path loss");
        }
        PowerLawDb law = std::get<PowerLawDb>(cfg.path_loss.repr());
        (name == "intercept_db" ? law.intercept_db : law.slope_db_per_decade) = value;
        cfg.path_loss = PathLossModel(law);
    } else if (name == "n_ues") {
        cfg.n_ues = count_value(value, "n_ues");
    } else if (name == "dimension") {
        cfg.dimension = static_cast<int>(count_value(value, "dimension"));
    } else if (name == "b_up_max") {
        cfg.b_up_max = value;
    } else if (name == "b_down_max") {
        cfg.b_down_max = value;
    } else if (name == "per_ue_compute_max") {
        cfg.compute_budget = {value, {}};
    } else {
        throw UnknownParameterError("unknown parameter '" + name + "'");
    }
}

}  // namespace flwin
