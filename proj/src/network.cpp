#include "flwin/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "flwin/errors.hpp"

namespace flwin {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }
double dbm_to_mw(double dbm) { return db_to_linear(dbm); }
double mw_to_dbm(double mw) { return linear_to_db(mw); }

void NetworkConfig::validate() const {
    if (!(d_min > 0.0 && d_min < d0 && d0 <= r0)) {
        throw PreconditionError("network config requires 0 < d_min < d0 <= r0");
    }
    if (!(lambda_i > 0.0)) throw PreconditionError("lambda_i must be positive");
    if (!(lambda_a >= 0.0)) throw PreconditionError("lambda_a must be nonnegative");
    if (!(t_up >= 0.0)) throw PreconditionError("t_up must be nonnegative");
    if (!(deadline_up_s > 0.0 && deadline_down_s > 0.0)) {
        throw PreconditionError("transmission deadlines must be positive");
    }
    for (double v : {p_up_dbm, p_down_dbm, noise_dbm, beta_up_db, beta_down_db}) {
        if (std::isnan(v)) throw PreconditionError("power/threshold fields must not be NaN");
    }
}

namespace {

TabulatedGain checked_table(TabulatedGain table) {
    auto& pts = table.points;
    if (pts.empty()) throw PreconditionError("gain table is empty");
    std::sort(pts.begin(), pts.end());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        if (!(pts[k].first > 0.0) || !(pts[k].second > 0.0)) {
            throw PreconditionError("gain table needs positive distances and gains");
        }
        if (k > 0 && pts[k].first == pts[k - 1].first) {
            throw PreconditionError("gain table has duplicate distances");
        }
        if (k > 0 && pts[k].second > pts[k - 1].second) {
            throw PreconditionError("gain table must be nonincreasing in distance");
        }
    }
    return table;
}

}  // namespace

PathLossModel::PathLossModel(TabulatedGain table) : repr_(std::in_place_type<TabulatedGain>, checked_table(std::move(table))) {}

PathLossModel PathLossModel::constant(double gain) {
    return PathLossModel(TabulatedGain{{{1.0, gain}}, Interpolation::Linear});
}

namespace {

double interpolate(const TabulatedGain& t, double d) {
    const auto& pts = t.points;
    if (d <= pts.front().first) return pts.front().second;
    if (d >= pts.back().first) return pts.back().second;
    auto hi = std::upper_bound(pts.begin(), pts.end(), d,
                               [](double x, const auto& p) { return x < p.first; });
    auto lo = hi - 1;
    if (t.rule == Interpolation::Linear) {
        const double w = (d - lo->first) / (hi->first - lo->first);
        return lo->second + w * (hi->second - lo->second);
    }
    const double w = std::log(d / lo->first) / std::log(hi->first / lo->first);
    return std::exp(std::log(lo->second) + w * std::log(hi->second / lo->second));
}

}  // namespace

double PathLossModel::evaluate(double d) const {
    if (!(d > 0.0)) throw DomainError("gain is undefined for non-positive distance");
    if (const auto* law = std::get_if<PowerLawDb>(&repr_)) {
        return std::pow(10.0, -(law->intercept_db + law->slope_db_per_decade * std::log10(d)) / 10.0);
    }
    return interpolate(std::get<TabulatedGain>(repr_), d);
}

void FlHyperParams::validate() const {
    const double l = lipschitz_l;
    const double g = strong_convexity_gamma;
    if (!(g > 0.0 && g <= l)) throw PreconditionError("requires 0 < gamma <= L");
    if (!(gd_step_xi > 0.0 && gd_step_xi < 2.0 / l)) {
        throw PreconditionError("gd step xi must lie in (0, 2/L)");
    }
    if (!(zeta > 0.0 && zeta < g / l)) throw PreconditionError("zeta must lie in (0, gamma/L)");
    if (!(eps_local > 0.0 && eps_local <= 1.0)) throw PreconditionError("eps_local must lie in (0, 1]");
    if (!(eps_global > 0.0 && eps_global <= 1.0)) throw PreconditionError("eps_global must lie in (0, 1]");
    if (!(model_size_bits >= 0.0)) throw PreconditionError("model size must be nonnegative");
}

double gain(const PathLossModel& model, const NetworkConfig& config, double d) {
    if (!(d >= config.d_min && d <= config.r0)) {
        throw DomainError("distance " + std::to_string(d) + " m outside [d_min, r0]");
    }
    return model.evaluate(d);
}

double snr_down(const NetworkConfig& config, const PathLossModel& model, double d) {
    return config.p_down_mw() * gain(model, config, d) / config.noise_mw();
}

double snr_up_no_interference(const NetworkConfig& config, const PathLossModel& model, double d) {
    return config.p_up_mw() * gain(model, config, d) / config.noise_mw();
}

}  // namespace flwin
