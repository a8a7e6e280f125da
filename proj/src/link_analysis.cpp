#include "flwin/link_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "flwin/errors.hpp"
#include "flwin/random.hpp"

namespace flwin {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double uplink_norm_radius(const NetworkConfig& config) {
    return config.uplink_norm == UplinkDistanceNorm::InterferingRadius ? config.d0 : config.r0;
}

/// Relative-accuracy settings for integrands whose scale is far from 1.
QuadratureOptions relative_quadrature() {
    QuadratureOptions o = default_quadrature();
    o.abs_tol = 1e-300;
    o.rel_tol = 1e-10;
    return o;
}

/// Largest d in [lo, hi] with pred(d) true, for pred true at lo and false at hi.
template <class Pred>
double bisect_boundary(Pred pred, double lo, double hi) {
    for (int it = 0; it < 400 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                            0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                              0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

}  // namespace

QuadratureOptions default_quadrature() { return QuadratureOptions{}; }

InterferenceMoments interference_moments(const NetworkConfig& config, const PathLossModel& model) {
    config.validate();
    InterferenceMoments m;
    const double p_up = config.p_up_mw();
    const double n_bar = mean_interferers(config);
    if (p_up == 0.0) return m;

    // Integrate the gain normalized to its value at d_min to keep the
    // integrands O(1); the scale is restored afterwards.
    const double g_ref = model.evaluate(config.d_min);
    const double d0_sq = config.d0 * config.d0;
    auto first = [&](double x) { return model.evaluate(x) / g_ref * 2.0 * x / d0_sq; };
    auto second = [&](double x) {
        const double g = model.evaluate(x) / g_ref;
        return g * g * 2.0 * x / d0_sq;
    };
    const auto opts = relative_quadrature();
    const double scale = p_up * g_ref;
    const double e1 = scale * integrate_adaptive_simpson(first, config.d_min, config.d0, opts).value;
    const double e2 = scale * scale * integrate_adaptive_simpson(second, config.d_min, config.d0, opts).value;

    m.per_ue_mean = e1;
    m.per_ue_variance = std::max(0.0, e2 - e1 * e1);
    m.mean = n_bar * e1;
    m.std_dev = std::sqrt(n_bar * m.per_ue_variance);
    return m;
}

double uplink_margin(const NetworkConfig& config, const PathLossModel& model, const InterferenceMoments& m,
                     double d1) {
    const double headroom = config.p_up_mw() * model.evaluate(d1) / config.beta_up() - config.noise_mw() - m.mean;
    if (m.std_dev == 0.0) {
        if (headroom > 0.0) return std::numeric_limits<double>::infinity();
        return -std::numeric_limits<double>::infinity();
    }
    return headroom / m.std_dev;
}

QuadratureResult uplink_success_quadrature(const NetworkConfig& config, const PathLossModel& model,
                                           const QuadratureOptions& opts) {
    config.validate();
    const InterferenceMoments m = interference_moments(config, model);
    const double radius = uplink_norm_radius(config);
    const double r_sq = radius * radius;

    if (m.std_dev == 0.0) {
        // Deterministic interference: success exactly where the margin is
        // positive, which for a nonincreasing gain is an interval [d_min, d*].
        auto ok = [&](double d) { return uplink_margin(config, model, m, d) > 0.0; };
        QuadratureResult r;
        if (!ok(config.d_min)) return r;
        const double edge = ok(config.d0) ? config.d0 : bisect_boundary(ok, config.d_min, config.d0);
        r.value = (edge * edge - config.d_min * config.d_min) / r_sq;
        return r;
    }

    auto integrand = [&](double d1) { return 2.0 * d1 / r_sq * normal_cdf(uplink_margin(config, model, m, d1)); };
    return integrate_adaptive_simpson(integrand, config.d_min, config.d0, opts);
}

double uplink_success_probability(const NetworkConfig& config, const PathLossModel& model,
                                  const QuadratureOptions& opts) {
    return std::clamp(uplink_success_quadrature(config, model, opts).value, 0.0, 1.0);
}

double downlink_max_distance(const NetworkConfig& config, const PathLossModel& model) {
    config.validate();
    const double p_down = config.p_down_mw();
    const double threshold = config.noise_mw() * config.beta_down();
    auto ok = [&](double d) {
        const double received = p_down * model.evaluate(d);
        if (std::isnan(received)) throw NumericalError("downlink root finding hit a NaN gain");
        return received > threshold;
    };
    if (!ok(config.d_min)) return config.d_min;
    double lo = config.d_min;
    double hi = config.r0;
    while (ok(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e15) return std::numeric_limits<double>::infinity();
    }
    return bisect_boundary(ok, lo, hi);
}

double downlink_success_probability(const NetworkConfig& config, const PathLossModel& model) {
    const double d_max = std::min(downlink_max_distance(config, model), config.r0);
    const double p = (d_max * d_max - config.d_min * config.d_min) / (config.r0 * config.r0);
    return std::clamp(p, 0.0, 1.0);
}

LinkStats analyze_links(const NetworkConfig& config, const PathLossModel& model) {
    const InterferenceMoments m = interference_moments(config, model);
    return {m.mean, m.std_dev, uplink_success_probability(config, model), downlink_success_probability(config, model)};
}

double expected_uplink_bandwidth(const UePopulation& population, const NetworkConfig& config,
                                 const PathLossModel& model, std::int64_t rounds, double payload_bits,
                                 const BandwidthOptions& opts) {
    config.validate();
    if (population.size() == 0) throw PreconditionError("population is empty");
    if (rounds < 0) throw DomainError("number of rounds must be nonnegative");
    if (rounds == 0) return 0.0;
    if (opts.samples == 0) throw PreconditionError("bandwidth estimate needs at least one sample");

    const double p_up = config.p_up_mw();
    const double noise = config.noise_mw();
    const double beta = config.beta_up();

    auto blocks = run_blocks<std::vector<double>>(
        opts.samples, opts.workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
            Rng rng(derive_seed(opts.seed, streams::kBandwidthAnalytic, b));
            std::vector<double> totals;
            totals.reserve(end - begin);
            for (std::size_t t = begin; t < end; ++t) {
                double total = 0.0;
                for (double d : sample_interferers(config, rng).distances) total += p_up * model.evaluate(d);
                totals.push_back(total);
            }
            return totals;
        });
    std::vector<double> interference;
    interference.reserve(opts.samples);
    for (auto& blk : blocks) interference.insert(interference.end(), blk.begin(), blk.end());
    std::sort(interference.begin(), interference.end());

    // Composite Gauss-Legendre over geometrically spaced panels in d1.
    constexpr int kPanels = 64;
    const double ratio = config.d0 / config.d_min;
    double weighted_cost = 0.0;
    double weighted_success = 0.0;
    for (int k = 0; k < kPanels; ++k) {
        const double a = config.d_min * std::pow(ratio, static_cast<double>(k) / kPanels);
        const double b = config.d_min * std::pow(ratio, static_cast<double>(k + 1) / kPanels);
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
            const double d1 = mid + half * kGlNodes[q];
            const double w = half * kGlWeights[q] * 2.0 * d1;
            const double signal = p_up * model.evaluate(d1);
            const double limit = signal / beta - noise;
            const auto succ_end = std::lower_bound(interference.begin(), interference.end(), limit);
            double cost = 0.0;
            for (auto it = interference.begin(); it != succ_end; ++it) {
                cost += 1.0 / std::log2(1.0 + signal / (*it + noise));
            }
            weighted_cost += w * cost;
            weighted_success += w * static_cast<double>(succ_end - interference.begin());
        }
    }
    if (weighted_success == 0.0) return 0.0;
    const double per_link = weighted_cost / weighted_success;
    const double n = static_cast<double>(population.size());
    return static_cast<double>(rounds) * payload_bits * n / config.deadline_up_s * per_link;
}

double expected_downlink_bandwidth(const UePopulation& population, const NetworkConfig& config,
                                   const PathLossModel& model, std::int64_t rounds, double payload_bits) {
    config.validate();
    if (population.size() == 0) throw PreconditionError("population is empty");
    if (rounds < 0) throw DomainError("number of rounds must be nonnegative");
    if (rounds == 0) return 0.0;
    const double p_success = downlink_success_probability(config, model);
    if (p_success == 0.0) return 0.0;

    const double upper = std::min(downlink_max_distance(config, model), config.r0);
    const double r_sq = config.r0 * config.r0;
    auto integrand = [&](double d) {
        const double snr = config.p_down_mw() * model.evaluate(d) / config.noise_mw();
        return 2.0 * d / r_sq / std::log2(1.0 + snr);
    };
    const double per_link = integrate_adaptive_simpson(integrand, config.d_min, upper, relative_quadrature()).value /
                            p_success;
    const double n = static_cast<double>(population.size());
    return static_cast<double>(rounds) * payload_bits * n / config.deadline_down_s * per_link;
}

double expected_compute_per_iteration(const UePopulation& population, const NetworkConfig& config,
                                      const PathLossModel& model) {
    const double p_success = downlink_success_probability(config, model);
    double total = 0.0;
    for (std::size_t i = 0; i < population.size(); ++i) total += population.compute_rate(i);
    return total * p_success;
}

double total_compute(std::int64_t tau, std::int64_t rounds, double c_ue_mean) {
    if (tau < 0 || rounds < 0) throw DomainError("tau and K must be nonnegative");
    return static_cast<double>(tau) * static_cast<double>(rounds) * c_ue_mean;
}

}  // namespace flwin
