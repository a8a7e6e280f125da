#include "flwin/monte_carlo.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "flwin/errors.hpp"

namespace flwin {

namespace {

/// Streaming mean/variance with an order-preserving merge.
struct Welford {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    void merge(const Welford& o) {
        if (o.n == 0) return;
        const std::int64_t total = n + o.n;
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / static_cast<double>(total);
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
        n = total;
    }
    double std_error() const {
        if (n < 2) return 0.0;
        return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
    }
};

/// Streaming means and centered (co)moments of a pair (X, Y).
struct PairMoments {
    std::int64_t n = 0;
    double mx = 0.0, my = 0.0;
    double cxx = 0.0, cyy = 0.0, cxy = 0.0;

    void add(double x, double y) {
        ++n;
        const double dx = x - mx;
        const double dy = y - my;
        mx += dx / static_cast<double>(n);
        my += dy / static_cast<double>(n);
        cxx += dx * (x - mx);
        cyy += dy * (y - my);
        cxy += dx * (y - my);
    }
    void merge(const PairMoments& o) {
        if (o.n == 0) return;
        const std::int64_t total = n + o.n;
        const double f = static_cast<double>(n) * static_cast<double>(o.n) / static_cast<double>(total);
        const double dx = o.mx - mx;
        const double dy = o.my - my;
        mx += dx * static_cast<double>(o.n) / static_cast<double>(total);
        my += dy * static_cast<double>(o.n) / static_cast<double>(total);
        cxx += o.cxx + dx * dx * f;
        cyy += o.cyy + dy * dy * f;
        cxy += o.cxy + dx * dy * f;
        n = total;
    }
};

/// Draws the aggregate interference of one uplink window without allocating.
class InterferenceDraw {
public:
    InterferenceDraw(const NetworkConfig& config, const PathLossModel& model)
        : config_(config),
          model_(model),
          p_up_(config.p_up_mw()),
          active_(active_probability(config.t_up, config.lambda_a)),
          in_area_(std::numbers::pi * config.d0 * config.d0 * config.lambda_i) {}

    double operator()(Rng& rng) {
        const std::int64_t n_area = in_area_(rng);
        double total = 0.0;
        for (std::int64_t k = 0; k < n_area; ++k) {
            if (!(unit_(rng) < active_)) continue;
            const double d = config_.d0 * std::sqrt(unit_(rng));
            if (d < config_.d_min) continue;
            total += p_up_ * model_.evaluate(d);
        }
        return total;
    }

private:
    const NetworkConfig& config_;
    const PathLossModel& model_;
    double p_up_;
    double active_;
    std::poisson_distribution<std::int64_t> in_area_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

void check_trials(std::int64_t trials) {
    if (trials < 1) throw PreconditionError("Monte Carlo estimate needs at least one trial");
}

McEstimate bernoulli_estimate(std::int64_t successes, std::int64_t trials) {
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    return make_estimate(p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials)), trials);
}

}  // namespace

McEstimate make_estimate(double mean, double std_error, std::int64_t trials) {
    McEstimate e{mean, std_error, trials, -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
    if (trials >= kMinTrialsForCi) {
        e.ci95_low = mean - 1.96 * std_error;
        e.ci95_high = mean + 1.96 * std_error;
    }
    return e;
}

std::optional<double> draw_uplink_sinr(const NetworkConfig& config, const PathLossModel& model, Rng& rng,
                                       bool full_disk) {
    const double d1 = sample_disk_distance(rng, full_disk ? config.r0 : config.d0);
    InterferenceDraw interference(config, model);
    const double total = interference(rng);
    if (d1 < config.d_min) return std::nullopt;
    return config.p_up_mw() * model.evaluate(d1) / (total + config.noise_mw());
}

std::optional<double> draw_downlink_snr(const NetworkConfig& config, const PathLossModel& model, Rng& rng) {
    const double d1 = sample_disk_distance(rng, config.r0);
    if (d1 < config.d_min) return std::nullopt;
    return config.p_down_mw() * model.evaluate(d1) / config.noise_mw();
}

McEstimate estimate_uplink_success(const NetworkConfig& config, const PathLossModel& model, std::int64_t trials,
                                   std::uint64_t seed, const McOptions& opts) {
    config.validate();
    check_trials(trials);
    const double beta = config.beta_up();
    const double noise = config.noise_mw();
    const double p_up = config.p_up_mw();
    const double radius = opts.full_disk ? config.r0 : config.d0;
    auto counts = run_blocks<std::int64_t>(
        static_cast<std::size_t>(trials), opts.workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
            Rng rng(derive_seed(seed, streams::kUplink, b));
            InterferenceDraw interference(config, model);
            std::int64_t ok = 0;
            for (std::size_t t = begin; t < end; ++t) {
                const double d1 = sample_disk_distance(rng, radius);
                const double total = interference(rng);
                if (d1 < config.d_min) continue;
                if (p_up * model.evaluate(d1) / (total + noise) > beta) ++ok;
            }
            return ok;
        });
    std::int64_t successes = 0;
    for (auto c : counts) successes += c;
    return bernoulli_estimate(successes, trials);
}

McEstimate estimate_downlink_success(const NetworkConfig& config, const PathLossModel& model, std::int64_t trials,
                                     std::uint64_t seed, const McOptions& opts) {
    config.validate();
    check_trials(trials);
    const double beta = config.beta_down();
    auto counts = run_blocks<std::int64_t>(
        static_cast<std::size_t>(trials), opts.workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
            Rng rng(derive_seed(seed, streams::kDownlink, b));
            std::int64_t ok = 0;
            for (std::size_t t = begin; t < end; ++t) {
                const auto snr = draw_downlink_snr(config, model, rng);
                if (snr && *snr > beta) ++ok;
            }
            return ok;
        });
    std::int64_t successes = 0;
    for (auto c : counts) successes += c;
    return bernoulli_estimate(successes, trials);
}

McEstimate estimate_bandwidth(const UePopulation& population, const NetworkConfig& config,
                              const PathLossModel& model, std::int64_t rounds, LinkDirection direction,
                              double payload_bits, std::int64_t trials, std::uint64_t seed, const McOptions& opts) {
    config.validate();
    check_trials(trials);
    if (population.size() == 0) throw PreconditionError("population is empty");
    if (rounds < 0) throw DomainError("number of rounds must be nonnegative");
    if (rounds == 0) return make_estimate(0.0, 0.0, trials);

    const bool up = direction == LinkDirection::Uplink;
    const double beta = up ? config.beta_up() : config.beta_down();
    const double deadline = up ? config.deadline_up_s : config.deadline_down_s;
    const std::size_t n_ue = population.size();

    // Per trial t: X_t = sum_i 1{ok} / log2(1 + SINR), Y_t = number of ok links.
    auto blocks = run_blocks<PairMoments>(
        static_cast<std::size_t>(trials), opts.workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
            Rng rng(derive_seed(seed, up ? streams::kBandwidth : streams::kBandwidthDown, b));
            InterferenceDraw interference(config, model);
            PairMoments s;
            for (std::size_t t = begin; t < end; ++t) {
                double x = 0.0;
                double y = 0.0;
                for (std::size_t i = 0; i < n_ue; ++i) {
                    double ratio;
                    if (up) {
                        const double d1 = sample_disk_distance(rng, config.d0);
                        const double total = interference(rng);
                        if (d1 < config.d_min) continue;
                        ratio = config.p_up_mw() * model.evaluate(d1) / (total + config.noise_mw());
                    } else {
                        const auto snr = draw_downlink_snr(config, model, rng);
                        if (!snr) continue;
                        ratio = *snr;
                    }
                    if (ratio > beta) {
                        x += 1.0 / std::log2(1.0 + ratio);
                        y += 1.0;
                    }
                }
                s.add(x, y);
            }
            return s;
        });
    PairMoments total;
    for (const auto& s : blocks) total.merge(s);
    if (total.my == 0.0) return make_estimate(0.0, 0.0, trials);

    // Delta method for R = mean(X) / mean(Y).
    const double t = static_cast<double>(trials);
    const double r = total.mx / total.my;
    const double resid = std::max(0.0, total.cxx - 2.0 * r * total.cxy + r * r * total.cyy);
    const double se_r = trials > 1 ? std::sqrt(resid / (t * (t - 1.0))) / total.my : 0.0;
    const double scale = static_cast<double>(rounds) * payload_bits * static_cast<double>(n_ue) / deadline;
    return make_estimate(scale * r, scale * se_r, trials);
}

McEstimate estimate_compute(const UePopulation& population, const NetworkConfig& config, const PathLossModel& model,
                            std::int64_t tau, std::int64_t rounds, std::int64_t trials, std::uint64_t seed,
                            const McOptions& opts) {
    config.validate();
    check_trials(trials);
    if (tau < 0 || rounds < 0) throw DomainError("tau and K must be nonnegative");
    if (tau == 0 || rounds == 0) return make_estimate(0.0, 0.0, trials);
    const double beta = config.beta_down();
    auto blocks = run_blocks<Welford>(
        static_cast<std::size_t>(trials), opts.workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
            Rng rng(derive_seed(seed, streams::kCompute, b));
            Welford w;
            for (std::size_t t = begin; t < end; ++t) {
                double used = 0.0;
                for (std::size_t i = 0; i < population.size(); ++i) {
                    const auto snr = draw_downlink_snr(config, model, rng);
                    if (snr && *snr > beta) used += population.compute_rate(i);
                }
                w.add(used);
            }
            return w;
        });
    Welford all;
    for (const auto& w : blocks) all.merge(w);
    const double scale = static_cast<double>(tau) * static_cast<double>(rounds);
    return make_estimate(scale * all.mean, scale * all.std_error(), trials);
}

McEstimate estimate_interference_mean(const NetworkConfig& config, const PathLossModel& model, std::int64_t trials,
                                      std::uint64_t seed, const McOptions& opts) {
    config.validate();
    check_trials(trials);
    auto blocks = run_blocks<Welford>(
        static_cast<std::size_t>(trials), opts.workers, [&](std::size_t b, std::size_t begin, std::size_t end) {
            Rng rng(derive_seed(seed, streams::kInterferenceSum, b));
            InterferenceDraw interference(config, model);
            Welford w;
            for (std::size_t t = begin; t < end; ++t) w.add(interference(rng));
            return w;
        });
    Welford all;
    for (const auto& w : blocks) all.merge(w);
    return make_estimate(all.mean, all.std_error(), trials);
}

}  // namespace flwin
