#include "flwin/geometry.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "flwin/errors.hpp"

namespace flwin {

double UePopulation::compute_rate(std::size_t i) const {
    return cycles_per_sample.at(i) * static_cast<double>(dataset_sizes.at(i)) / local_iter_time.at(i);
}

void UePopulation::validate(const NetworkConfig& config) const {
    const std::size_t n = positions.size();
    if (dataset_sizes.size() != n || cycles_per_sample.size() != n || local_iter_time.size() != n) {
        throw PreconditionError("population field lengths differ");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (positions[i].distance < config.d_min || positions[i].distance > config.r0) {
            throw PreconditionError("UE distance outside [d_min, r0]");
        }
        if (dataset_sizes[i] < 1 || !(cycles_per_sample[i] > 0.0) || !(local_iter_time[i] > 0.0)) {
            throw PreconditionError("UE dataset size, cycles and iteration time must be positive");
        }
    }
}

void DatasetLaw::validate() const {
    auto range_ok = [](double lo, double hi) { return lo <= hi; };
    if (!range_ok(mu_min, mu_max) || !range_ok(sigma_min, sigma_max) || !range_ok(cycles_min, cycles_max) ||
        !range_ok(iter_time_min, iter_time_max)) {
        throw PreconditionError("dataset law ranges must satisfy min <= max");
    }
    if (sigma_min < 0.0 || !(cycles_min > 0.0) || !(iter_time_min > 0.0)) {
        throw PreconditionError("dataset law needs sigma >= 0, cycles > 0, iteration time > 0");
    }
}

double distance_pdf(double d, double radius) {
    if (!(d > 0.0) || d > radius) throw DomainError("distance outside (0, radius]");
    return 2.0 * d / (radius * radius);
}

double active_probability(double t_up, double lambda_a) {
    if (t_up < 0.0 || lambda_a < 0.0) throw DomainError("t_up and lambda_a must be nonnegative");
    return -std::expm1(-2.0 * t_up * lambda_a);
}

double mean_interferers(const NetworkConfig& config) {
    return std::numbers::pi * config.d0 * config.d0 * config.lambda_i *
           active_probability(config.t_up, config.lambda_a);
}

double poisson_pmf(std::int64_t n, double mean) {
    if (n < 0) return 0.0;
    if (mean == 0.0) return n == 0 ? 1.0 : 0.0;
    const double k = static_cast<double>(n);
    return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
}

double poisson_tail_mass(double mean, std::int64_t truncation) {
    if (mean == 0.0) return 0.0;
    // Forward recursion over the terms above the truncation; stops once past
    // the mode and the terms no longer contribute.
    double tail = 0.0;
    std::int64_t k = truncation + 1;
    double term = poisson_pmf(k, mean);
    while (true) {
        tail += term;
        ++k;
        term *= mean / static_cast<double>(k);
        if (static_cast<double>(k) > mean && (term == 0.0 || term < 1e-20 * tail)) break;
    }
    return tail;
}

std::int64_t poisson_truncation(double mean, double tail) {
    std::int64_t t = static_cast<std::int64_t>(std::floor(mean));
    while (poisson_tail_mass(mean, t) >= tail) ++t;
    return t;
}

double interferer_count_pmf(std::int64_t n, const NetworkConfig& config, std::int64_t truncation) {
    if (n < 0) throw DomainError("interferer count must be nonnegative");
    const double area_mean = std::numbers::pi * config.d0 * config.d0 * config.lambda_i;
    const double tail = poisson_tail_mass(area_mean, truncation);
    if (tail >= 1e-12) {
        throw NumericalError("truncation " + std::to_string(truncation) + " leaves Poisson tail mass " +
                                 std::to_string(tail),
                             tail);
    }
    const double p = active_probability(config.t_up, config.lambda_a);
    if (p == 0.0) return n == 0 ? 1.0 : 0.0;
    if (area_mean == 0.0) return n == 0 ? 1.0 : 0.0;

    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);  // -inf when p == 1
    const double log_mean = std::log(area_mean);
    const double k = static_cast<double>(n);
    double sum = 0.0;
    for (std::int64_t a = n; a <= truncation; ++a) {
        const double ad = static_cast<double>(a);
        const double rest = ad - k;
        const double log_binom = std::lgamma(ad + 1.0) - std::lgamma(k + 1.0) - std::lgamma(rest + 1.0);
        const double log_thin = k * log_p + (rest == 0.0 ? 0.0 : rest * log_q);
        const double log_area = ad * log_mean - area_mean - std::lgamma(ad + 1.0);
        sum += std::exp(log_binom + log_thin + log_area);
    }
    return sum;
}

double sample_disk_distance(Rng& rng, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return radius * std::sqrt(u(rng));
}

UePopulation sample_population(const NetworkConfig& config, const DatasetLaw& law, std::uint64_t seed) {
    config.validate();
    law.validate();
    Rng rng(derive_seed(seed, streams::kPopulation, 0));
    std::poisson_distribution<std::int64_t> count(std::numbers::pi * config.r0 * config.r0 * config.lambda_i);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = static_cast<std::size_t>(count(rng));

    UePopulation pop;
    pop.positions.reserve(n);
    pop.dataset_sizes.reserve(n);
    pop.cycles_per_sample.reserve(n);
    pop.local_iter_time.reserve(n);
    auto uniform_in = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
    for (std::size_t i = 0; i < n; ++i) {
        const double d = std::max(config.d_min, sample_disk_distance(rng, config.r0));
        const double angle = 2.0 * std::numbers::pi * unit(rng);
        pop.positions.push_back({d, angle});
        const double mu = uniform_in(law.mu_min, law.mu_max);
        const double sigma = uniform_in(law.sigma_min, law.sigma_max);
        std::normal_distribution<double> size_law(mu, sigma);
        const double s = std::nearbyint(size_law(rng));
        pop.dataset_sizes.push_back(std::max<std::int64_t>(1, static_cast<std::int64_t>(s)));
        pop.cycles_per_sample.push_back(uniform_in(law.cycles_min, law.cycles_max));
        pop.local_iter_time.push_back(uniform_in(law.iter_time_min, law.iter_time_max));
    }
    return pop;
}

InterfererRealization sample_interferers(const NetworkConfig& config, Rng& rng) {
    const double area_mean = std::numbers::pi * config.d0 * config.d0 * config.lambda_i;
    const double p = active_probability(config.t_up, config.lambda_a);
    std::poisson_distribution<std::int64_t> in_area(area_mean);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    InterfererRealization out;
    const std::int64_t n_area = in_area(rng);
    for (std::int64_t k = 0; k < n_area; ++k) {
        if (!(unit(rng) < p)) continue;
        const double d = config.d0 * std::sqrt(unit(rng));
        if (d < config.d_min) continue;
        out.distances.push_back(d);
    }
    out.count = out.distances.size();
    return out;
}

InterfererRealization sample_interferers(const NetworkConfig& config, std::uint64_t seed) {
    config.validate();
    Rng rng(derive_seed(seed, streams::kInterferers, 0));
    return sample_interferers(config, rng);
}

}  // namespace flwin
