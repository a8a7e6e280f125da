#pragma once

#include <cstdint>
#include <vector>

#include "flwin/network.hpp"
#include "flwin/random.hpp"

namespace flwin {

/// Polar position relative to the base station.
struct UePosition {
    double distance = 0.0;  ///< [m]
    double angle = 0.0;     ///< [rad]
};

/// One sampled realization of the UEs in the cell.
struct UePopulation {
    std::vector<UePosition> positions;
    std::vector<std::int64_t> dataset_sizes;  ///< S_i
    std::vector<double> cycles_per_sample;    ///< c_i
    std::vector<double> local_iter_time;      ///< T_i [s]

    std::size_t size() const { return positions.size(); }
    /// Z_i = c_i * S_i / T_i [cycles/s].
    double compute_rate(std::size_t i) const;
    void validate(const NetworkConfig& config) const;
};

/// Ranges the per-UE dataset and compute characteristics are drawn from.
/// S_i ~ Normal(mu_i, sigma_i^2) with mu_i, sigma_i uniform in their ranges.
struct DatasetLaw {
    double mu_min = 1000.0, mu_max = 10000.0;
    double sigma_min = 0.2, sigma_max = 0.5;
    double cycles_min = 1e4, cycles_max = 4e4;
    double iter_time_min = 1.0, iter_time_max = 1.0;

    void validate() const;
};

/// Interferers active during one uplink window.
struct InterfererRealization {
    std::size_t count = 0;
    std::vector<double> distances;
};

/// Distance density of a point uniform on a disk: 2d / radius^2.
double distance_pdf(double d, double radius);

/// Pr(active) = 1 - exp(-2 t_up lambda_a).
double active_probability(double t_up, double lambda_a);

/// Mean number of active interferers, pi d0^2 lambda_i Pr(active).
double mean_interferers(const NetworkConfig& config);

/// Poisson PMF evaluated in log space.
double poisson_pmf(std::int64_t n, double mean);

/// Smallest truncation T with Poisson(mean) tail mass P(N > T) below `tail`.
std::int64_t poisson_truncation(double mean, double tail = 1e-12);

/// Upper-tail mass P(N > truncation) of Poisson(mean).
double poisson_tail_mass(double mean, std::int64_t truncation);

/// P(N_I = n) as the compound sum over the number of UEs in the interfering
/// area, each independently active:
///   sum_{a=n}^{T} C(a, n) p^n (1-p)^(a-n) Pois(a; pi d0^2 lambda_i).
/// Throws NumericalError carrying the neglected tail mass when the
/// truncation leaves more than 1e-12 of Poisson mass behind.
double interferer_count_pmf(std::int64_t n, const NetworkConfig& config, std::int64_t truncation);

/// Distance from the BS of a point uniform on the disk of `radius`.
double sample_disk_distance(Rng& rng, double radius);

UePopulation sample_population(const NetworkConfig& config, const DatasetLaw& law, std::uint64_t seed);

/// Count ~ Poisson(pi d0^2 lambda_i) thinned by Pr(active); distances uniform
/// on the d0 disk. Interferers that land inside d_min are dropped.
InterfererRealization sample_interferers(const NetworkConfig& config, std::uint64_t seed);
InterfererRealization sample_interferers(const NetworkConfig& config, Rng& rng);

}  // namespace flwin
