#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "flwin/geometry.hpp"
#include "flwin/network.hpp"
#include "flwin/random.hpp"

namespace flwin {

/// Sample mean with normal-approximation 95% interval. With fewer than
/// kMinTrialsForCi trials no interval is reported and the bounds are +-inf.
struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t trials = 0;
    double ci95_low = 0.0;
    double ci95_high = 0.0;

    bool contains(double value) const { return ci95_low <= value && value <= ci95_high; }
};

inline constexpr std::int64_t kMinTrialsForCi = 1000;

McEstimate make_estimate(double mean, double std_error, std::int64_t trials);

enum class LinkDirection { Uplink, Downlink };

struct McOptions {
    /// Draw the serving distance over the whole coverage disk instead of
    /// the interfering disk (uplink only).
    bool full_disk = false;
    unsigned workers = 0;
};

/// Uplink SINR of one channel realization, or nullopt when the drawn serving
/// distance falls inside d_min (counted as a failed transmission).
std::optional<double> draw_uplink_sinr(const NetworkConfig& config, const PathLossModel& model, Rng& rng,
                                       bool full_disk = false);

/// Downlink SNR of one realization with D1 uniform on the coverage disk.
std::optional<double> draw_downlink_snr(const NetworkConfig& config, const PathLossModel& model, Rng& rng);

/// Fraction of trials in which SINR_up > beta_up.
McEstimate estimate_uplink_success(const NetworkConfig& config, const PathLossModel& model, std::int64_t trials,
                                   std::uint64_t seed, const McOptions& opts = {});

/// Fraction of trials in which SNR_down > beta_down.
McEstimate estimate_downlink_success(const NetworkConfig& config, const PathLossModel& model, std::int64_t trials,
                                     std::uint64_t seed, const McOptions& opts = {});

/// Every trial is one round in which each UE of the population draws a
/// channel. The per-UE bandwidth s / (T log2(1 + SINR)) of successful links
/// is averaged with a ratio estimator and summed over UEs, then scaled by K.
McEstimate estimate_bandwidth(const UePopulation& population, const NetworkConfig& config,
                              const PathLossModel& model, std::int64_t rounds, LinkDirection direction,
                              double payload_bits, std::int64_t trials, std::uint64_t seed,
                              const McOptions& opts = {});

/// Mean of tau * K * sum over UEs with downlink success of c_i S_i / T_i.
McEstimate estimate_compute(const UePopulation& population, const NetworkConfig& config, const PathLossModel& model,
                            std::int64_t tau, std::int64_t rounds, std::int64_t trials, std::uint64_t seed,
                            const McOptions& opts = {});

/// Mean of the aggregate interference sum_j P_up G(D2_j) (heavy-tailed for
/// power-law gains; used to check interference_moments).
McEstimate estimate_interference_mean(const NetworkConfig& config, const PathLossModel& model, std::int64_t trials,
                                      std::uint64_t seed, const McOptions& opts = {});

}  // namespace flwin
