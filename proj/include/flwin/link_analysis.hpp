#pragma once

#include <cstdint>

#include "flwin/geometry.hpp"
#include "flwin/network.hpp"
#include "flwin/quadrature.hpp"

namespace flwin {

/// Analytic link quantities of one configuration.
struct LinkStats {
    double mu_i_interf = 0.0;     ///< mean aggregate interference [mW]
    double sigma_i_interf = 0.0;  ///< std. dev. of aggregate interference [mW]
    double p_up_success = 0.0;
    double p_down_success = 0.0;
};

/// Expected resource consumption over a training run.
struct ResourceEstimate {
    double b_up_mean = 0.0;    ///< [Hz]
    double b_down_mean = 0.0;  ///< [Hz]
    double c_ue_mean = 0.0;    ///< [cycles/s] per local iteration
    double c_total = 0.0;      ///< tau * K * c_ue_mean
};

struct InterferenceMoments {
    double mean = 0.0;      ///< mu_I
    double std_dev = 0.0;   ///< sigma_I
    double per_ue_mean = 0.0;      ///< E[I_i]
    double per_ue_variance = 0.0;  ///< Var(I_i)
};

/// Quadrature settings used by the analytic routines: absolute tolerance 1e-8
/// and at most 2^18 subdivisions.
QuadratureOptions default_quadrature();

/// mu_I = n_I E[I_i] and sigma_I = sqrt(n_I Var(I_i)), where I_i = P_up G(D2)
/// with D2 distributed as 2x/d0^2 on [d_min, d0].
InterferenceMoments interference_moments(const NetworkConfig& config, const PathLossModel& model);

/// Normalized decoding margin xi(d1) = (P_up G(d1)/beta_up - noise - mu_I) / sigma_I.
double uplink_margin(const NetworkConfig& config, const PathLossModel& model, const InterferenceMoments& m,
                     double d1);

/// Integral over d1 in [d_min, d0] of f_D1(d1) Phi(xi(d1)), with the raw
/// quadrature value and error estimate. Falls back to the indicator of a
/// positive margin when sigma_I = 0.
QuadratureResult uplink_success_quadrature(const NetworkConfig& config, const PathLossModel& model,
                                           const QuadratureOptions& opts = default_quadrature());

/// Uplink transmission-success probability under the Normal interference
/// model, clamped to [0, 1].
double uplink_success_probability(const NetworkConfig& config, const PathLossModel& model,
                                  const QuadratureOptions& opts = default_quadrature());

/// Largest distance at which the downlink SNR still exceeds beta_down,
/// i.e. the root of P_down G(d) = noise * beta_down. Returns d_min when
/// even d_min fails and +infinity when the gain never drops below the
/// threshold.
double downlink_max_distance(const NetworkConfig& config, const PathLossModel& model);

/// (min(d_max, r0)^2 - d_min^2) / r0^2, clamped to [0, 1].
double downlink_success_probability(const NetworkConfig& config, const PathLossModel& model);

LinkStats analyze_links(const NetworkConfig& config, const PathLossModel& model);

struct BandwidthOptions {
    std::size_t samples = 100000;  ///< interference realizations for the uplink
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

/// K * sum_i E[s / (T_up log2(1 + SINR)) | SINR > beta_up].
///
/// The serving distance is integrated by composite Gauss-Legendre quadrature
/// over [d_min, d0]; the aggregate interference is averaged over
/// `opts.samples` sampled interferer realizations.
double expected_uplink_bandwidth(const UePopulation& population, const NetworkConfig& config,
                                 const PathLossModel& model, std::int64_t rounds, double payload_bits,
                                 const BandwidthOptions& opts = {});

/// K * sum_i E[s / (T_down log2(1 + SNR(D1))) | SNR > beta_down] with D1
/// distributed as 2d/r0^2; evaluated by adaptive quadrature.
double expected_downlink_bandwidth(const UePopulation& population, const NetworkConfig& config,
                                   const PathLossModel& model, std::int64_t rounds, double payload_bits);

/// sum_i (c_i S_i / T_i) * Pr(SNR_down > beta_down).
double expected_compute_per_iteration(const UePopulation& population, const NetworkConfig& config,
                                      const PathLossModel& model);

/// tau * K * c_ue_mean.
double total_compute(std::int64_t tau, std::int64_t rounds, double c_ue_mean);

}  // namespace flwin
