#pragma once

#include <utility>
#include <variant>
#include <vector>

namespace flwin {

double db_to_linear(double db);
double linear_to_db(double linear);
/// dBm to milliwatts.
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Which radius normalizes the serving-distance density inside the uplink
/// success integral: 2d/d0^2 (default) or 2d/r0^2.
enum class UplinkDistanceNorm { InterferingRadius, CoverageRadius };

/// Radio and geometry parameters of a single cell.
///
/// Powers are stored in dBm and thresholds in dB, mirroring the config file.
/// `lambda_a` is an arrival rate and `t_up` a window in the same time unit,
/// so that 2 * t_up * lambda_a is dimensionless.
struct NetworkConfig {
    double r0 = 1000.0;          ///< coverage radius [m]
    double d0 = 100.0;           ///< interfering-area radius [m]
    double d_min = 1.0;          ///< minimum UE-BS distance [m]
    double lambda_i = 1e-4;      ///< UE intensity [UE / m^2]
    double lambda_a = 1.0;       ///< interferer arrival rate [1 / ms]
    double t_up = 1.0;           ///< uplink transmission window [ms]
    double p_up_dbm = 20.0;
    double p_down_dbm = 43.0;
    double noise_dbm = -173.0;
    double beta_up_db = -15.0;
    double beta_down_db = 15.0;
    double deadline_up_s = 0.01;    ///< per-UE model upload deadline T_up
    double deadline_down_s = 0.01;  ///< per-UE model download deadline T_down
    UplinkDistanceNorm uplink_norm = UplinkDistanceNorm::InterferingRadius;

    double p_up_mw() const { return dbm_to_mw(p_up_dbm); }
    double p_down_mw() const { return dbm_to_mw(p_down_dbm); }
    double noise_mw() const { return dbm_to_mw(noise_dbm); }
    double beta_up() const { return db_to_linear(beta_up_db); }
    double beta_down() const { return db_to_linear(beta_down_db); }

    /// Throws PreconditionError when an invariant is violated.
    void validate() const;
};

/// g(d) = intercept + slope * log10(d) in dB of loss.
struct PowerLawDb {
    double intercept_db = 34.0;
    double slope_db_per_decade = 40.0;
};

enum class Interpolation {
    Linear,  ///< gain linear in distance
    LogLog   ///< log(gain) linear in log(distance); exact for power laws
};

/// Tabulated linear-scale gains. Values outside the table are held at the
/// nearest endpoint.
struct TabulatedGain {
    std::vector<std::pair<double, double>> points;  ///< (distance, gain), sorted by distance
    Interpolation rule = Interpolation::LogLog;
};

/// Large-scale channel gain G(d).
class PathLossModel {
public:
    PathLossModel() = default;
    explicit PathLossModel(PowerLawDb law) : repr_(law) {}
    explicit PathLossModel(TabulatedGain table);

    static PathLossModel power_law(double intercept_db, double slope_db_per_decade) {
        return PathLossModel(PowerLawDb{intercept_db, slope_db_per_decade});
    }
    /// Degenerate channel with the same gain at every distance.
    static PathLossModel constant(double gain);

    /// Linear-scale gain at any d > 0, without the cell-domain check.
    double evaluate(double d) const;

    const std::variant<PowerLawDb, TabulatedGain>& repr() const { return repr_; }
    bool is_power_law() const { return std::holds_alternative<PowerLawDb>(repr_); }

private:
    std::variant<PowerLawDb, TabulatedGain> repr_{PowerLawDb{}};
};

/// Learning-side constants: curvature bounds, step sizes, accuracy targets
/// and model payload size.
struct FlHyperParams {
    double lipschitz_l = 0.1;
    double strong_convexity_gamma = 0.1;
    double gd_step_xi = 0.1;
    double zeta = 0.1;
    double eps_local = 0.2;
    double eps_global = 0.2;
    double model_size_bits = 1.156e6 * 8.0;

    void validate() const;
};

/// Linear gain at distance d; d must lie in [d_min, r0].
double gain(const PathLossModel& model, const NetworkConfig& config, double d);

/// Downlink SNR P_down * G(d) / noise (linear).
double snr_down(const NetworkConfig& config, const PathLossModel& model, double d);

/// Uplink SNR of a lone transmitter, P_up * G(d) / noise (linear).
double snr_up_no_interference(const NetworkConfig& config, const PathLossModel& model, double d);

}  // namespace flwin
