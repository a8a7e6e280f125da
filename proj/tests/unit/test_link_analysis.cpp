#include <doctest.h>

#include <cmath>
#include <numbers>

#include "flwin/errors.hpp"
#include "flwin/link_analysis.hpp"
#include "flwin/monte_carlo.hpp"

using namespace flwin;

namespace {

const PathLossModel kLaw = PathLossModel::power_law(34.0, 40.0);

/// Dense interferer field in which the Normal interference model is accurate.
NetworkConfig clt_regime(double d_min, double beta_up_db) {
    NetworkConfig cfg;
    cfg.lambda_i = 1e-2;
    cfg.d_min = d_min;
    cfg.beta_up_db = beta_up_db;
    return cfg;
}

UePopulation single_ue(double c = 1e4, std::int64_t s = 1000, double t = 1.0) {
    UePopulation pop;
    pop.positions.push_back({10.0, 0.0});
    pop.dataset_sizes.push_back(s);
    pop.cycles_per_sample.push_back(c);
    pop.local_iter_time.push_back(t);
    return pop;
}

}  // namespace

TEST_CASE("interference moments with a constant gain") {
    NetworkConfig cfg;
    const double g0 = 1e-9;
    const auto m = interference_moments(cfg, PathLossModel::constant(g0));
    const double per_ue = cfg.p_up_mw() * g0 * (1.0 - cfg.d_min * cfg.d_min / (cfg.d0 * cfg.d0));
    CHECK(m.per_ue_mean == doctest::Approx(per_ue).epsilon(1e-9));
    CHECK(m.mean == doctest::Approx(mean_interferers(cfg) * per_ue).epsilon(1e-9));
}

TEST_CASE("interference moments vanish without uplink power") {
    NetworkConfig cfg;
    cfg.p_up_dbm = -INFINITY;
    const auto m = interference_moments(cfg, kLaw);
    CHECK(m.mean == 0.0);
    CHECK(m.std_dev == 0.0);
}

TEST_CASE("per-interferer moments match closed forms for the power law") {
    // G(x) = k x^-4 with k = 10^-3.4: E[G] = 2k/d0^2 * (d_min^-2 - d0^-2) / 2,
    // E[G^2] = 2k^2/d0^2 * (d_min^-6 - d0^-6) / 6.
    NetworkConfig cfg;
    const double k = std::pow(10.0, -3.4);
    const double p = cfg.p_up_mw();
    const double d0 = cfg.d0;
    const double e1 = 2.0 * k / (d0 * d0) * (std::pow(cfg.d_min, -2.0) - std::pow(d0, -2.0)) / 2.0;
    const double e2 = 2.0 * k * k / (d0 * d0) * (std::pow(cfg.d_min, -6.0) - std::pow(d0, -6.0)) / 6.0;
    const auto m = interference_moments(cfg, kLaw);
    CHECK(m.per_ue_mean == doctest::Approx(p * e1).epsilon(1e-8));
    CHECK(m.per_ue_variance == doctest::Approx(p * p * (e2 - e1 * e1)).epsilon(1e-8));
    CHECK(m.std_dev == doctest::Approx(std::sqrt(mean_interferers(cfg) * m.per_ue_variance)).epsilon(1e-12));
}

TEST_CASE("interference mean agrees with a 10^7-sample simulation") {
    NetworkConfig cfg;
    const auto m = interference_moments(cfg, kLaw);
    const auto mc = estimate_interference_mean(cfg, kLaw, 10'000'000, 2024);
    MESSAGE("analytic " << m.mean << ", simulated " << mc.mean << " +- " << mc.std_error);
    CHECK(std::fabs(mc.mean - m.mean) <= 0.01 * m.mean);
}

TEST_CASE("uplink success limits") {
    SUBCASE("vanishing threshold") {
        NetworkConfig cfg;
        cfg.beta_up_db = -300.0;
        const double limit = 1.0 - cfg.d_min * cfg.d_min / (cfg.d0 * cfg.d0);
        CHECK(uplink_success_probability(cfg, kLaw) == doctest::Approx(limit).epsilon(1e-9));
    }
    SUBCASE("huge threshold in a dense field") {
        NetworkConfig cfg = clt_regime(30.0, 60.0);
        CHECK(uplink_success_probability(cfg, kLaw) < 1e-3);
    }
    SUBCASE("huge threshold with a deterministic channel") {
        NetworkConfig cfg;
        cfg.beta_up_db = 300.0;
        CHECK(uplink_success_probability(cfg, PathLossModel::constant(1e-6)) == 0.0);
    }
}

TEST_CASE("uplink success without interference is the covered area fraction") {
    NetworkConfig cfg;
    cfg.lambda_a = 0.0;
    cfg.beta_up_db = 100.0;
    // P G(d)/N > beta  <=>  d < d* with 10^(-3.4) d^-4 = 10^(10 - 2 - 17.3)
    const double d_star = std::pow(10.0, (-3.4 - (10.0 - 2.0 - 17.3)) / 4.0);
    const double expected = (d_star * d_star - 1.0) / (cfg.d0 * cfg.d0);
    CHECK(uplink_success_probability(cfg, kLaw) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("uplink success is nonincreasing in beta_up and lambda_i") {
    for (double lambda : {0.5e-4, 1e-4, 2e-4}) {
        double prev = 2.0;
        for (double beta : {-15.0, -10.0, -5.0}) {
            NetworkConfig cfg;
            cfg.lambda_i = lambda;
            cfg.beta_up_db = beta;
            const double p = uplink_success_probability(cfg, kLaw);
            CHECK(p <= prev);
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            prev = p;
        }
    }
    for (double beta : {-15.0, -10.0, -5.0}) {
        double prev = 2.0;
        for (double lambda : {0.5e-4, 1e-4, 2e-4}) {
            NetworkConfig cfg;
            cfg.lambda_i = lambda;
            cfg.beta_up_db = beta;
            const double p = uplink_success_probability(cfg, kLaw);
            CHECK(p <= prev);
            prev = p;
        }
    }
}

TEST_CASE("uplink analytic value matches simulation where the Normal model holds") {
    struct Point {
        double d_min, beta_db;
    };
    for (const Point pt : {Point{30.0, -30.0}, Point{30.0, -25.0}, Point{20.0, -35.0}}) {
        const NetworkConfig cfg = clt_regime(pt.d_min, pt.beta_db);
        const double analytic = uplink_success_probability(cfg, kLaw);
        const auto mc = estimate_uplink_success(cfg, kLaw, 100000, 11);
        MESSAGE("d_min " << pt.d_min << " beta " << pt.beta_db << ": " << analytic << " vs " << mc.mean);
        CHECK(std::fabs(analytic - mc.mean) <= 0.01);
    }
}

TEST_CASE("uplink quadrature is stable under tolerance halving") {
    NetworkConfig cfg;
    auto opts = default_quadrature();
    const auto coarse = uplink_success_quadrature(cfg, kLaw, opts);
    opts.abs_tol /= 2.0;
    const auto fine = uplink_success_quadrature(cfg, kLaw, opts);
    CHECK(std::fabs(fine.value - coarse.value) <= std::max(coarse.error_estimate, 1e-15));
}

TEST_CASE("coverage-radius normalization rescales by d0^2 / r0^2") {
    NetworkConfig a;
    NetworkConfig b;
    b.uplink_norm = UplinkDistanceNorm::CoverageRadius;
    const double ratio = (a.d0 * a.d0) / (a.r0 * a.r0);
    CHECK(uplink_success_probability(b, kLaw) == doctest::Approx(ratio * uplink_success_probability(a, kLaw)).epsilon(1e-7));
}

TEST_CASE("downlink maximum distance and success") {
    NetworkConfig cfg;
    // 10^4.3 * 10^-3.4 d^-4 = 10^-17.3 * 10^1.5
    const double d_max = std::pow(10.0, (4.3 - 3.4 + 17.3 - 1.5) / 4.0);
    CHECK(d_max == doctest::Approx(1.4962e4).epsilon(1e-4));
    CHECK(downlink_max_distance(cfg, kLaw) == doctest::Approx(d_max).epsilon(1e-9));
    CHECK(downlink_success_probability(cfg, kLaw) == doctest::Approx(1.0 - 1e-6).epsilon(1e-12));
}

TEST_CASE("downlink success limits and monotonicity") {
    NetworkConfig cfg;
    cfg.beta_down_db = 300.0;
    CHECK(downlink_success_probability(cfg, kLaw) == 0.0);

    double prev = 2.0;
    for (double beta : {5.0, 15.0, 25.0, 60.0, 70.0, 80.0}) {
        NetworkConfig c;
        c.beta_down_db = beta;
        const double p = downlink_success_probability(c, kLaw);
        CHECK(p <= prev);
        prev = p;
    }
    prev = -1.0;
    for (double power : {-10.0, 0.0, 10.0, 20.0, 43.0}) {
        NetworkConfig c;
        c.p_down_dbm = power;
        c.beta_down_db = 60.0;
        const double p = downlink_success_probability(c, kLaw);
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("downlink with a partially covered cell") {
    NetworkConfig cfg;
    cfg.beta_down_db = 70.0;
    const double d_max = std::pow(10.0, (4.3 - 3.4 + 17.3 - 7.0) / 4.0);
    REQUIRE(d_max < cfg.r0);
    const double expected = (d_max * d_max - 1.0) / (cfg.r0 * cfg.r0);
    CHECK(downlink_success_probability(cfg, kLaw) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("bandwidth edge cases") {
    NetworkConfig cfg;
    const auto pop = single_ue();
    CHECK(expected_uplink_bandwidth(pop, cfg, kLaw, 0, 8e6) == 0.0);
    CHECK(expected_downlink_bandwidth(pop, cfg, kLaw, 0, 8e6) == 0.0);
    CHECK_THROWS_AS(expected_uplink_bandwidth(UePopulation{}, cfg, kLaw, 1, 8e6), PreconditionError);
    CHECK_THROWS_AS(expected_downlink_bandwidth(UePopulation{}, cfg, kLaw, 1, 8e6), PreconditionError);
}

TEST_CASE("bandwidth of a deterministic single link") {
    NetworkConfig cfg;
    cfg.lambda_a = 0.0;
    const double g0 = 1e-12;
    const auto model = PathLossModel::constant(g0);
    const auto pop = single_ue();
    const double s = 9.248e6;
    const double up_snr = cfg.p_up_mw() * g0 / cfg.noise_mw();
    const double down_snr = cfg.p_down_mw() * g0 / cfg.noise_mw();
    CHECK(expected_uplink_bandwidth(pop, cfg, model, 1, s) ==
          doctest::Approx(s / (cfg.deadline_up_s * std::log2(1.0 + up_snr))).epsilon(1e-12));
    CHECK(expected_downlink_bandwidth(pop, cfg, model, 1, s) ==
          doctest::Approx(s / (cfg.deadline_down_s * std::log2(1.0 + down_snr))).epsilon(1e-9));
}

TEST_CASE("bandwidth is linear in K and in the payload") {
    NetworkConfig cfg;
    const auto pop = sample_population(cfg, DatasetLaw{}, 3);
    BandwidthOptions opts;
    opts.samples = 20000;
    opts.seed = 5;
    const double up1 = expected_uplink_bandwidth(pop, cfg, kLaw, 1, 8e6, opts);
    CHECK(expected_uplink_bandwidth(pop, cfg, kLaw, 2, 8e6, opts) == doctest::Approx(2.0 * up1).epsilon(1e-12));
    CHECK(expected_uplink_bandwidth(pop, cfg, kLaw, 1, 16e6, opts) == doctest::Approx(2.0 * up1).epsilon(1e-12));
    const double down1 = expected_downlink_bandwidth(pop, cfg, kLaw, 1, 8e6);
    CHECK(expected_downlink_bandwidth(pop, cfg, kLaw, 2, 8e6) == doctest::Approx(2.0 * down1).epsilon(1e-12));
    CHECK(expected_downlink_bandwidth(pop, cfg, kLaw, 1, 4e6) == doctest::Approx(0.5 * down1).epsilon(1e-12));
}

TEST_CASE("compute per iteration") {
    NetworkConfig cfg;
    const auto pop = single_ue(1e4, 1000, 1.0);
    CHECK(expected_compute_per_iteration(pop, cfg, kLaw) ==
          doctest::Approx(1e7 * downlink_success_probability(cfg, kLaw)).epsilon(1e-12));
    CHECK(expected_compute_per_iteration(pop, cfg, kLaw) == doctest::Approx(1e7).epsilon(1e-5));
    cfg.beta_down_db = 300.0;
    CHECK(expected_compute_per_iteration(pop, cfg, kLaw) == 0.0);
}

TEST_CASE("total compute") {
    CHECK(total_compute(162, 41, 1e7) == doctest::Approx(6.642e10));
    CHECK(total_compute(0, 41, 1e7) == 0.0);
    CHECK(total_compute(4, 6, 2.0) == 2.0 * total_compute(2, 6, 2.0));
    CHECK(total_compute(4, 6, 2.0) == 3.0 * total_compute(4, 2, 2.0));
    CHECK_THROWS_AS(total_compute(-1, 2, 1.0), DomainError);
}
