#include <doctest.h>

#include <cmath>

#include "flwin/errors.hpp"
#include "flwin/network.hpp"

using namespace flwin;

TEST_CASE("power-law gain at reference distances") {
    const auto model = PathLossModel::power_law(34.0, 40.0);
    NetworkConfig cfg;
    CHECK(gain(model, cfg, 1.0) == doctest::Approx(std::pow(10.0, -3.4)).epsilon(1e-12));
    CHECK(gain(model, cfg, 1.0) == doctest::Approx(3.981e-4).epsilon(1e-3));
    CHECK(gain(model, cfg, 10.0) == doctest::Approx(3.981e-8).epsilon(1e-3));
}

TEST_CASE("gain rejects distances outside [d_min, r0]") {
    const auto model = PathLossModel::power_law(34.0, 40.0);
    NetworkConfig cfg;
    CHECK_THROWS_AS(gain(model, cfg, 0.5), DomainError);
    CHECK_THROWS_AS(gain(model, cfg, 1000.1), DomainError);
    CHECK_NOTHROW(gain(model, cfg, 1000.0));
}

TEST_CASE("constant table is flat") {
    const auto model = PathLossModel::constant(2.5e-6);
    NetworkConfig cfg;
    for (double d : {1.0, 3.7, 100.0, 999.0}) CHECK(gain(model, cfg, d) == 2.5e-6);
}

TEST_CASE("gain is strictly decreasing for the power law") {
    const auto model = PathLossModel::power_law(34.0, 40.0);
    NetworkConfig cfg;
    double prev = gain(model, cfg, 1.0);
    for (double d = 1.5; d <= 1000.0; d *= 1.5) {
        const double g = gain(model, cfg, d);
        CHECK(g < prev);
        prev = g;
    }
}

TEST_CASE("log-log table reproduces the power law") {
    TabulatedGain t;
    for (double d : {1.0, 10.0, 100.0, 1000.0}) t.points.emplace_back(d, std::pow(10.0, -(34.0 + 40.0 * std::log10(d)) / 10.0));
    t.rule = Interpolation::LogLog;
    const PathLossModel table(t);
    const auto law = PathLossModel::power_law(34.0, 40.0);
    for (double d : {2.0, 37.0, 512.0}) CHECK(table.evaluate(d) == doctest::Approx(law.evaluate(d)).epsilon(1e-10));
}

TEST_CASE("linear table interpolates and clamps") {
    const PathLossModel table(TabulatedGain{{{10.0, 4.0}, {20.0, 2.0}}, Interpolation::Linear});
    CHECK(table.evaluate(15.0) == doctest::Approx(3.0));
    CHECK(table.evaluate(5.0) == 4.0);
    CHECK(table.evaluate(50.0) == 2.0);
}

TEST_CASE("invalid tables are rejected") {
    CHECK_THROWS_AS(PathLossModel(TabulatedGain{{}, Interpolation::Linear}), PreconditionError);
    CHECK_THROWS_AS(PathLossModel(TabulatedGain{{{1.0, 1.0}, {2.0, 3.0}}, Interpolation::Linear}), PreconditionError);
    CHECK_THROWS_AS(PathLossModel(TabulatedGain{{{1.0, -1.0}}, Interpolation::Linear}), PreconditionError);
    CHECK_THROWS_AS(PathLossModel(TabulatedGain{{{1.0, 1.0}, {1.0, 0.5}}, Interpolation::Linear}), PreconditionError);
}

TEST_CASE("downlink SNR") {
    NetworkConfig cfg;
    const auto model = PathLossModel::power_law(34.0, 40.0);
    SUBCASE("reference values at the cell edge") {
        // 19952.6 mW * 3.981e-16 / 5.012e-18
        const double expected = 19952.6 * 3.981e-16 / 5.012e-18;
        CHECK(snr_down(cfg, model, 1000.0) == doctest::Approx(expected).epsilon(1e-3));
        CHECK(snr_down(cfg, model, 1000.0) == doctest::Approx(1.585e6).epsilon(1e-3));
    }
    SUBCASE("zero transmit power") {
        cfg.p_down_dbm = -INFINITY;
        CHECK(snr_down(cfg, model, 10.0) == 0.0);
    }
    SUBCASE("unit powers and constant gain") {
        cfg.p_down_dbm = 0.0;
        cfg.noise_dbm = 0.0;
        CHECK(snr_down(cfg, PathLossModel::constant(0.37), 50.0) == doctest::Approx(0.37));
    }
}

TEST_CASE("dB conversions round-trip") {
    for (double v : {-173.0, -15.0, 0.0, 3.0, 20.0, 43.0}) {
        CHECK(mw_to_dbm(dbm_to_mw(v)) == doctest::Approx(v).epsilon(1e-12));
        CHECK(linear_to_db(db_to_linear(v)) == doctest::Approx(v).epsilon(1e-12));
    }
    CHECK(dbm_to_mw(20.0) == doctest::Approx(100.0));
    CHECK(db_to_linear(-15.0) == doctest::Approx(0.0316227766));
}

TEST_CASE("config invariants") {
    NetworkConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    auto bad = cfg;
    bad.d_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = cfg;
    bad.d0 = 2000.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = cfg;
    bad.lambda_i = 0.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = cfg;
    bad.lambda_a = -1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("hyper-parameter invariants") {
    FlHyperParams h;
    CHECK_NOTHROW(h.validate());
    auto bad = h;
    bad.gd_step_xi = 20.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = h;
    bad.zeta = 1.0;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
    bad = h;
    bad.strong_convexity_gamma = 0.2;
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}
