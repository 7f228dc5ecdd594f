#include <catch2/catch_amalgamated.hpp>

#include "gmwb/yield_curve.hpp"
#include "test_helpers.hpp"

using namespace gmwb;
using Catch::Approx;

TEST_CASE("forward rate limits of the 2021 curve", "[curve]") {
    const SvenssonCurve c = test::market_2021().curve;
    // All exponentials die off at the long end, only beta0 survives.
    CHECK(forward_rate(c, 5000.0) == Approx(0.3202 / 100).margin(1e-12));
    // At T = 0 the slope terms vanish and f = beta0 + beta1.
    CHECK(forward_rate(c, 0.0) == Approx((0.3202 - 1.0501) / 100).margin(1e-12));
    // Negative at the short end, then rising (Svensson hump shape of the fit).
    CHECK(forward_rate(c, 0.5) < 0.0);
    CHECK(forward_rate(c, 10.0) > forward_rate(c, 2.0));
}

TEST_CASE("yield equals quadrature of the forward curve", "[curve][oracle]") {
    const SvenssonCurve c = test::market_2021().curve;
    for (double maturity : {1.0, 5.0, 10.0}) {
        const double quad =
            test::integrate([&](double t) { return forward_rate(c, t); }, 0.0, maturity) /
            maturity;
        CHECK(yield(c, maturity) == Approx(quad).margin(1e-10));
    }
}

TEST_CASE("flat curve degenerates to a constant", "[curve]") {
    const SvenssonCurve c = SvenssonCurve::flat(0.02);
    CHECK(yield(c, 3.0) == Approx(0.02).margin(1e-15));
    CHECK(forward_rate(c, 7.0) == Approx(0.02).margin(1e-15));
    CHECK(market_discount(c, 10.0) == Approx(std::exp(-0.2)).margin(1e-12));
}

TEST_CASE("yield tends to the short forward as T -> 0+", "[curve]") {
    const SvenssonCurve c = test::market_2021().curve;
    CHECK(yield(c, 1e-8) == Approx(-0.7299 / 100).margin(1e-9));
    CHECK_THROWS_AS(yield(c, 0.0), std::domain_error);
}

TEST_CASE("market discount basics", "[curve]") {
    const SvenssonCurve c = test::market_2021().curve;
    CHECK(market_discount(c, 0.0) == 1.0);
    for (double t : {0.5, 1.0, 10.0, 30.0}) CHECK(market_discount(c, t) > 0.0);
    // Negative mid-curve yields push the discount factor above one.
    CHECK(yield(c, 10.0) < 0.0);
    CHECK(market_discount(c, 10.0) > 1.0);
}

TEST_CASE("theta matches a finite-difference build", "[curve][oracle]") {
    const auto m = test::market_2021();
    const double h = 1e-6;
    for (double t : {0.5, 1.0, 5.0, 9.0}) {
        const double fd_slope =
            (forward_rate(m.curve, t + h) - forward_rate(m.curve, t - h)) / (2.0 * h);
        const double fd_theta = fd_slope + m.hw.a * forward_rate(m.curve, t) +
                                m.hw.sigma_r * m.hw.sigma_r / (2.0 * m.hw.a) *
                                    (1.0 - std::exp(-2.0 * m.hw.a * t));
        CHECK(theta(m.curve, m.hw, t) == Approx(fd_theta).margin(1e-6));
    }
}

TEST_CASE("theta of a flat curve with zero rate vol is a*c", "[curve]") {
    const SvenssonCurve c = SvenssonCurve::flat(0.03);
    const HullWhiteParams hw{0.25, 0.0, 0.03};
    for (double t : {0.0, 1.0, 10.0}) CHECK(theta(c, hw, t) == Approx(0.25 * 0.03).margin(1e-15));
}

TEST_CASE("theta reproduces the long-run-mean shape over [0,10]", "[curve]") {
    // The fitted drift tracks the forward curve: negative short end, positive later,
    // staying within mean-reversion-scaled distance of a*f.
    const auto m = test::market_2021();
    CHECK(theta(m.curve, m.hw, 0.1) < 0.0);
    CHECK(theta(m.curve, m.hw, 9.0) > theta(m.curve, m.hw, 0.1));
}

TEST_CASE("bond price identities", "[curve]") {
    const auto m = test::market_2021();
    CHECK(bond_price(m.curve, m.hw, 4.0, 4.0, 0.01) == 1.0);
    CHECK_THROWS_AS(bond_price(m.curve, m.hw, 5.0, 4.0, 0.0), std::domain_error);

    // Deterministic rates on a flat curve discount exponentially.
    const SvenssonCurve flat = SvenssonCurve::flat(0.02);
    const HullWhiteParams hw{0.10, 0.0, 0.02};
    CHECK(bond_price(flat, hw, 1.0, 6.0, 0.02) == Approx(std::exp(-0.1)).margin(1e-12));
}

TEST_CASE("model reprices the input curve at t=0", "[curve]") {
    // The time-zero identity holds when the initial short rate sits on the curve.
    for (const auto& m : {test::market_2021(), test::market_2022()}) {
        const double r0 = forward_rate(m.curve, 0.0);
        for (int k = 1; k <= 60; ++k) {
            const double maturity = 0.5 * k;
            CHECK(bond_price(m.curve, m.hw, 0.0, maturity, r0) ==
                  Approx(market_discount(m.curve, maturity)).margin(1e-10));
        }
    }
}

TEST_CASE("B factor is increasing in maturity with limit 1/a", "[curve]") {
    const HullWhiteParams hw{0.10, 0.02, 0.0};
    double prev = 0.0;
    for (double maturity : {1.0, 2.0, 5.0, 10.0, 50.0, 200.0}) {
        const double b = bond_b(hw, 0.0, maturity);
        CHECK(b > prev);
        prev = b;
    }
    CHECK(bond_b(hw, 0.0, 1e6) == Approx(1.0 / hw.a).margin(1e-9));
}

TEST_CASE("curve validation", "[curve]") {
    SvenssonCurve c = test::market_2021().curve;
    c.tau1 = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    HullWhiteParams hw{0.0, 0.02, 0.0};
    CHECK_THROWS_AS(hw.validate(), std::invalid_argument);
}
