#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "gmwb/joint_law.hpp"
#include "gmwb/monte_carlo.hpp"
#include "test_helpers.hpp"

using namespace gmwb;
using Catch::Approx;

TEST_CASE("simulated first-year moments match the transition law", "[mc]") {
    const auto m = test::market_2021();
    const JointLaw law(m.curve, m.hw, m.equity.rho, 1.0);
    SimulationConfig config{100000, 42, false, 0};
    const auto paths = simulate_paths(m, 1, config);
    std::vector<double> r1(static_cast<size_t>(paths.n_paths));
    std::vector<double> ir(static_cast<size_t>(paths.n_paths));
    for (std::int64_t p = 0; p < paths.n_paths; ++p) {
        r1[static_cast<size_t>(p)] = paths.r_end[paths.at(p, 1)];
        ir[static_cast<size_t>(p)] = paths.int_r[paths.at(p, 1)];
    }
    const auto r_stats = test::sample_stats(r1);
    const auto i_stats = test::sample_stats(ir);
    CHECK(std::abs(r_stats.mean - law.mu2(1, m.hw.r0)) < 3.0 * r_stats.se_mean);
    CHECK(std::abs(i_stats.mean - law.mu1(1, m.hw.r0)) < 3.0 * i_stats.se_mean);
    CHECK(r_stats.var == Approx(law.sigma22()).epsilon(0.03));
    CHECK(i_stats.var == Approx(law.sigma11()).epsilon(0.03));
}

TEST_CASE("vanishing rate volatility gives the deterministic integral", "[mc]") {
    auto m = test::market_2021();
    m.hw.sigma_r = 1e-8;
    const JointLaw law(m.curve, m.hw, m.equity.rho, 1.0);
    const auto paths = simulate_paths(m, 1, SimulationConfig{100, 1, false, 1});
    for (std::int64_t p = 0; p < paths.n_paths; ++p)
        CHECK(paths.int_r[paths.at(p, 1)] == Approx(law.mu1(1, m.hw.r0)).margin(1e-6));
}

TEST_CASE("pathwise discounting reproduces model bond prices", "[mc][oracle]") {
    const auto m = test::market_2021();
    SimulationConfig config{200000, 11, false, 0};
    for (int horizon : {5, 10}) {
        const auto paths = simulate_paths(m, horizon, config);
        std::vector<double> discounts(static_cast<size_t>(paths.n_paths));
        for (std::int64_t p = 0; p < paths.n_paths; ++p) {
            double acc = 0.0;
            for (int n = 1; n <= horizon; ++n) acc += paths.int_r[paths.at(p, n)];
            discounts[static_cast<size_t>(p)] = std::exp(-acc);
        }
        const auto stats = test::sample_stats(discounts);
        // The model reprices its own bond (r0 enters through the initial condition);
        // with r0 = f(0,0) this also equals the market discount.
        const double model_bond = bond_price(m.curve, m.hw, 0.0, horizon, m.hw.r0);
        CHECK(std::abs(stats.mean - model_bond) < 3.5 * stats.se_mean);
    }

    auto consistent = m;
    consistent.hw.r0 = forward_rate(m.curve, 0.0);
    const auto paths = simulate_paths(consistent, 5, config);
    std::vector<double> discounts(static_cast<size_t>(paths.n_paths));
    for (std::int64_t p = 0; p < paths.n_paths; ++p) {
        double acc = 0.0;
        for (int n = 1; n <= 5; ++n) acc += paths.int_r[paths.at(p, n)];
        discounts[static_cast<size_t>(p)] = std::exp(-acc);
    }
    const auto stats = test::sample_stats(discounts);
    CHECK(std::abs(stats.mean - market_discount(m.curve, 5.0)) < 3.5 * stats.se_mean);
}

TEST_CASE("static price collapses to a deterministic cashflow sum", "[mc]") {
    MarketModel m;
    m.curve = SvenssonCurve::flat(0.02);
    m.hw = HullWhiteParams{0.10, 1e-8, 0.02};
    m.equity = EquityParams{0.0, 0.01, 0.0, 100.0};
    auto spec = ContractSpec::with_constant_penalty(100.0, 5, 20.0, 0.015, 0.10);
    spec.scheme = Scheme::static_only;

    const auto estimate = price_static(m, spec, MortalityTable::no_mortality(), 65,
                                       SimulationConfig{1000, 3, false, 1});

    // Deterministic world: A grows at r - q - fee, withdrawals of G each year.
    double a = 100.0, value = 0.0;
    const double growth = std::exp(0.02 - 0.01 - 0.015);
    for (int n = 1; n <= 5; ++n) {
        a *= growth;
        const double df = std::exp(-0.02 * n);
        if (n < 5) {
            value += df * 20.0;
            a = std::max(a - 20.0, 0.0);
        } else {
            value += df * std::max(a, 20.0);
        }
    }
    CHECK(estimate.mean == Approx(value).margin(1e-6));
    CHECK(estimate.half_width_95 < 1e-6);
}

TEST_CASE("estimates are reproducible and thread-count independent", "[mc]") {
    const auto m = test::market_2021();
    auto spec = ContractSpec::with_constant_penalty(100.0, 10, 10.0, 0.1351, 0.15);
    spec.scheme = Scheme::static_only;
    const auto mortality = test::ssa_table();

    const auto a = price_static(m, spec, mortality, 65, SimulationConfig{20000, 5, false, 1});
    const auto b = price_static(m, spec, mortality, 65, SimulationConfig{20000, 5, false, 2});
    const auto c = price_static(m, spec, mortality, 65, SimulationConfig{20000, 5, false, 0});
    CHECK(a.mean == b.mean);
    CHECK(a.mean == c.mean);
    CHECK(a.half_width_95 == b.half_width_95);

    const auto d = price_static(m, spec, mortality, 65, SimulationConfig{20000, 6, false, 1});
    CHECK(a.mean != d.mean);  // different seed, different stream
}

TEST_CASE("antithetic variates reduce the variance", "[mc]") {
    const auto m = test::market_2021();
    auto spec = ContractSpec::with_constant_penalty(100.0, 10, 10.0, 0.1351, 0.15);
    spec.scheme = Scheme::static_only;
    const auto mortality = test::ssa_table();

    const auto plain = price_static(m, spec, mortality, 65, SimulationConfig{40000, 9, false, 0});
    const auto anti = price_static(m, spec, mortality, 65, SimulationConfig{40000, 9, true, 0});
    CHECK(anti.half_width_95 < plain.half_width_95);
    CHECK(anti.mean == Approx(plain.mean).margin(4.0 * plain.half_width_95));
}

TEST_CASE("lsm equals the static price when stopping cannot matter", "[mc]") {
    // With zero carry the discounted account is a martingale and every stopping rule
    // yields the premium; the regression noise must not move the estimate.
    MarketModel m = test::market_2021();
    m.equity.q = 0.0;
    auto spec = ContractSpec::with_constant_penalty(100.0, 5, 0.0, 0.0, 1.0);
    spec.guarantee = 0.0;
    spec.scheme = Scheme::static_with_surrender;
    const auto mortality = MortalityTable::no_mortality();
    const SimulationConfig config{30000, 21, false, 0};

    const auto lsm = price_lsm(m, spec, mortality, 65, config);
    auto static_spec = spec;
    static_spec.scheme = Scheme::static_only;
    const auto fixed = price_static(m, static_spec, mortality, 65, config);
    CHECK(lsm.mean == Approx(fixed.mean)
                          .margin(2.0 * (lsm.half_width_95 + fixed.half_width_95)));
    CHECK(lsm.mean == Approx(100.0).margin(3.0 * lsm.half_width_95));
}

TEST_CASE("the stopping option cannot materially lower the value", "[mc]") {
    const auto m = test::market_2021();
    auto spec = ContractSpec::with_constant_penalty(100.0, 10, 10.0, 0.1351, 0.15);
    spec.scheme = Scheme::static_with_surrender;
    const auto mortality = test::ssa_table();
    const SimulationConfig config{30000, 33, false, 0};

    const auto lsm = price_lsm(m, spec, mortality, 65, config);
    auto static_spec = spec;
    static_spec.scheme = Scheme::static_only;
    const auto fixed = price_static(m, static_spec, mortality, 65, config);
    CHECK(lsm.mean >= fixed.mean - 2.0 * fixed.half_width_95);
}
