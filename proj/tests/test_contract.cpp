#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "gmwb/contract.hpp"
#include "test_helpers.hpp"

using namespace gmwb;
using Catch::Approx;

namespace {

ContractSpec base_spec(double beta = 0.15) {
    auto spec = ContractSpec::with_constant_penalty(100.0, 10, 10.0, 0.0, beta);
    return spec;
}

// Last-date cashflow maximized by brute force over the withdrawal, keeping the
// pre-collapse event algebra of each ordering.
double brute_force_terminal(const ContractSpec& spec, double a, double b, bool su_first) {
    const double beta = spec.penalty_at(spec.maturity);
    const double g = spec.guarantee;
    const double w_cap = su_first ? std::max(a, b) : b;
    double best = -1.0;
    for (double w = 0.0; w <= w_cap + 1e-9; w += 0.01) {
        const double cash = w - beta * std::max(w - g, 0.0);
        double payoff = 0.0;
        if (su_first) {
            payoff = std::max(std::max(a - w, 0.0), (1.0 - beta) * (std::max(a, b) - w));
        } else {
            const double residual = std::max(a - w, 0.0);
            payoff = std::max(residual, (1.0 - beta) * std::max(residual, b - w));
        }
        best = std::max(best, cash + payoff);
    }
    return best;
}

}  // namespace

TEST_CASE("withdrawal cashflow penalty", "[contract]") {
    const auto spec = base_spec(0.15);
    CHECK(withdrawal_cashflow(spec, 3, 10.0) == 10.0);
    CHECK(withdrawal_cashflow(spec, 3, 30.0) == Approx(30.0 - 0.15 * 20.0));
    CHECK(withdrawal_cashflow(spec, 3, 4.0) == 4.0);

    const auto full = base_spec(1.0);
    CHECK(withdrawal_cashflow(full, 1, 25.0) == Approx(10.0));  // excess fully confiscated
}

TEST_CASE("surrender cashflow", "[contract]") {
    const auto spec = base_spec(0.15);
    CHECK(surrender_cashflow(spec, 2, {120.0, 80.0}) == 120.0);
    CHECK(surrender_cashflow(spec, 2, {50.0, 80.0}) == Approx(80.0 - 0.15 * 70.0));
    // Below the guarantee the positive part vanishes.
    CHECK(surrender_cashflow(spec, 2, {3.0, 8.0}) == 8.0);
}

TEST_CASE("death benefit", "[contract]") {
    const auto spec0 = base_spec(0.0);
    CHECK(death_benefit(spec0, 1, {50.0, 80.0}) == 80.0);
    const auto spec = base_spec(0.15);
    CHECK(death_benefit(spec, 1, {0.0, 100.0}) == Approx(85.0));
    CHECK(death_benefit(spec, 1, {70.0, 70.0}) == 70.0);  // penalty breaks the tie toward A
}

TEST_CASE("terminal cashflow", "[contract]") {
    const auto spec = base_spec(0.15);
    CHECK(terminal_cashflow(spec, {50.0, 8.0}) == 50.0);  // B <= G: max of the accounts
    CHECK(terminal_cashflow(spec, {5.0, 8.0}) == 8.0);
    CHECK(terminal_cashflow(spec, {50.0, 80.0}) == Approx(0.85 * 80.0 + 0.15 * 10.0));
}

TEST_CASE("terminal cashflow equals brute-force optimum of both orderings",
          "[contract][oracle]") {
    auto spec = base_spec(0.15);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> amount(0.0, 200.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = std::round(amount(rng) * 100.0) / 100.0;
        const double b = std::round(amount(rng) * 100.0) / 100.0;
        const double closed = terminal_cashflow(spec, {a, b});
        CHECK(closed == Approx(brute_force_terminal(spec, a, b, true)).margin(2e-3));
        CHECK(closed == Approx(brute_force_terminal(spec, a, b, false)).margin(2e-3));
    }
}

TEST_CASE("apply_event orderings", "[contract]") {
    auto spec = base_spec();
    SECTION("no step-up is a plain debit") {
        const auto post = apply_event(spec, 1, {120.0, 80.0}, 0.0);
        CHECK(post.a == 120.0);
        CHECK(post.b == 80.0);
        const auto post2 = apply_event(spec, 1, {120.0, 80.0}, 30.0);
        CHECK(post2.a == 90.0);
        CHECK(post2.b == 50.0);
    }
    SECTION("withdraw-then-step-up ratchets after the debit") {
        spec.step_up = StepUp::withdraw_then_step_up;
        const auto post = apply_event(spec, 1, {120.0, 80.0}, 0.0);
        CHECK(post.b == 120.0);
        // Full withdrawal of B does not surrender: the step-up revives the benefit.
        const auto drained = apply_event(spec, 1, {120.0, 80.0}, 80.0);
        CHECK(drained.a == 40.0);
        CHECK(drained.b == 40.0);
        CHECK(drained.b > 0.0);
    }
    SECTION("step-up-then-withdraw allows draining both accounts") {
        spec.step_up = StepUp::step_up_then_withdraw;
        const auto post = apply_event(spec, 1, {120.0, 80.0}, 120.0);
        CHECK(post.a == 0.0);
        CHECK(post.b == 0.0);
    }
    SECTION("bonus credits only an exact zero withdrawal") {
        spec.bonus = 2.5;
        const auto credited = apply_event(spec, 1, {50.0, 40.0}, 0.0);
        CHECK(credited.b == 42.5);
        const auto debited = apply_event(spec, 1, {50.0, 40.0}, 0.5);
        CHECK(debited.b == 39.5);
    }
    SECTION("withdrawals outside the admissible set are rejected") {
        CHECK_THROWS_AS(apply_event(spec, 1, {120.0, 80.0}, 90.0), std::invalid_argument);
        CHECK_THROWS_AS(apply_event(spec, 1, {120.0, 80.0}, -1.0), std::invalid_argument);
    }
}

TEST_CASE("cashflow monotonicity properties", "[contract]") {
    const auto spec = base_spec(0.35);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> amount(0.0, 250.0);
    double prev_cash = 0.0;
    for (double w = 0.0; w <= 60.0; w += 0.5) {
        const double cash = withdrawal_cashflow(spec, 4, w);
        CHECK(cash >= prev_cash);
        prev_cash = cash;
    }
    for (int trial = 0; trial < 50; ++trial) {
        const double a = amount(rng), b = amount(rng), bump = amount(rng) * 0.1;
        CHECK(terminal_cashflow(spec, {a + bump, b}) >= terminal_cashflow(spec, {a, b}));
        CHECK(terminal_cashflow(spec, {a, b + bump}) >= terminal_cashflow(spec, {a, b}));
        CHECK(surrender_cashflow(spec, 2, {a + bump, b}) >= surrender_cashflow(spec, 2, {a, b}));
        CHECK(death_benefit(spec, 2, {a, b + bump}) >= death_benefit(spec, 2, {a, b}));
    }
}

TEST_CASE("spec validation", "[contract]") {
    auto spec = base_spec();
    spec.scheme = Scheme::static_with_surrender;
    spec.surrender_allowed = false;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

    auto bad_g = base_spec();
    bad_g.guarantee = 150.0;
    CHECK_THROWS_AS(bad_g.validate(), std::invalid_argument);
}
