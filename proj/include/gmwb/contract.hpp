#pragma once

#include <vector>

namespace gmwb {

// Ordering of the step-up (ratchet) event relative to the withdrawal/bonus event.
enum class StepUp { none, withdraw_then_step_up, step_up_then_withdraw };

// Withdrawal behaviour priced by the engine: fixed guaranteed withdrawals,
// fixed withdrawals plus optimal surrender, or fully dynamic withdrawals.
enum class Scheme { static_only, static_with_surrender, dynamic };

struct AccountState {
    double a = 0.0;  // investment account, tracks the fund net of fees
    double b = 0.0;  // benefit account, debited by withdrawals
};

struct ContractSpec {
    double premium = 100.0;
    int maturity = 10;                // N, yearly anniversary dates 1..N
    double guarantee = 10.0;          // G, penalty-free withdrawal amount
    double fee = 0.0;                 // alpha, annualized management fee (decimal)
    std::vector<double> penalty;      // beta_n for n = 1..N (decimal in [0,1])
    double bonus = 0.0;               // b, credited when no withdrawal is made
    StepUp step_up = StepUp::none;
    bool surrender_allowed = true;
    Scheme scheme = Scheme::dynamic;

    static ContractSpec with_constant_penalty(double premium, int maturity, double guarantee,
                                              double fee, double beta);

    double penalty_at(int n) const;  // n in 1..N
    void validate() const;
};

/// Net cashflow of withdrawing w at date n: w, less beta_n on the part exceeding G.
double withdrawal_cashflow(const ContractSpec& spec, int n, double w);

/// Full-surrender cashflow at date n: max{A, B - beta_n (B - G)^+}.
double surrender_cashflow(const ContractSpec& spec, int n, const AccountState& state);

/// Death benefit paid at date n: max{A, (1 - beta_n) B}.
double death_benefit(const ContractSpec& spec, int n, const AccountState& state);

/// Combined last-withdrawal-plus-payoff cashflow at maturity,
/// max{A, (1 - beta_N) B + beta_N min{G, B}}; identical under both step-up orderings.
double terminal_cashflow(const ContractSpec& spec, const AccountState& state);

/// Largest admissible withdrawal at a date: B for none/W-SU orderings, max{A, B} for SU-W.
double max_withdrawal(const ContractSpec& spec, const AccountState& state);

/// Post-event accounts (A_{n+}, B_{n+}) after withdrawing w at date n, applying the
/// configured step-up ordering and the bonus credit for w == 0.
AccountState apply_event(const ContractSpec& spec, int n, const AccountState& state, double w);

}  // namespace gmwb
