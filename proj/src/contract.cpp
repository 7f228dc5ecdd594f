#include "gmwb/contract.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gmwb {

ContractSpec ContractSpec::with_constant_penalty(double premium, int maturity, double guarantee,
                                                 double fee, double beta) {
    ContractSpec spec;
    spec.premium = premium;
    spec.maturity = maturity;
    spec.guarantee = guarantee;
    spec.fee = fee;
    spec.penalty.assign(static_cast<size_t>(maturity), beta);
    return spec;
}

double ContractSpec::penalty_at(int n) const {
    if (n < 1 || n > maturity)
        throw std::out_of_range("ContractSpec: penalty date outside 1..N");
    return penalty[static_cast<size_t>(n - 1)];
}

void ContractSpec::validate() const {
    if (!(premium > 0.0)) throw std::invalid_argument("contract: premium must be positive");
    if (maturity < 1) throw std::invalid_argument("contract: maturity must be at least 1 year");
    if (!(guarantee > 0.0) || guarantee > premium)
        throw std::invalid_argument("contract: guarantee must satisfy 0 < G <= premium");
    if (static_cast<int>(penalty.size()) != maturity)
        throw std::invalid_argument("contract: penalty schedule must have one entry per date");
    for (double beta : penalty)
        if (beta < 0.0 || beta > 1.0)
            throw std::invalid_argument("contract: penalties must lie in [0,1]");
    if (bonus < 0.0) throw std::invalid_argument("contract: bonus must be nonnegative");
    if (fee < 0.0) throw std::invalid_argument("contract: fee must be nonnegative");
    if (scheme == Scheme::static_with_surrender && !surrender_allowed)
        throw std::invalid_argument("contract: S+S scheme requires surrender_allowed");
}

double withdrawal_cashflow(const ContractSpec& spec, int n, double w) {
    if (w < 0.0) throw std::invalid_argument("withdrawal_cashflow: w must be >= 0");
    if (w <= spec.guarantee) return w;
    return w - spec.penalty_at(n) * (w - spec.guarantee);
}

double surrender_cashflow(const ContractSpec& spec, int n, const AccountState& s) {
    const double excess = std::max(s.b - spec.guarantee, 0.0);
    return std::max(s.a, s.b - spec.penalty_at(n) * excess);
}

double death_benefit(const ContractSpec& spec, int n, const AccountState& s) {
    return std::max(s.a, (1.0 - spec.penalty_at(n)) * s.b);
}

double terminal_cashflow(const ContractSpec& spec, const AccountState& s) {
    const double beta = spec.penalty_at(spec.maturity);
    return std::max(s.a, (1.0 - beta) * s.b + beta * std::min(spec.guarantee, s.b));
}

double max_withdrawal(const ContractSpec& spec, const AccountState& s) {
    return spec.step_up == StepUp::step_up_then_withdraw ? std::max(s.a, s.b) : s.b;
}

AccountState apply_event(const ContractSpec& spec, int n, const AccountState& s, double w) {
    (void)n;
    if (w < -1e-12 || w > max_withdrawal(spec, s) + 1e-9)
        throw std::invalid_argument("apply_event: withdrawal outside the admissible set");
    const double credit = (w == 0.0) ? spec.bonus : 0.0;
    const double a_plus = std::max(s.a - w, 0.0);
    double b_plus = 0.0;
    switch (spec.step_up) {
        case StepUp::none:
            b_plus = s.b + credit - w;
            break;
        case StepUp::withdraw_then_step_up:
            b_plus = std::max(a_plus, s.b + credit - w);
            break;
        case StepUp::step_up_then_withdraw:
            b_plus = std::max(s.a, s.b) + credit - w;
            break;
    }
    return AccountState{a_plus, std::max(b_plus, 0.0)};
}

}  // namespace gmwb
