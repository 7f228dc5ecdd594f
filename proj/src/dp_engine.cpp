#include "gmwb/dp_engine.hpp"

#include <cmath>
#include <stdexcept>

#include "gmwb/parallel.hpp"

namespace gmwb {

namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct SchemeRules {
    bool optimize = false;          // search over the withdrawal lattice
    bool compare_surrender = false; // take max against the surrender cashflow
};

// Surrender enters the recursion explicitly for the S+S stopping scheme and, for
// dynamic withdrawals, only under the withdraw-then-step-up ordering; under
// step-up-then-withdraw a full withdrawal already terminates the contract.
SchemeRules scheme_rules(const ContractSpec& spec) {
    SchemeRules rules;
    switch (spec.scheme) {
        case Scheme::static_only:
            break;
        case Scheme::static_with_surrender:
            rules.compare_surrender = true;
            break;
        case Scheme::dynamic:
            rules.optimize = true;
            rules.compare_surrender = spec.surrender_allowed &&
                                      spec.step_up == StepUp::withdraw_then_step_up;
            break;
    }
    return rules;
}

// Exact integer coordinate of a value that must lie on the delta_b lattice.
int exact_units(double value, double step, const char* what) {
    const long idx = std::lround(value / step);
    if (std::abs(value - idx * step) > 1e-6 * std::max(1.0, std::abs(value)))
        throw std::logic_error(std::string("dp_engine: off-lattice ") + what);
    return static_cast<int>(idx);
}

// Post-event benefit row in delta_b units, clamped to the top of the grid
// (only the bonus credit can push it past b_max).
int event_row(const ContractSpec& spec, int i_units, int j, int l_w, int bonus_units, int n_b) {
    const int credit = (l_w == 0) ? bonus_units : 0;
    int row = 0;
    switch (spec.step_up) {
        case StepUp::none:
            row = j + credit - l_w;
            break;
        case StepUp::withdraw_then_step_up:
            row = std::max(i_units - l_w, j + credit - l_w);
            break;
        case StepUp::step_up_then_withdraw:
            row = std::max(i_units, j) + credit - l_w;
            break;
    }
    return std::min(std::max(row, 0), n_b);
}

int max_withdrawal_units(const ContractSpec& spec, int i_units, int j) {
    return spec.step_up == StepUp::step_up_then_withdraw ? std::max(i_units, j) : j;
}

}  // namespace

GmwbPricer::GmwbPricer(const MarketModel& market, const AccountGrid& grid,
                       const MortalityTable& mortality, int start_age, int maturity,
                       const DpOptions& opts)
    : market_(market), grid_(grid), maturity_(maturity), opts_(opts) {
    market_.validate();
    grid_.validate();
    if (maturity_ < 1) throw std::invalid_argument("pricer: maturity must be >= 1");
    if (opts_.steps_per_year < 1)
        throw std::invalid_argument("pricer: steps_per_year must be >= 1");
    if (!mortality.covers(start_age, maturity_))
        throw std::invalid_argument("pricer: mortality table does not cover the cohort ages");

    lattice_ = std::make_shared<RateLattice>(market_.curve, market_.hw, maturity_,
                                             opts_.steps_per_year);
    law_ = std::make_shared<JointLaw>(market_.curve, market_.hw, market_.equity.rho, 1.0);
    survival_.resize(static_cast<size_t>(maturity_));
    for (int n = 1; n <= maturity_; ++n)
        survival_[static_cast<size_t>(n - 1)] = mortality.survival(start_age, n);
}

void GmwbPricer::validate_contract(const ContractSpec& spec) const {
    spec.validate();
    if (spec.maturity != maturity_)
        throw std::invalid_argument("contract: maturity differs from the pricer horizon");
    if (!on_lattice(spec.guarantee, grid_.delta_b))
        throw std::invalid_argument("contract: guarantee must be a multiple of delta_b");
    if (!on_lattice(spec.premium, grid_.delta_b))
        throw std::invalid_argument("contract: premium must be a multiple of delta_b");
    if (spec.premium > grid_.b_max() + 1e-9 || spec.premium > grid_.a_max() + 1e-9)
        throw std::invalid_argument("contract: premium must lie inside both account grids");
    const bool b_growing = spec.step_up != StepUp::none || spec.bonus > 0.0;
    if (b_growing && std::abs(grid_.delta_a - grid_.delta_b) > 1e-12)
        throw std::invalid_argument(
            "grid: step-up or bonus requires delta_a == delta_b so post-event states stay on "
            "grid");
    if (spec.step_up != StepUp::none && std::abs(grid_.a_max() - grid_.b_max()) > 1e-9)
        throw std::invalid_argument("grid: step-up requires a_max == b_max");
    if (spec.bonus > 0.0 && !on_lattice(spec.bonus, grid_.delta_b))
        throw std::invalid_argument("contract: bonus must be a multiple of delta_b");
}

Eigen::MatrixXd GmwbPricer::terminal_values(const ContractSpec& spec) const {
    Eigen::MatrixXd v(grid_.n_a + 1, grid_.n_b + 1);
    for (int i = 0; i <= grid_.n_a; ++i)
        for (int j = 0; j <= grid_.n_b; ++j)
            v(i, j) = terminal_cashflow(spec, AccountState{grid_.a(i), grid_.b(j)});
    return v;
}

Eigen::MatrixXd GmwbPricer::death_payoffs(const ContractSpec& spec, int n) const {
    const double beta = spec.penalty_at(n);
    Eigen::MatrixXd d(grid_.n_a + 1, grid_.n_b + 1);
    for (int i = 0; i <= grid_.n_a; ++i)
        for (int j = 0; j <= grid_.n_b; ++j)
            d(i, j) = std::max(grid_.a(i), (1.0 - beta) * grid_.b(j));
    return d;
}

// Discounted, survival-weighted one-step expectation aggregated over the 2^m rate paths,
// tabulated over every post-withdrawal account value u (rows, delta_b units) and every
// post-event benefit row l (columns). The cell optimization then reduces to lookups.
Eigen::MatrixXd GmwbPricer::expectation_table(const ContractSpec& spec, int n, int start_level,
                                              const std::vector<Eigen::MatrixXd>& v_next,
                                              const Eigen::MatrixXd& death) const {
    const int m = lattice_->steps_per_year();
    const int n_a = grid_.n_a;
    const int n_b = grid_.n_b;
    const int n_u = n_a * grid_.spacing_ratio() + 1;
    const double pi = survival(n);
    const double sig_t = std::sqrt(law_->sigma_tilde2());
    const double r_prev = lattice_->rate((n - 1) * m, start_level);
    const double mu1v = law_->mu1(n, r_prev);
    const double mu2v = law_->mu2(n, r_prev);
    const auto& eq = market_.equity;

    Eigen::MatrixXd table = Eigen::MatrixXd::Zero(n_u, n_b + 1);
    RowMatrixXd probs(n_u, n_a + 1);
    Eigen::MatrixXd blended(n_a + 1, n_b + 1);
    for (const RatePath& path : lattice_->paths(n, start_level)) {
        if (path.probability <= 0.0) continue;
        const double int_r = path.average_rate * law_->dt();
        const double discount = std::exp(-int_r);
        const double r_term = lattice_->rate(n * m, path.terminal_level);
        const double mu_t = law_->mu_tilde_centered(int_r - mu1v, r_term - mu2v);
        for (int u = 0; u < n_u; ++u)
            bucket_probabilities(grid_, u * grid_.delta_b, int_r, mu_t, sig_t, spec.fee, eq.q,
                                 eq.sigma_s, law_->dt(),
                                 std::span<double>(&probs(u, 0), static_cast<size_t>(n_a + 1)));
        blended = pi * v_next[static_cast<size_t>(path.terminal_level)] + (1.0 - pi) * death;
        table.noalias() += (path.probability * discount) * (probs * blended);
    }
    return table;
}

void GmwbPricer::sweep_node(const ContractSpec& spec, int n, int start_level,
                            const std::vector<Eigen::MatrixXd>& v_next,
                            const Eigen::MatrixXd& death, Eigen::MatrixXd& v_out,
                            Eigen::MatrixXd* policy_out, SurrenderMask* surrender_out) const {
    const SchemeRules rules = scheme_rules(spec);
    const int date = n - 1;  // decision date of this slice, 1..N-1
    const int n_a = grid_.n_a;
    const int n_b = grid_.n_b;
    const int ratio = grid_.spacing_ratio();
    const int g_units = exact_units(spec.guarantee, grid_.delta_b, "guarantee");
    const int bonus_units = spec.bonus > 0.0 ? exact_units(spec.bonus, grid_.delta_b, "bonus") : 0;

    const Eigen::MatrixXd table = expectation_table(spec, n, start_level, v_next, death);

    v_out.resize(n_a + 1, n_b + 1);
    for (int i = 0; i <= n_a; ++i) {
        const int i_units = i * ratio;
        for (int j = 0; j <= n_b; ++j) {
            double best_value = 0.0;
            double best_w = 0.0;

            if (rules.optimize) {
                const int l_max = max_withdrawal_units(spec, i_units, j);
                bool first = true;
                for (int l_w = 0; l_w <= l_max; ++l_w) {
                    const int u = std::max(i_units - l_w, 0);
                    const int row = event_row(spec, i_units, j, l_w, bonus_units, n_b);
                    const double w = l_w * grid_.delta_b;
                    const double candidate =
                        withdrawal_cashflow(spec, date, w) + table(u, row);
                    if (first || candidate > best_value) {
                        best_value = candidate;
                        best_w = w;
                        first = false;
                    }
                }
            } else {
                const int l_w = std::min(j, g_units);
                const int u = std::max(i_units - l_w, 0);
                const int row = event_row(spec, i_units, j, l_w, bonus_units, n_b);
                best_w = l_w * grid_.delta_b;
                best_value = withdrawal_cashflow(spec, date, best_w) + table(u, row);
            }

            bool surrendered = false;
            if (rules.compare_surrender && date >= 1 && date <= maturity_ - 1) {
                const double exit = surrender_cashflow(
                    spec, date, AccountState{grid_.a(i), grid_.b(j)});
                if (exit > best_value) {
                    best_value = exit;
                    surrendered = true;
                }
            }

            v_out(i, j) = best_value;
            if (policy_out) (*policy_out)(i, j) = best_w;
            if (surrender_out) (*surrender_out)(i, j) = surrendered ? 1 : 0;
        }
    }
}

ValuationResult GmwbPricer::value(const ContractSpec& spec, bool keep_surfaces) const {
    validate_contract(spec);
    const int m = lattice_->steps_per_year();
    const int terminal_levels = maturity_ * m + 1;

    ValuationResult result;
    if (keep_surfaces) {
        result.values.resize(static_cast<size_t>(maturity_));
        result.policy.resize(static_cast<size_t>(maturity_ > 1 ? maturity_ - 1 : 0));
        result.surrender.resize(static_cast<size_t>(maturity_ > 1 ? maturity_ - 1 : 0));
    }

    std::vector<Eigen::MatrixXd> next(static_cast<size_t>(terminal_levels),
                                      terminal_values(spec));
    if (keep_surfaces) result.values[static_cast<size_t>(maturity_ - 1)] = next;

    for (int n = maturity_; n >= 2; --n) {
        const Eigen::MatrixXd death = death_payoffs(spec, n);
        const int out_levels = (n - 1) * m + 1;
        std::vector<Eigen::MatrixXd> cur(static_cast<size_t>(out_levels));
        std::vector<Eigen::MatrixXd> pol;
        std::vector<SurrenderMask> sur;
        if (keep_surfaces) {
            pol.assign(static_cast<size_t>(out_levels),
                       Eigen::MatrixXd(grid_.n_a + 1, grid_.n_b + 1));
            sur.assign(static_cast<size_t>(out_levels),
                       SurrenderMask(grid_.n_a + 1, grid_.n_b + 1));
        }
        parallel_for(out_levels, opts_.n_threads, [&](int level) {
            sweep_node(spec, n, level, next, death, cur[static_cast<size_t>(level)],
                       keep_surfaces ? &pol[static_cast<size_t>(level)] : nullptr,
                       keep_surfaces ? &sur[static_cast<size_t>(level)] : nullptr);
        });
        next = std::move(cur);
        if (keep_surfaces) {
            result.values[static_cast<size_t>(n - 2)] = next;
            result.policy[static_cast<size_t>(n - 2)] = std::move(pol);
            result.surrender[static_cast<size_t>(n - 2)] = std::move(sur);
        }
    }

    // No event takes place at inception: the accounts enter year one at the premium.
    const Eigen::MatrixXd death1 = death_payoffs(spec, 1);
    const Eigen::MatrixXd root = expectation_table(spec, 1, 0, next, death1);
    const int p_units = exact_units(spec.premium, grid_.delta_b, "premium");
    result.value0 = root(p_units, p_units);
    return result;
}

double GmwbPricer::continuation_value(const ContractSpec& spec, int n, int start_level, int i,
                                      int j, double w,
                                      const std::vector<Eigen::MatrixXd>& v_next) const {
    const int m = lattice_->steps_per_year();
    const double pi = survival(n);
    const double beta_n = spec.penalty_at(n);
    const double sig_t = std::sqrt(law_->sigma_tilde2());
    const double r_prev = lattice_->rate((n - 1) * m, start_level);
    const double mu1v = law_->mu1(n, r_prev);
    const double mu2v = law_->mu2(n, r_prev);
    const auto& eq = market_.equity;

    double start_value = 0.0;
    double row_value = 0.0;
    if (n == 1) {
        start_value = grid_.a(i);
        row_value = grid_.b(j);
    } else {
        const AccountState post =
            apply_event(spec, n - 1, AccountState{grid_.a(i), grid_.b(j)}, w);
        start_value = post.a;
        row_value = post.b;
    }
    const int row = std::min(exact_units(row_value, grid_.delta_b, "benefit row"), grid_.n_b);
    const double row_grid_value = grid_.b(row);

    std::vector<double> probs(static_cast<size_t>(grid_.n_a + 1));
    double j_value = 0.0;
    for (const RatePath& path : lattice_->paths(n, start_level)) {
        const double int_r = path.average_rate * law_->dt();
        const double discount = std::exp(-int_r);
        const double r_term = lattice_->rate(n * m, path.terminal_level);
        const double mu_t = law_->mu_tilde_centered(int_r - mu1v, r_term - mu2v);
        bucket_probabilities(grid_, start_value, int_r, mu_t, sig_t, spec.fee, eq.q, eq.sigma_s,
                             law_->dt(), probs);
        double live = 0.0;
        double dead = 0.0;
        const auto& v_term = v_next[static_cast<size_t>(path.terminal_level)];
        for (int h = 0; h <= grid_.n_a; ++h) {
            live += probs[static_cast<size_t>(h)] * v_term(h, row);
            dead += probs[static_cast<size_t>(h)] *
                    std::max(grid_.a(h), (1.0 - beta_n) * row_grid_value);
        }
        j_value += path.probability * discount * (pi * live + (1.0 - pi) * dead);
    }
    return j_value;
}

Decision GmwbPricer::optimal_withdrawal(const ContractSpec& spec, int n, int start_level, int i,
                                        int j,
                                        const std::vector<Eigen::MatrixXd>& v_next) const {
    const SchemeRules rules = scheme_rules(spec);
    const int date = n - 1;
    const int i_units = i * grid_.spacing_ratio();
    const int g_units = exact_units(spec.guarantee, grid_.delta_b, "guarantee");

    Decision best;
    if (rules.optimize) {
        const int l_max = max_withdrawal_units(spec, i_units, j);
        bool first = true;
        for (int l_w = 0; l_w <= l_max; ++l_w) {
            const double w = l_w * grid_.delta_b;
            const double candidate = withdrawal_cashflow(spec, date, w) +
                                     continuation_value(spec, n, start_level, i, j, w, v_next);
            if (first || candidate > best.value) {
                best.value = candidate;
                best.withdrawal = w;
                first = false;
            }
        }
    } else {
        const double w = std::min(j, g_units) * grid_.delta_b;
        best.withdrawal = w;
        best.value = withdrawal_cashflow(spec, date, w) +
                     continuation_value(spec, n, start_level, i, j, w, v_next);
    }
    if (rules.compare_surrender && date >= 1 && date <= maturity_ - 1) {
        const double exit = surrender_cashflow(spec, date, AccountState{grid_.a(i), grid_.b(j)});
        if (exit > best.value) {
            best.value = exit;
            best.surrender = true;
        }
    }
    return best;
}

Decomposition value_decomposition(const MarketModel& market, const ContractSpec& spec,
                                  const AccountGrid& grid_step_up,
                                  const AccountGrid& grid_no_step_up,
                                  const MortalityTable& mortality, int start_age,
                                  const DpOptions& opts) {
    ContractSpec with_su = spec;
    with_su.scheme = Scheme::dynamic;
    if (with_su.step_up == StepUp::none)
        with_su.step_up = StepUp::step_up_then_withdraw;
    ContractSpec without_su = with_su;
    without_su.step_up = StepUp::none;

    GmwbPricer pricer_su(market, grid_step_up, mortality, start_age, spec.maturity, opts);
    GmwbPricer pricer_no(market, grid_no_step_up, mortality, start_age, spec.maturity, opts);

    Decomposition out;
    out.value_step_up = pricer_su.value(with_su).value0;
    out.value_no_step_up = pricer_no.value(without_su).value0;
    for (int n = 1; n <= spec.maturity; ++n)
        out.cb += spec.guarantee * market_discount(market.curve, n);
    out.time_value_pct = 100.0 * out.cb / out.value_step_up;
    out.gmwb_pct = 100.0 * (out.value_no_step_up - out.cb) / out.value_step_up;
    out.step_up_pct =
        100.0 * (out.value_step_up - out.value_no_step_up) / out.value_step_up;
    return out;
}

}  // namespace gmwb
