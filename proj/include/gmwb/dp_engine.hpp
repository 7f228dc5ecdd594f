#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "gmwb/account_grid.hpp"
#include "gmwb/contract.hpp"
#include "gmwb/joint_law.hpp"
#include "gmwb/market.hpp"
#include "gmwb/mortality.hpp"
#include "gmwb/rate_lattice.hpp"

namespace gmwb {

struct DpOptions {
    int steps_per_year = 2;  // lattice steps per anniversary year
    int n_threads = 0;       // 0 => hardware concurrency
};

using SurrenderMask = Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Backward-induction output. Surfaces are indexed [date n - 1][rate level](a_i, b_j)
// with the rate level living on the lattice slice at step n * m. Policy and surrender
// stacks cover the decision dates 1..N-1.
struct ValuationResult {
    double value0 = 0.0;
    std::vector<std::vector<Eigen::MatrixXd>> values;
    std::vector<std::vector<Eigen::MatrixXd>> policy;
    std::vector<std::vector<SurrenderMask>> surrender;
};

struct Decision {
    double withdrawal = 0.0;
    double value = 0.0;
    bool surrender = false;
};

// Valuation engine for one market/grid/mortality setting. The rate lattice, joint law
// and survival weights are built once; contracts (fees, penalties, features) can then
// be priced repeatedly against them, which is what the fair-fee search needs.
class GmwbPricer {
  public:
    GmwbPricer(const MarketModel& market, const AccountGrid& grid,
               const MortalityTable& mortality, int start_age, int maturity,
               const DpOptions& opts = {});

    // Full backward sweep. Throws on contract/grid inconsistencies before computing.
    ValuationResult value(const ContractSpec& spec, bool keep_surfaces = false) const;

    // Terminal slice V_N over the account grid (rate independent).
    Eigen::MatrixXd terminal_values(const ContractSpec& spec) const;

    // Reference implementation of the one-step expectation J_{n-1}(w, a_i, b_j) at one
    // lattice node, as plain nested sums over paths and buckets. The fast sweep must
    // agree with this; tests compare the two.
    double continuation_value(const ContractSpec& spec, int n, int start_level, int i, int j,
                              double w, const std::vector<Eigen::MatrixXd>& v_next) const;

    // Optimal withdrawal decision at date n-1 (slow path, for tests and spot checks).
    Decision optimal_withdrawal(const ContractSpec& spec, int n, int start_level, int i, int j,
                                const std::vector<Eigen::MatrixXd>& v_next) const;

    void validate_contract(const ContractSpec& spec) const;

    const RateLattice& lattice() const { return *lattice_; }
    const JointLaw& law() const { return *law_; }
    const AccountGrid& grid() const { return grid_; }
    const MarketModel& market() const { return market_; }
    int maturity() const { return maturity_; }
    double survival(int n) const { return survival_[static_cast<size_t>(n - 1)]; }

  private:
    MarketModel market_;
    AccountGrid grid_;
    int maturity_;
    DpOptions opts_;
    std::shared_ptr<const RateLattice> lattice_;
    std::shared_ptr<const JointLaw> law_;
    std::vector<double> survival_;  // pi_n for n = 1..N

    struct StepWork;
    void sweep_node(const ContractSpec& spec, int n, int start_level,
                    const std::vector<Eigen::MatrixXd>& v_next, const Eigen::MatrixXd& death,
                    Eigen::MatrixXd& v_out, Eigen::MatrixXd* policy_out,
                    SurrenderMask* surrender_out) const;
    Eigen::MatrixXd expectation_table(const ContractSpec& spec, int n, int start_level,
                                      const std::vector<Eigen::MatrixXd>& v_next,
                                      const Eigen::MatrixXd& death) const;
    Eigen::MatrixXd death_payoffs(const ContractSpec& spec, int n) const;
};

struct Decomposition {
    double cb = 0.0;              // present value of the guaranteed withdrawal stream
    double value_step_up = 0.0;   // dynamic-scheme value with the step-up feature
    double value_no_step_up = 0.0;
    double time_value_pct = 0.0;  // CB relative to the step-up value
    double gmwb_pct = 0.0;
    double step_up_pct = 0.0;
};

// Splits the step-up annuity value into the certain withdrawal stream, the withdrawal
// guarantee and the step-up add-on, all relative to the step-up dynamic value.
Decomposition value_decomposition(const MarketModel& market, const ContractSpec& spec,
                                  const AccountGrid& grid_step_up,
                                  const AccountGrid& grid_no_step_up,
                                  const MortalityTable& mortality, int start_age,
                                  const DpOptions& opts = {});

}  // namespace gmwb
