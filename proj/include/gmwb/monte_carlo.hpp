#pragma once

#include <cstdint>
#include <vector>

#include "gmwb/contract.hpp"
#include "gmwb/market.hpp"
#include "gmwb/mortality.hpp"

namespace gmwb {

struct SimulationConfig {
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 1;
    bool antithetic = false;
    int n_threads = 0;  // 0 => hardware concurrency
};

struct PriceEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0;  // 1.96 * sample std / sqrt(n)
    std::int64_t n_paths = 0;
};

// Exact-law draws of (int_{n-1}^n r ds, r_n, W^S_n - W^S_{n-1}) chained on r_{n-1},
// sampled through the Cholesky factor of the one-year covariance. Row-major:
// entry(path, n) at index path * n_years + (n - 1).
struct SimulatedPaths {
    int n_years = 0;
    std::int64_t n_paths = 0;
    std::vector<double> int_r;
    std::vector<double> r_end;
    std::vector<double> d_w;

    std::size_t at(std::int64_t path, int n) const {
        return static_cast<std::size_t>(path) * static_cast<std::size_t>(n_years) +
               static_cast<std::size_t>(n - 1);
    }
};

SimulatedPaths simulate_paths(const MarketModel& market, int n_years,
                              const SimulationConfig& config);

/// Monte Carlo price of the static-withdrawal scheme (no surrender), with mortality
/// handled by deterministic survival weighting of the yearly cashflows.
PriceEstimate price_static(const MarketModel& market, const ContractSpec& spec,
                           const MortalityTable& mortality, int start_age,
                           const SimulationConfig& config);

/// Least-squares Monte Carlo price of the static scheme with optimal surrender.
/// Continuation values are regressed on polynomials of (A, B, r) up to total degree two
/// plus the surrender payoff; the price is the in-sample pathwise estimate.
PriceEstimate price_lsm(const MarketModel& market, const ContractSpec& spec,
                        const MortalityTable& mortality, int start_age,
                        const SimulationConfig& config);

}  // namespace gmwb
