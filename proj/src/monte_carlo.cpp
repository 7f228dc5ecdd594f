#include "gmwb/monte_carlo.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <random>
#include <stdexcept>

#include "gmwb/joint_law.hpp"
#include "gmwb/parallel.hpp"

namespace gmwb {

namespace {

constexpr std::int64_t kBlock = 4096;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic per-block generator: identical streams for any thread count.
std::mt19937_64 block_rng(std::uint64_t seed, std::int64_t block) {
    return std::mt19937_64(splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (block + 1))));
}

struct YearState {
    double a_minus;  // investment account entering the date
    double b_minus;  // benefit account entering the date
};

double static_withdrawal(const ContractSpec& spec, double b_minus) {
    return std::min(b_minus, spec.guarantee);
}

PriceEstimate summarize(const std::vector<double>& block_sum,
                        const std::vector<double>& block_sumsq, std::int64_t n) {
    double total = 0.0, total_sq = 0.0;
    for (double s : block_sum) total += s;
    for (double s : block_sumsq) total_sq += s;
    const double mean = total / static_cast<double>(n);
    const double var = std::max(total_sq / static_cast<double>(n) - mean * mean, 0.0) *
                       static_cast<double>(n) / static_cast<double>(std::max<std::int64_t>(n - 1, 1));
    PriceEstimate est;
    est.mean = mean;
    est.half_width_95 = 1.96 * std::sqrt(var / static_cast<double>(n));
    est.n_paths = n;
    return est;
}

}  // namespace

SimulatedPaths simulate_paths(const MarketModel& market, int n_years,
                              const SimulationConfig& config) {
    market.validate();
    if (config.n_paths < 2) throw std::invalid_argument("simulate_paths: need n_paths >= 2");
    const JointLaw law(market.curve, market.hw, market.equity.rho, 1.0);
    const Eigen::Matrix3d chol = law.cholesky();

    SimulatedPaths out;
    out.n_years = n_years;
    out.n_paths = config.n_paths;
    const std::size_t total =
        static_cast<std::size_t>(config.n_paths) * static_cast<std::size_t>(n_years);
    out.int_r.resize(total);
    out.r_end.resize(total);
    out.d_w.resize(total);

    const std::int64_t n_blocks = (config.n_paths + kBlock - 1) / kBlock;
    parallel_for(static_cast<int>(n_blocks), config.n_threads, [&](int block) {
        auto rng = block_rng(config.seed, block);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::int64_t lo = static_cast<std::int64_t>(block) * kBlock;
        const std::int64_t hi = std::min(config.n_paths, lo + kBlock);
        for (std::int64_t p = lo; p < hi; ++p) {
            double r_prev = market.hw.r0;
            for (int n = 1; n <= n_years; ++n) {
                const Eigen::Vector3d z(normal(rng), normal(rng), normal(rng));
                const Eigen::Vector3d x = chol * z;
                const std::size_t idx = out.at(p, n);
                out.int_r[idx] = law.mu1(n, r_prev) + x(0);
                out.r_end[idx] = law.mu2(n, r_prev) + x(1);
                out.d_w[idx] = x(2);
                r_prev = out.r_end[idx];
            }
        }
    });
    return out;
}

PriceEstimate price_static(const MarketModel& market, const ContractSpec& spec,
                           const MortalityTable& mortality, int start_age,
                           const SimulationConfig& config) {
    market.validate();
    spec.validate();
    if (config.n_paths < 2) throw std::invalid_argument("price_static: need n_paths >= 2");
    if (!mortality.covers(start_age, spec.maturity))
        throw std::invalid_argument("price_static: mortality table does not cover cohort ages");

    const JointLaw law(market.curve, market.hw, market.equity.rho, 1.0);
    const Eigen::Matrix3d chol = law.cholesky();
    const int n_years = spec.maturity;
    const auto& eq = market.equity;

    std::vector<double> pi(static_cast<size_t>(n_years));
    for (int n = 1; n <= n_years; ++n)
        pi[static_cast<size_t>(n - 1)] = mortality.survival(start_age, n);

    // One pathwise payoff given the year-by-year joint draws.
    const auto payoff = [&](const std::vector<Eigen::Vector3d>& draws) {
        double r_prev = market.hw.r0;
        double discount = 1.0;
        double alive = 1.0;
        double a = spec.premium, b = spec.premium;
        double total = 0.0;
        for (int n = 1; n <= n_years; ++n) {
            const Eigen::Vector3d& x = draws[static_cast<size_t>(n - 1)];
            const double int_r = law.mu1(n, r_prev) + x(0);
            const double r_n = law.mu2(n, r_prev) + x(1);
            const double d_w = x(2);
            const double a_minus =
                a * account_growth_factor(int_r, d_w, 0.0, 0.0, spec.fee, eq.q, eq.sigma_s, 1.0);
            const double b_minus = b;
            discount *= std::exp(-int_r);
            const double p_n = pi[static_cast<size_t>(n - 1)];
            total += discount * alive * (1.0 - p_n) *
                     death_benefit(spec, n, AccountState{a_minus, b_minus});
            if (n == n_years) {
                total += discount * alive * p_n *
                         terminal_cashflow(spec, AccountState{a_minus, b_minus});
            } else {
                const double w = static_withdrawal(spec, b_minus);
                total += discount * alive * p_n * withdrawal_cashflow(spec, n, w);
                const AccountState post =
                    apply_event(spec, n, AccountState{a_minus, b_minus}, w);
                a = post.a;
                b = post.b;
            }
            alive *= p_n;
            r_prev = r_n;
        }
        return total;
    };

    const std::int64_t n_samples = config.antithetic ? config.n_paths / 2 : config.n_paths;
    if (n_samples < 2) throw std::invalid_argument("price_static: too few paths for antithetic");
    const std::int64_t n_blocks = (n_samples + kBlock - 1) / kBlock;
    std::vector<double> block_sum(static_cast<size_t>(n_blocks), 0.0);
    std::vector<double> block_sumsq(static_cast<size_t>(n_blocks), 0.0);

    parallel_for(static_cast<int>(n_blocks), config.n_threads, [&](int block) {
        auto rng = block_rng(config.seed, block);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::int64_t lo = static_cast<std::int64_t>(block) * kBlock;
        const std::int64_t hi = std::min(n_samples, lo + kBlock);
        std::vector<Eigen::Vector3d> draws(static_cast<size_t>(n_years));
        std::vector<Eigen::Vector3d> mirrored(static_cast<size_t>(n_years));
        double sum = 0.0, sumsq = 0.0;
        for (std::int64_t p = lo; p < hi; ++p) {
            for (int n = 0; n < n_years; ++n) {
                const Eigen::Vector3d z(normal(rng), normal(rng), normal(rng));
                draws[static_cast<size_t>(n)] = chol * z;
                if (config.antithetic) mirrored[static_cast<size_t>(n)] = -draws[static_cast<size_t>(n)];
            }
            double sample = payoff(draws);
            if (config.antithetic) sample = 0.5 * (sample + payoff(mirrored));
            sum += sample;
            sumsq += sample * sample;
        }
        block_sum[static_cast<size_t>(block)] = sum;
        block_sumsq[static_cast<size_t>(block)] = sumsq;
    });

    return summarize(block_sum, block_sumsq, n_samples);
}

PriceEstimate price_lsm(const MarketModel& market, const ContractSpec& spec,
                        const MortalityTable& mortality, int start_age,
                        const SimulationConfig& config) {
    market.validate();
    spec.validate();
    if (!spec.surrender_allowed)
        throw std::invalid_argument("price_lsm: surrender must be allowed for the S+S scheme");
    if (config.n_paths < 16) throw std::invalid_argument("price_lsm: need n_paths >= 16");
    if (!mortality.covers(start_age, spec.maturity))
        throw std::invalid_argument("price_lsm: mortality table does not cover cohort ages");

    const JointLaw law(market.curve, market.hw, market.equity.rho, 1.0);
    const Eigen::Matrix3d chol = law.cholesky();
    const int n_years = spec.maturity;
    const std::int64_t n_paths = config.n_paths;
    const auto& eq = market.equity;

    std::vector<double> pi(static_cast<size_t>(n_years));
    for (int n = 1; n <= n_years; ++n)
        pi[static_cast<size_t>(n - 1)] = mortality.survival(start_age, n);

    // Forward pass under static withdrawals: store the per-date pre-event state and the
    // cashflows the stopping rule chooses between.
    const std::size_t total =
        static_cast<std::size_t>(n_paths) * static_cast<std::size_t>(n_years);
    std::vector<double> a_minus(total), b_minus(total), r_at(total), year_df(total);
    std::vector<double> cash(total), death(total), exit_value(total);
    const auto at = [n_years](std::int64_t p, int n) {
        return static_cast<std::size_t>(p) * static_cast<std::size_t>(n_years) +
               static_cast<std::size_t>(n - 1);
    };

    const std::int64_t n_blocks = (n_paths + kBlock - 1) / kBlock;
    parallel_for(static_cast<int>(n_blocks), config.n_threads, [&](int block) {
        auto rng = block_rng(config.seed, block);
        std::normal_distribution<double> normal(0.0, 1.0);
        const std::int64_t lo = static_cast<std::int64_t>(block) * kBlock;
        const std::int64_t hi = std::min(n_paths, lo + kBlock);
        for (std::int64_t p = lo; p < hi; ++p) {
            double r_prev = market.hw.r0;
            double a = spec.premium, b = spec.premium;
            for (int n = 1; n <= n_years; ++n) {
                const Eigen::Vector3d z(normal(rng), normal(rng), normal(rng));
                const Eigen::Vector3d x = chol * z;
                const double int_r = law.mu1(n, r_prev) + x(0);
                const double r_n = law.mu2(n, r_prev) + x(1);
                const std::size_t idx = at(p, n);
                a_minus[idx] = a * account_growth_factor(int_r, x(2), 0.0, 0.0, spec.fee, eq.q,
                                                         eq.sigma_s, 1.0);
                b_minus[idx] = b;
                r_at[idx] = r_n;
                year_df[idx] = std::exp(-int_r);
                const AccountState state{a_minus[idx], b_minus[idx]};
                death[idx] = death_benefit(spec, n, state);
                if (n == n_years) {
                    cash[idx] = terminal_cashflow(spec, state);
                    exit_value[idx] = cash[idx];
                } else {
                    const double w = static_withdrawal(spec, b);
                    cash[idx] = withdrawal_cashflow(spec, n, w);
                    exit_value[idx] = surrender_cashflow(spec, n, state);
                    const AccountState post = apply_event(spec, n, state, w);
                    a = post.a;
                    b = post.b;
                }
                r_prev = r_n;
            }
        }
    });

    // Backward stopping pass. held[p] is the date-(n+1) value conditional on being alive
    // there, under the exercise rule already fixed for later dates.
    std::vector<double> held(static_cast<size_t>(n_paths));
    for (std::int64_t p = 0; p < n_paths; ++p) held[static_cast<size_t>(p)] = cash[at(p, n_years)];

    constexpr int kBasis = 11;
    bool warned_rank = false;
    for (int n = n_years - 1; n >= 1; --n) {
        const double p_next = pi[static_cast<size_t>(n)];
        Eigen::VectorXd target(n_paths);
        Eigen::MatrixXd basis(n_paths, kBasis);
        for (std::int64_t p = 0; p < n_paths; ++p) {
            const std::size_t idx = at(p, n);
            const std::size_t nxt = at(p, n + 1);
            const double continuation =
                year_df[nxt] * (p_next * held[static_cast<size_t>(p)] + (1.0 - p_next) * death[nxt]);
            target(p) = continuation;
            const double a = a_minus[idx], b = b_minus[idx], r = r_at[idx];
            basis(p, 0) = 1.0;
            basis(p, 1) = a;
            basis(p, 2) = b;
            basis(p, 3) = r;
            basis(p, 4) = a * a;
            basis(p, 5) = b * b;
            basis(p, 6) = r * r;
            basis(p, 7) = a * b;
            basis(p, 8) = a * r;
            basis(p, 9) = b * r;
            basis(p, 10) = exit_value[idx];
        }
        // Column standardization keeps the normal equations well scaled; constant
        // columns (e.g. B under static withdrawals with no step-up) drop to zero and
        // the rank-revealing QR falls back to the reduced basis.
        Eigen::VectorXd mean = basis.colwise().mean();
        Eigen::VectorXd scale(kBasis);
        for (int c = 1; c < kBasis; ++c) {
            basis.col(c).array() -= mean(c);
            const double sd = std::sqrt(basis.col(c).squaredNorm() / static_cast<double>(n_paths));
            scale(c) = sd > 1e-12 ? sd : 0.0;
            if (scale(c) > 0.0)
                basis.col(c) /= scale(c);
            else
                basis.col(c).setZero();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
        if (qr.rank() < kBasis && !warned_rank) {
            std::cerr << "price_lsm: rank-deficient regression basis (rank " << qr.rank()
                      << "), using reduced basis\n";
            warned_rank = true;
        }
        const Eigen::VectorXd coef = qr.solve(target);
        const Eigen::VectorXd fitted = basis * coef;
        for (std::int64_t p = 0; p < n_paths; ++p) {
            const std::size_t idx = at(p, n);
            const bool stop = exit_value[idx] > cash[idx] + fitted(p);
            held[static_cast<size_t>(p)] =
                stop ? exit_value[idx] : cash[idx] + target(p);
        }
    }

    std::vector<double> block_sum(static_cast<size_t>(n_blocks), 0.0);
    std::vector<double> block_sumsq(static_cast<size_t>(n_blocks), 0.0);
    for (std::int64_t p = 0; p < n_paths; ++p) {
        const std::size_t first = at(p, 1);
        const double v0 =
            year_df[first] *
            (pi[0] * held[static_cast<size_t>(p)] + (1.0 - pi[0]) * death[first]);
        block_sum[static_cast<size_t>(p / kBlock)] += v0;
        block_sumsq[static_cast<size_t>(p / kBlock)] += v0 * v0;
    }
    return summarize(block_sum, block_sumsq, n_paths);
}

}  // namespace gmwb
