#include "gmwb/rate_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "gmwb/yield_curve.hpp"

namespace gmwb {

RateLattice::RateLattice(const SvenssonCurve& curve, const HullWhiteParams& hw, int n_years,
                         int steps_per_year)
    : n_years_(n_years), m_(steps_per_year) {
    curve.validate();
    hw.validate();
    if (n_years_ < 1 || m_ < 1)
        throw std::invalid_argument("RateLattice: need n_years >= 1 and steps_per_year >= 1");
    if (!(hw.sigma_r > 0.0))
        throw std::invalid_argument(
            "RateLattice: sigma_r must be strictly positive (degenerate lattice)");

    dt_ = 1.0 / static_cast<double>(m_);
    dr_ = hw.sigma_r * std::sqrt(dt_);
    r0_ = hw.r0;

    const int steps = n_steps();
    up_prob_.resize(static_cast<size_t>(steps));
    long clamped = 0, total = 0;
    for (int k = 0; k < steps; ++k) {
        const double drift_level = theta(curve, hw, k * dt_);
        auto& row = up_prob_[static_cast<size_t>(k)];
        row.resize(static_cast<size_t>(k + 1));
        for (int j = 0; j <= k; ++j) {
            const double r = rate(k, j);
            const double p = 0.5 + (drift_level - hw.a * r) * std::sqrt(dt_) / (2.0 * hw.sigma_r);
            row[static_cast<size_t>(j)] = std::clamp(p, 0.0, 1.0);
            if (p < 0.0 || p > 1.0) ++clamped;
            ++total;
        }
    }
    clamp_fraction_ = total > 0 ? static_cast<double>(clamped) / static_cast<double>(total) : 0.0;
    if (clamp_fraction_ > 0.05)
        std::cerr << "warning: rate lattice clamped " << 100.0 * clamp_fraction_
                  << "% of branch probabilities\n";

    path_tables_.resize(static_cast<size_t>(n_years_));
    for (int n = 1; n <= n_years_; ++n) {
        auto& per_start = path_tables_[static_cast<size_t>(n - 1)];
        const int starts = (n - 1) * m_ + 1;
        per_start.reserve(static_cast<size_t>(starts));
        for (int s = 0; s < starts; ++s) per_start.push_back(enumerate(n, s));
    }
}

double RateLattice::rate(int step, int level) const {
    return r0_ + (2 * level - step) * dr_;
}

double RateLattice::up_prob(int step, int level) const {
    return up_prob_[static_cast<size_t>(step)][static_cast<size_t>(level)];
}

PathTable RateLattice::enumerate(int anniversary, int start_level) const {
    const int start_step = (anniversary - 1) * m_;
    const int n_paths = 1 << m_;
    PathTable table;
    table.reserve(static_cast<size_t>(n_paths));
    for (int mask = 0; mask < n_paths; ++mask) {
        double prob = 1.0;
        double rate_sum = rate(start_step, start_level);
        int level = start_level;
        for (int s = 0; s < m_; ++s) {
            const int step = start_step + s;
            const double p_up = up_prob(step, level);
            if (mask & (1 << s)) {
                prob *= p_up;
                level += 1;
            } else {
                prob *= 1.0 - p_up;
            }
            rate_sum += rate(step + 1, level);
        }
        table.push_back(RatePath{prob, rate_sum / (m_ + 1), level});
    }
    return table;
}

const PathTable& RateLattice::paths(int anniversary, int start_level) const {
    if (anniversary < 1 || anniversary > n_years_)
        throw std::out_of_range("RateLattice::paths: anniversary outside 1..N");
    const auto& per_start = path_tables_[static_cast<size_t>(anniversary - 1)];
    if (start_level < 0 || start_level >= static_cast<int>(per_start.size()))
        throw std::out_of_range("RateLattice::paths: start level outside the lattice");
    return per_start[static_cast<size_t>(start_level)];
}

}  // namespace gmwb
