#pragma once

#include <cmath>
#include <stdexcept>

namespace gmwb {

// Uniform two-dimensional grid for the investment and benefit accounts.
// Points run a_i = i delta_a for i = 0..n_a (and likewise for b); delta_a must be an
// integer multiple of delta_b so that withdrawals on the delta_b lattice keep post-event
// account values exactly on grid.
struct AccountGrid {
    int n_a = 30;         // number of intervals on the A axis (n_a + 1 points)
    int n_b = 10;
    double delta_a = 10.0;
    double delta_b = 10.0;

    double a_max() const { return n_a * delta_a; }
    double b_max() const { return n_b * delta_b; }
    double a(int i) const { return i * delta_a; }
    double b(int j) const { return j * delta_b; }

    // delta_a / delta_b, validated integral.
    int spacing_ratio() const {
        const double ratio = delta_a / delta_b;
        const int r = static_cast<int>(std::lround(ratio));
        if (r < 1 || std::abs(ratio - r) > 1e-9)
            throw std::invalid_argument("grid: delta_a must be an integer multiple of delta_b");
        return r;
    }

    void validate() const {
        if (n_a < 1 || n_b < 1) throw std::invalid_argument("grid: n_a and n_b must be >= 1");
        if (!(delta_a > 0.0) || !(delta_b > 0.0))
            throw std::invalid_argument("grid: spacings must be positive");
        (void)spacing_ratio();
    }
};

// True when x is an integer multiple of step, up to grid-roundoff.
inline bool on_lattice(double x, double step) {
    const double k = x / step;
    return std::abs(k - std::lround(k)) <= 1e-9 * std::max(1.0, std::abs(k));
}

}  // namespace gmwb
