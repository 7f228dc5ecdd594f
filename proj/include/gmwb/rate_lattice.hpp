#pragma once

#include <vector>

#include "gmwb/yield_curve.hpp"

namespace gmwb {

// One path of m lattice steps between consecutive anniversary dates.
struct RatePath {
    double probability;   // product of branch probabilities along the path
    double average_rate;  // mean of the m+1 node values visited, both endpoints included
    int terminal_level;   // node level at the arrival anniversary
};

using PathTable = std::vector<RatePath>;  // 2^m entries per (anniversary, start level)

// Recombining binomial discretization of the short rate with m uniform steps per year.
// Node level j at step k carries rate r0 + (2j - k) dr with dr = sigma_r sqrt(dt);
// the drift is encoded in the up-branch probability, clamped to [0,1].
class RateLattice {
  public:
    RateLattice(const SvenssonCurve& curve, const HullWhiteParams& hw, int n_years,
                int steps_per_year);

    int n_years() const { return n_years_; }
    int steps_per_year() const { return m_; }
    int n_steps() const { return n_years_ * m_; }
    double dt_step() const { return dt_; }
    double dr() const { return dr_; }

    int levels_at(int step) const { return step + 1; }
    double rate(int step, int level) const;
    double up_prob(int step, int level) const;

    // Fraction of branch probabilities that required clamping to [0,1].
    double clamp_fraction() const { return clamp_fraction_; }

    // The 2^m paths over anniversary year n (n in 1..N) from a start level at step (n-1)m.
    // Tables are built once at construction; reads are thread-safe.
    const PathTable& paths(int anniversary, int start_level) const;

  private:
    int n_years_;
    int m_;
    double dt_;
    double dr_;
    double r0_;
    std::vector<std::vector<double>> up_prob_;       // [step][level]
    std::vector<std::vector<PathTable>> path_tables_;  // [anniversary-1][start_level]
    double clamp_fraction_ = 0.0;

    PathTable enumerate(int anniversary, int start_level) const;
};

}  // namespace gmwb
