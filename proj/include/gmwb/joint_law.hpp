#pragma once

#include <Eigen/Dense>
#include <span>

#include "gmwb/account_grid.hpp"
#include "gmwb/yield_curve.hpp"

namespace gmwb {

/// Standard normal CDF via the C library error function: 0.5 erfc(-x/sqrt(2)).
/// erfc is correctly rounded to double precision, well below the 1e-12 requirement.
double normal_cdf(double x);

// Joint Gaussian law of (\int_{t0}^{t1} r ds, r_{t1}, W^S_{t1} - W^S_{t0}) conditional
// on r_{t0}, for the curve-fitted Hull-White short rate correlated with the fund driver.
// The covariance is time-homogeneous in the step length; the means depend on the
// anniversary through the market curve.
class JointLaw {
  public:
    JointLaw(const SvenssonCurve& curve, const HullWhiteParams& hw, double rho,
             double dt = 1.0);

    double dt() const { return dt_; }
    double rho() const { return rho_; }

    // alpha(t) = f(0,t) + sigma_r^2/(2a^2) (1 - e^{-at})^2
    double alpha_adj(double t) const;
    // V(t) = sigma_r^2/a^2 (t + (2/a) e^{-at} - (1/2a) e^{-2at} - 3/(2a)),
    // the variance of the integrated short rate over [0,t]
    double var_integral(double t) const;

    // Conditional means over the step starting at t0 = anniversary - dt
    double mu1(int anniversary, double r_prev) const;  // integrated rate
    double mu2(int anniversary, double r_prev) const;  // terminal rate

    const Eigen::Matrix3d& sigma() const { return sigma_; }
    double sigma11() const { return sigma_(0, 0); }
    double sigma22() const { return sigma_(1, 1); }
    double sigma12() const { return sigma_(0, 1); }
    double sigma13() const { return sigma_(0, 2); }
    double sigma23() const { return sigma_(1, 2); }
    double det_sigma22_block() const;  // det of the (int r, r) subblock

    // Law of the fund increment given the realized (int r, r_n) pair: the 2x2 linear
    // projection mean and the residual variance (independent of r_prev).
    double mu_tilde(int anniversary, double r_prev, double int_r, double r_n) const;
    double mu_tilde_centered(double int_r_dev, double r_dev) const;
    double sigma_tilde2() const { return sigma_tilde2_; }

    // Cholesky factor of the full 3x3 covariance, for exact simulation.
    const Eigen::Matrix3d& cholesky() const { return chol_; }

  private:
    SvenssonCurve curve_;
    HullWhiteParams hw_;
    double rho_;
    double dt_;
    Eigen::Matrix3d sigma_;
    Eigen::Matrix3d chol_;
    double proj1_ = 0.0;  // projection coefficients Sigma_12 Sigma_22^{-1}
    double proj2_ = 0.0;
    double sigma_tilde2_ = 0.0;
};

/// Growth multiplier of the investment account over one step:
/// exp(int_r - (q + fee + sigma_s^2/2) dt + sigma_s (mu_t + sig_t z)).
double account_growth_factor(double int_r, double mu_t, double sig_t, double z, double fee,
                             double q, double sigma_s, double dt);

// Probability that the investment account lands in each A-grid bucket after one step,
// given the rate-path summary. Bucket h covers [a_h - delta_a/2, a_h + delta_a/2); the
// first and last buckets absorb the tails so the vector always sums to one.
// start_value is the post-withdrawal account (a_i - w)^+; zero puts unit mass at bucket 0.
void bucket_probabilities(const AccountGrid& grid, double start_value, double int_r,
                          double mu_t, double sig_t, double fee, double q, double sigma_s,
                          double dt, std::span<double> out);

}  // namespace gmwb
