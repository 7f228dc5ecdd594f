#include "gmwb/joint_law.hpp"

#include <cmath>
#include <stdexcept>

namespace gmwb {

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

JointLaw::JointLaw(const SvenssonCurve& curve, const HullWhiteParams& hw, double rho, double dt)
    : curve_(curve), hw_(hw), rho_(rho), dt_(dt) {
    curve_.validate();
    hw_.validate();
    if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("JointLaw: rho must be in [-1,1]");
    if (!(dt > 0.0)) throw std::invalid_argument("JointLaw: dt must be positive");

    const double a = hw_.a;
    const double sr = hw_.sigma_r;
    const double ead = std::exp(-a * dt);

    sigma_.setZero();
    sigma_(0, 0) = var_integral(dt);
    sigma_(1, 1) = sr * sr / (2.0 * a) * (1.0 - std::exp(-2.0 * a * dt));
    sigma_(2, 2) = dt;
    sigma_(0, 1) = sigma_(1, 0) = sr * sr / (2.0 * a * a) * (1.0 - ead) * (1.0 - ead);
    sigma_(0, 2) = sigma_(2, 0) = rho * sr / a * (dt - (1.0 - ead) / a);
    sigma_(1, 2) = sigma_(2, 1) = rho * sr / a * (1.0 - ead);

    const double det = det_sigma22_block();
    if (!(det > 0.0)) throw std::runtime_error("JointLaw: singular (int r, r) covariance block");
    proj1_ = (sigma_(0, 2) * sigma_(1, 1) - sigma_(1, 2) * sigma_(0, 1)) / det;
    proj2_ = (sigma_(1, 2) * sigma_(0, 0) - sigma_(0, 2) * sigma_(0, 1)) / det;
    sigma_tilde2_ = dt - (proj1_ * sigma_(0, 2) + proj2_ * sigma_(1, 2));

    Eigen::LLT<Eigen::Matrix3d> llt(sigma_);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("JointLaw: covariance is not positive definite");
    chol_ = llt.matrixL();
}

double JointLaw::alpha_adj(double t) const {
    const double e = 1.0 - std::exp(-hw_.a * t);
    return forward_rate(curve_, t) + hw_.sigma_r * hw_.sigma_r / (2.0 * hw_.a * hw_.a) * e * e;
}

double JointLaw::var_integral(double t) const {
    const double a = hw_.a;
    const double sr = hw_.sigma_r;
    return sr * sr / (a * a) *
           (t + 2.0 / a * std::exp(-a * t) - 0.5 / a * std::exp(-2.0 * a * t) - 1.5 / a);
}

double JointLaw::mu1(int n, double r_prev) const {
    const double t0 = n - dt_;
    const double t1 = static_cast<double>(n);
    const double b = (1.0 - std::exp(-hw_.a * dt_)) / hw_.a;
    return b * (r_prev - alpha_adj(t0)) +
           std::log(market_discount(curve_, t0) / market_discount(curve_, t1)) +
           0.5 * (var_integral(t1) - var_integral(t0));
}

double JointLaw::mu2(int n, double r_prev) const {
    const double t0 = n - dt_;
    const double t1 = static_cast<double>(n);
    const double ead = std::exp(-hw_.a * dt_);
    return r_prev * ead + alpha_adj(t1) - alpha_adj(t0) * ead;
}

double JointLaw::det_sigma22_block() const {
    return sigma_(0, 0) * sigma_(1, 1) - sigma_(0, 1) * sigma_(0, 1);
}

double JointLaw::mu_tilde(int n, double r_prev, double int_r, double r_n) const {
    return mu_tilde_centered(int_r - mu1(n, r_prev), r_n - mu2(n, r_prev));
}

double JointLaw::mu_tilde_centered(double int_r_dev, double r_dev) const {
    return proj1_ * int_r_dev + proj2_ * r_dev;
}

double account_growth_factor(double int_r, double mu_t, double sig_t, double z, double fee,
                             double q, double sigma_s, double dt) {
    return std::exp(int_r - (q + fee + 0.5 * sigma_s * sigma_s) * dt +
                    sigma_s * (mu_t + sig_t * z));
}

void bucket_probabilities(const AccountGrid& grid, double start_value, double int_r,
                          double mu_t, double sig_t, double fee, double q, double sigma_s,
                          double dt, std::span<double> out) {
    const int n_a = grid.n_a;
    if (static_cast<int>(out.size()) != n_a + 1)
        throw std::invalid_argument("bucket_probabilities: output span must have n_a + 1 entries");
    std::fill(out.begin(), out.end(), 0.0);

    if (start_value <= 0.0) {
        out[0] = 1.0;
        return;
    }

    const double scale = sigma_s * std::abs(sig_t);
    const double drift = int_r - (q + fee + 0.5 * sigma_s * sigma_s) * dt + sigma_s * mu_t;
    if (scale <= 0.0) {
        // Deterministic image: unit mass at the containing bucket.
        const double a_det = start_value * std::exp(drift);
        int h = static_cast<int>(std::floor(a_det / grid.delta_a + 0.5));
        h = std::min(std::max(h, 0), n_a);
        out[static_cast<size_t>(h)] = 1.0;
        return;
    }

    // Shared edges: bucket h's upper edge is a_h + delta_a/2 = lower edge of bucket h+1.
    const double log_start = std::log(start_value);
    double prev_cdf = 0.0;
    for (int h = 0; h < n_a; ++h) {
        const double edge = (h + 0.5) * grid.delta_a;
        const double x = (std::log(edge) - log_start - drift) / scale;
        const double cdf = normal_cdf(x);
        out[static_cast<size_t>(h)] = cdf - prev_cdf;
        prev_cdf = cdf;
    }
    out[static_cast<size_t>(n_a)] = 1.0 - prev_cdf;
}

}  // namespace gmwb
