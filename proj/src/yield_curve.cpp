#include "gmwb/yield_curve.hpp"

#include <cmath>
#include <stdexcept>

namespace gmwb {

void SvenssonCurve::validate() const {
    if (!(tau1 > 0.0) || !(tau2 > 0.0))
        throw std::invalid_argument("SvenssonCurve: tau1 and tau2 must be strictly positive");
}

void HullWhiteParams::validate() const {
    if (!(a > 0.0))
        throw std::invalid_argument("HullWhiteParams: mean reversion a must be strictly positive");
    if (sigma_r < 0.0)
        throw std::invalid_argument("HullWhiteParams: sigma_r must be nonnegative");
}

double forward_rate(const SvenssonCurve& c, double maturity) {
    if (maturity < 0.0) throw std::invalid_argument("forward_rate: maturity must be >= 0");
    const double e1 = std::exp(-maturity / c.tau1);
    const double e2 = std::exp(-maturity / c.tau2);
    return c.beta0 + c.beta1 * e1 + c.beta2 / c.tau1 * maturity * e1 +
           c.beta3 / c.tau2 * maturity * e2;
}

double forward_rate_slope(const SvenssonCurve& c, double maturity) {
    if (maturity < 0.0) throw std::invalid_argument("forward_rate_slope: maturity must be >= 0");
    const double e1 = std::exp(-maturity / c.tau1);
    const double e2 = std::exp(-maturity / c.tau2);
    return -c.beta1 / c.tau1 * e1 + c.beta2 / c.tau1 * (1.0 - maturity / c.tau1) * e1 +
           c.beta3 / c.tau2 * (1.0 - maturity / c.tau2) * e2;
}

double yield(const SvenssonCurve& c, double maturity) {
    if (!(maturity > 0.0)) throw std::domain_error("yield: maturity must be > 0");
    // (1/T) \int_0^T f dt with \int_0^T t e^{-t/tau} dt = tau^2 (1 - e^{-T/tau}) - tau T e^{-T/tau}.
    const double e1 = std::exp(-maturity / c.tau1);
    const double e2 = std::exp(-maturity / c.tau2);
    const double w1 = c.tau1 * (1.0 - e1) / maturity;
    const double w2 = c.tau2 * (1.0 - e2) / maturity;
    return c.beta0 + (c.beta1 + c.beta2) * w1 - c.beta2 * e1 + c.beta3 * (w2 - e2);
}

double market_discount(const SvenssonCurve& c, double maturity) {
    if (maturity < 0.0) throw std::invalid_argument("market_discount: maturity must be >= 0");
    if (maturity == 0.0) return 1.0;
    return std::exp(-maturity * yield(c, maturity));
}

double theta(const SvenssonCurve& c, const HullWhiteParams& hw, double t) {
    return forward_rate_slope(c, t) + hw.a * forward_rate(c, t) +
           hw.sigma_r * hw.sigma_r / (2.0 * hw.a) * (1.0 - std::exp(-2.0 * hw.a * t));
}

double bond_b(const HullWhiteParams& hw, double t, double maturity) {
    return (1.0 - std::exp(-hw.a * (maturity - t))) / hw.a;
}

double bond_price(const SvenssonCurve& c, const HullWhiteParams& hw, double t, double maturity,
                  double short_rate) {
    if (t > maturity) throw std::domain_error("bond_price: requires t <= maturity");
    if (t == maturity) return 1.0;
    const double b = bond_b(hw, t, maturity);
    const double log_a = std::log(market_discount(c, maturity) / market_discount(c, t)) +
                         b * forward_rate(c, t) -
                         hw.sigma_r * hw.sigma_r / (4.0 * hw.a) *
                             (1.0 - std::exp(-2.0 * hw.a * t)) * b * b;
    return std::exp(log_a - b * short_rate);
}

}  // namespace gmwb
