#pragma once

namespace gmwb {

// Svensson parametrization of the instantaneous forward curve,
//   f(0,T) = b0 + b1 e^{-T/tau1} + (b2/tau1) T e^{-T/tau1} + (b3/tau2) T e^{-T/tau2}.
// All coefficients are decimal annualized rates (0.02 == 2%), tau1/tau2 in years.
struct SvenssonCurve {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double tau1 = 1.0;
    double tau2 = 1.0;

    static SvenssonCurve flat(double rate) { return SvenssonCurve{rate, 0.0, 0.0, 0.0, 1.0, 1.0}; }

    void validate() const;
};

// One-factor Gaussian short-rate parameters, dr = (theta(t) - a r) dt + sigma_r dW.
// r0 is an independent input: it is not forced to equal the curve's f(0,0).
struct HullWhiteParams {
    double a = 0.10;        // mean-reversion speed, 1/years, > 0
    double sigma_r = 0.02;  // annualized rate volatility, >= 0
    double r0 = 0.0;        // initial short rate (may be negative)

    void validate() const;
};

/// Instantaneous forward rate f(0,T). At T = 0 this equals beta0 + beta1.
double forward_rate(const SvenssonCurve& curve, double maturity);

/// Analytic slope d f(0,T) / dT of the Svensson forward curve:
///   f'(T) = -(b1/tau1) e^{-T/tau1} + (b2/tau1)(1 - T/tau1) e^{-T/tau1}
///         + (b3/tau2)(1 - T/tau2) e^{-T/tau2}.
double forward_rate_slope(const SvenssonCurve& curve, double maturity);

/// Continuously compounded spot yield y(0,T) = (1/T) \int_0^T f(0,t) dt, closed form.
/// Requires T > 0; use forward_rate(curve, 0) for the short end.
double yield(const SvenssonCurve& curve, double maturity);

/// Market discount factor p(0,T) = exp(-T y(0,T)); equals 1 at T = 0.
double market_discount(const SvenssonCurve& curve, double maturity);

/// Fitted long-run drift level theta(t) = f'(0,t) + a f(0,t) + sigma_r^2/(2a) (1 - e^{-2at}).
double theta(const SvenssonCurve& curve, const HullWhiteParams& hw, double t);

/// B(t,T) = (1 - e^{-a(T-t)}) / a.
double bond_b(const HullWhiteParams& hw, double t, double maturity);

/// Zero-coupon bond price p(t,T) = A(t,T) exp(-B(t,T) r_t) under the fitted model.
/// Reprices the market curve at t = 0 when r_t = f(0,0).
double bond_price(const SvenssonCurve& curve, const HullWhiteParams& hw, double t,
                  double maturity, double short_rate);

}  // namespace gmwb
