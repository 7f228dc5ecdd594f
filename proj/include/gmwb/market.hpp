#pragma once

#include <stdexcept>

#include "gmwb/yield_curve.hpp"

namespace gmwb {

struct EquityParams {
    double sigma_s = 0.20;  // fund volatility (annualized, decimal)
    double q = 0.02;        // dividend yield
    double rho = 0.50;      // correlation between fund and rate drivers
    double s0 = 100.0;      // initial fund level; prices depend on returns only

    void validate() const {
        if (sigma_s < 0.0) throw std::invalid_argument("equity: sigma_s must be nonnegative");
        if (rho < -1.0 || rho > 1.0) throw std::invalid_argument("equity: rho must be in [-1,1]");
        if (!(s0 > 0.0)) throw std::invalid_argument("equity: s0 must be positive");
    }
};

struct MarketModel {
    SvenssonCurve curve;
    HullWhiteParams hw;
    EquityParams equity;

    void validate() const {
        curve.validate();
        hw.validate();
        equity.validate();
    }
};

}  // namespace gmwb
