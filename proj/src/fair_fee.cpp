#include "gmwb/fair_fee.hpp"

#include <cmath>
#include <stdexcept>

namespace gmwb {

FairFeeResult solve_fair_fee(const GmwbPricer& pricer, ContractSpec spec, double tolerance,
                             double alpha_hi, int max_iterations) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("solve_fair_fee: tolerance must be > 0");
    const double target = spec.premium;

    const auto value_at = [&](double alpha) {
        spec.fee = alpha;
        return pricer.value(spec).value0;
    };

    FairFeeResult result;
    result.bracket_lo = 0.0;
    result.bracket_hi = alpha_hi;

    double v_lo = value_at(0.0);
    ++result.iterations;
    if (v_lo < target - tolerance) {
        // Unsellable at par: even a zero fee leaves the contract below the premium.
        result.alpha_fair = 0.0;
        result.achieved_value = v_lo;
        result.bracketed = false;
        return result;
    }
    double v_hi = value_at(alpha_hi);
    ++result.iterations;
    if (v_hi > target + tolerance) {
        result.alpha_fair = alpha_hi;
        result.achieved_value = v_hi;
        result.bracketed = false;
        return result;
    }
    result.bracketed = true;

    double lo = 0.0, hi = alpha_hi;
    double alpha = 0.5 * (lo + hi);
    double value = v_lo;
    for (int it = 0; it < max_iterations; ++it) {
        alpha = 0.5 * (lo + hi);
        value = value_at(alpha);
        ++result.iterations;
        if (std::abs(value - target) <= tolerance) break;
        if (value > target)
            lo = alpha;
        else
            hi = alpha;
    }
    result.alpha_fair = alpha;
    result.achieved_value = value;
    result.bracket_lo = lo;
    result.bracket_hi = hi;
    return result;
}

}  // namespace gmwb
