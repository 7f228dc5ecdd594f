#pragma once

#include "gmwb/dp_engine.hpp"

namespace gmwb {

struct FairFeeResult {
    double alpha_fair = 0.0;
    double achieved_value = 0.0;
    int iterations = 0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    bool bracketed = false;  // false when the contract is worth less than par at zero fee
};

// Bisects the management fee until the contract value matches the premium within
// tolerance (in currency units). The value is monotone nonincreasing in the fee, which
// the endpoint evaluation verifies; an unbracketed root is reported, not thrown.
FairFeeResult solve_fair_fee(const GmwbPricer& pricer, ContractSpec spec,
                             double tolerance = 0.01, double alpha_hi = 0.60,
                             int max_iterations = 80);

}  // namespace gmwb
