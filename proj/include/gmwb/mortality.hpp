#pragma once

#include <string>
#include <vector>

namespace gmwb {

// One-year death probabilities qx by attained age, period-table lookup.
class MortalityTable {
  public:
    MortalityTable() = default;
    MortalityTable(int first_age, std::vector<double> qx, std::string label = {});

    // Loads a CSV file with header "age,qx" and contiguous integer ages.
    static MortalityTable load_csv(const std::string& path);

    // Table with qx identically zero over a wide age span.
    static MortalityTable no_mortality();

    double qx(int age) const;

    // One-year survival probability over (n-1, n] for a holder aged start_age at inception:
    // pi_n = 1 - qx(start_age + n - 1).
    double survival(int start_age, int anniversary) const;

    bool covers(int start_age, int horizon_years) const;
    int first_age() const { return first_age_; }
    int last_age() const { return first_age_ + static_cast<int>(qx_.size()) - 1; }
    const std::string& label() const { return label_; }
    bool empty() const { return qx_.empty(); }

  private:
    int first_age_ = 0;
    std::vector<double> qx_;
    std::string label_;
};

}  // namespace gmwb
