#include "gmwb/mortality.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gmwb {

MortalityTable::MortalityTable(int first_age, std::vector<double> qx, std::string label)
    : first_age_(first_age), qx_(std::move(qx)), label_(std::move(label)) {
    for (double q : qx_)
        if (q < 0.0 || q > 1.0)
            throw std::invalid_argument("MortalityTable: qx must lie in [0,1]");
}

MortalityTable MortalityTable::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("MortalityTable: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("MortalityTable: empty file " + path);

    int first_age = -1;
    int expected_age = -1;
    std::vector<double> qx;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string age_field, qx_field;
        if (!std::getline(row, age_field, ',') || !std::getline(row, qx_field, ','))
            throw std::runtime_error("MortalityTable: malformed row '" + line + "' in " + path);
        const int age = std::stoi(age_field);
        const double q = std::stod(qx_field);
        if (first_age < 0) {
            first_age = age;
            expected_age = age;
        }
        if (age != expected_age)
            throw std::runtime_error("MortalityTable: ages must be contiguous in " + path);
        ++expected_age;
        qx.push_back(q);
    }
    if (qx.empty()) throw std::runtime_error("MortalityTable: no rows in " + path);
    return MortalityTable(first_age, std::move(qx), path);
}

MortalityTable MortalityTable::no_mortality() {
    return MortalityTable(0, std::vector<double>(140, 0.0), "no-mortality");
}

double MortalityTable::qx(int age) const {
    const int idx = age - first_age_;
    if (idx < 0 || idx >= static_cast<int>(qx_.size()))
        throw std::out_of_range("MortalityTable: age " + std::to_string(age) +
                                " outside table range");
    return qx_[static_cast<size_t>(idx)];
}

double MortalityTable::survival(int start_age, int anniversary) const {
    if (anniversary < 1)
        throw std::invalid_argument("MortalityTable::survival: anniversary must be >= 1");
    return 1.0 - qx(start_age + anniversary - 1);
}

bool MortalityTable::covers(int start_age, int horizon_years) const {
    return start_age >= first_age_ && start_age + horizon_years - 1 <= last_age();
}

}  // namespace gmwb
