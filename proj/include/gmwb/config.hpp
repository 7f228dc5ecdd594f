#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gmwb/account_grid.hpp"
#include "gmwb/contract.hpp"
#include "gmwb/market.hpp"
#include "gmwb/monte_carlo.hpp"
#include "gmwb/mortality.hpp"

namespace gmwb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One engine run: market scenario, contract terms, discretization, mortality and
// simulation settings. Percent-valued fields carry a _pct suffix in the file and are
// converted to decimals here, at the boundary.
struct RunConfig {
    std::string scenario_name;
    MarketModel market;
    ContractSpec contract;
    AccountGrid grid;
    int steps_per_year = 2;
    std::string mortality_table_path;  // relative paths resolve against the config file
    int start_age = 65;
    bool mortality_enabled = true;
    SimulationConfig mc;
    std::map<std::string, std::vector<double>> sweep_axes;  // decimal values
    std::uint64_t hash = 0;  // FNV-1a of the effective JSON, for output provenance

    MortalityTable load_mortality() const;
};

/// Parses a JSON config file, applies dotted-path overrides ("contract.fee_pct=13.51"),
/// and validates every cross-field constraint before returning. Violations carry the
/// offending field names.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Same, from a JSON string (paths resolve against base_dir).
RunConfig parse_config(const std::string& json_text, const std::string& base_dir,
                       const std::vector<std::string>& overrides = {});

}  // namespace gmwb
