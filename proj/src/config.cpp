#include "gmwb/config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace gmwb {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

const json& member(const json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError("config: missing field " + ctx + "." + key);
    return *it;
}

double number(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = member(j, key, ctx);
    if (!v.is_number()) throw ConfigError("config: " + ctx + "." + key + " must be a number");
    return v.get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
    auto it = j.find(key);
    return it == j.end() ? fallback : it->get<double>();
}

// Sets a dotted path like contract.fee_pct to a parsed scalar.
void apply_override(json& j, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("config: override must look like section.key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json* node = &j;
    std::istringstream keys(path);
    std::string key;
    std::vector<std::string> parts;
    while (std::getline(keys, key, '.')) parts.push_back(key);
    if (parts.empty()) throw ConfigError("config: empty override path: " + assignment);
    for (size_t k = 0; k + 1 < parts.size(); ++k) node = &(*node)[parts[k]];
    json value;
    if (raw == "true" || raw == "false") {
        value = (raw == "true");
    } else {
        try {
            size_t used = 0;
            const double d = std::stod(raw, &used);
            if (used == raw.size())
                value = d;
            else
                value = raw;
        } catch (const std::exception&) {
            value = raw;
        }
    }
    (*node)[parts.back()] = value;
}

StepUp parse_step_up(const std::string& text) {
    if (text == "none") return StepUp::none;
    if (text == "w_su") return StepUp::withdraw_then_step_up;
    if (text == "su_w") return StepUp::step_up_then_withdraw;
    throw ConfigError("config: contract.step_up must be one of none|w_su|su_w, got " + text);
}

Scheme parse_scheme(const std::string& text) {
    if (text == "S") return Scheme::static_only;
    if (text == "S+S") return Scheme::static_with_surrender;
    if (text == "D") return Scheme::dynamic;
    throw ConfigError("config: contract.scheme must be one of S|S+S|D, got " + text);
}

}  // namespace

MortalityTable RunConfig::load_mortality() const {
    if (!mortality_enabled) return MortalityTable::no_mortality();
    return MortalityTable::load_csv(mortality_table_path);
}

RunConfig parse_config(const std::string& json_text, const std::string& base_dir,
                       const std::vector<std::string>& overrides) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    for (const auto& assignment : overrides) apply_override(j, assignment);

    RunConfig cfg;
    cfg.hash = fnv1a(j.dump());

    const json& scenario = member(j, "scenario", "");
    cfg.scenario_name = scenario.value("name", "unnamed");
    const json& sv = member(scenario, "svensson", "scenario");
    cfg.market.curve.beta0 = number(sv, "beta0_pct", "scenario.svensson") / 100.0;
    cfg.market.curve.beta1 = number(sv, "beta1_pct", "scenario.svensson") / 100.0;
    cfg.market.curve.beta2 = number(sv, "beta2_pct", "scenario.svensson") / 100.0;
    cfg.market.curve.beta3 = number(sv, "beta3_pct", "scenario.svensson") / 100.0;
    cfg.market.curve.tau1 = number(sv, "tau1", "scenario.svensson");
    cfg.market.curve.tau2 = number(sv, "tau2", "scenario.svensson");
    const json& hw = member(scenario, "hull_white", "scenario");
    cfg.market.hw.a = number(hw, "a", "scenario.hull_white");
    cfg.market.hw.sigma_r = number(hw, "sigma_r_pct", "scenario.hull_white") / 100.0;
    cfg.market.hw.r0 = number(hw, "r0_pct", "scenario.hull_white") / 100.0;
    const json& eq = member(scenario, "equity", "scenario");
    cfg.market.equity.sigma_s = number(eq, "sigma_s_pct", "scenario.equity") / 100.0;
    cfg.market.equity.q = number(eq, "q_pct", "scenario.equity") / 100.0;
    cfg.market.equity.rho = number(eq, "rho_pct", "scenario.equity") / 100.0;
    cfg.market.equity.s0 = number_or(eq, "s0", 100.0);

    const json& ct = member(j, "contract", "");
    cfg.contract.premium = number(ct, "premium", "contract");
    cfg.contract.maturity = static_cast<int>(number(ct, "maturity_years", "contract"));
    cfg.contract.guarantee =
        number_or(ct, "guaranteed_amount",
                  cfg.contract.premium / std::max(cfg.contract.maturity, 1));
    cfg.contract.fee = number(ct, "fee_pct", "contract") / 100.0;
    const json& pen = member(ct, "penalty_pct", "contract");
    if (pen.is_number()) {
        cfg.contract.penalty.assign(static_cast<size_t>(cfg.contract.maturity),
                                    pen.get<double>() / 100.0);
    } else if (pen.is_array()) {
        for (const auto& v : pen) cfg.contract.penalty.push_back(v.get<double>() / 100.0);
    } else {
        throw ConfigError("config: contract.penalty_pct must be a number or an array");
    }
    cfg.contract.bonus = number_or(ct, "bonus", 0.0);
    cfg.contract.step_up = parse_step_up(ct.value("step_up", "none"));
    cfg.contract.surrender_allowed = ct.value("surrender_allowed", true);
    cfg.contract.scheme = parse_scheme(ct.value("scheme", "D"));

    const json& grid = member(j, "grid", "");
    cfg.steps_per_year = static_cast<int>(number(grid, "steps_per_year", "grid"));
    cfg.grid.n_a = static_cast<int>(number(grid, "n_a", "grid"));
    cfg.grid.n_b = static_cast<int>(number(grid, "n_b", "grid"));
    cfg.grid.delta_a = number(grid, "a_max", "grid") / cfg.grid.n_a;
    cfg.grid.delta_b = number(grid, "b_max", "grid") / cfg.grid.n_b;

    const json& mort = member(j, "mortality", "");
    cfg.mortality_enabled = mort.value("enabled", true);
    cfg.start_age = static_cast<int>(number_or(mort, "start_age", 65));
    if (cfg.mortality_enabled) {
        std::filesystem::path table(member(mort, "table", "mortality").get<std::string>());
        if (table.is_relative()) table = std::filesystem::path(base_dir) / table;
        cfg.mortality_table_path = table.string();
    }

    if (auto it = j.find("monte_carlo"); it != j.end()) {
        cfg.mc.n_paths = static_cast<std::int64_t>(number_or(*it, "n_paths", 100000));
        cfg.mc.seed = static_cast<std::uint64_t>(number_or(*it, "seed", 1));
        cfg.mc.antithetic = it->value("antithetic", false);
    }

    if (auto it = j.find("sweep"); it != j.end()) {
        for (const auto& [axis, values] : it->items()) {
            if (!values.is_array())
                throw ConfigError("config: sweep." + axis + " must be an array");
            auto& dst = cfg.sweep_axes[axis];
            const bool pct = axis.size() > 4 && axis.ends_with("_pct");
            for (const auto& v : values) dst.push_back(v.get<double>() / (pct ? 100.0 : 1.0));
        }
    }

    // Cross-field checks, reported with field names before any computation starts.
    try {
        cfg.market.validate();
        cfg.contract.validate();
        cfg.grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (cfg.steps_per_year < 1) throw ConfigError("config: grid.steps_per_year must be >= 1");
    if (static_cast<int>(cfg.contract.penalty.size()) != cfg.contract.maturity)
        throw ConfigError("config: contract.penalty_pct length must equal maturity_years");
    if (!on_lattice(cfg.contract.guarantee, cfg.grid.delta_b))
        throw ConfigError(
            "config: contract.guaranteed_amount must be a multiple of grid.b_max/n_b");
    if (!on_lattice(cfg.contract.premium, cfg.grid.delta_b))
        throw ConfigError("config: contract.premium must be a multiple of grid.b_max/n_b");
    if (cfg.contract.premium > cfg.grid.b_max() + 1e-9 ||
        cfg.contract.premium > cfg.grid.a_max() + 1e-9)
        throw ConfigError("config: contract.premium must lie inside grid.a_max and grid.b_max");
    const bool b_growing = cfg.contract.step_up != StepUp::none || cfg.contract.bonus > 0.0;
    if (b_growing && std::abs(cfg.grid.delta_a - cfg.grid.delta_b) > 1e-12)
        throw ConfigError(
            "config: step_up/bonus requires grid.a_max/n_a == grid.b_max/n_b (delta_a == "
            "delta_b)");
    if (cfg.contract.step_up != StepUp::none &&
        std::abs(cfg.grid.a_max() - cfg.grid.b_max()) > 1e-9)
        throw ConfigError("config: step_up requires grid.a_max == grid.b_max");
    if (cfg.contract.bonus > 0.0 && !on_lattice(cfg.contract.bonus, cfg.grid.delta_b))
        throw ConfigError("config: contract.bonus must be a multiple of grid.b_max/n_b");
    if (cfg.mortality_enabled && cfg.mortality_table_path.empty())
        throw ConfigError("config: mortality.table is required when mortality.enabled");
    if (cfg.mc.n_paths < 2) throw ConfigError("config: monte_carlo.n_paths must be >= 2");

    return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), std::filesystem::path(path).parent_path().string(),
                        overrides);
}

}  // namespace gmwb
