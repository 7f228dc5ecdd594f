// Batch front end: loads a JSON run configuration and dispatches valuation,
// calibration, decomposition, sweep, policy-export and validation commands.
// All outputs are CSV files under --out with a provenance header line.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "gmwb/config.hpp"
#include "gmwb/dp_engine.hpp"
#include "gmwb/fair_fee.hpp"
#include "gmwb/monte_carlo.hpp"
#include "gmwb/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    int threads = 0;
    long long seed = -1;
};

std::ofstream open_report(const CommonArgs& args, const gmwb::RunConfig& cfg,
                          const std::string& name, bool append = false) {
    fs::create_directories(args.out_dir);
    const fs::path path = fs::path(args.out_dir) / name;
    const bool existed = fs::exists(path) && fs::file_size(path) > 0;
    std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open report file " + path.string());
    if (!append || !existed) {
        out << "# gmwb " << gmwb::kEngineVersion << " scenario=" << cfg.scenario_name
            << " config_hash=" << std::hex << cfg.hash << std::dec << "\n";
    }
    out << std::setprecision(10);
    return out;
}

gmwb::RunConfig load(const CommonArgs& args) {
    auto cfg = gmwb::load_config(args.config_path, args.overrides);
    if (args.seed >= 0) cfg.mc.seed = static_cast<std::uint64_t>(args.seed);
    return cfg;
}

gmwb::GmwbPricer make_pricer(const gmwb::RunConfig& cfg, const gmwb::MortalityTable& mortality,
                             int threads) {
    gmwb::DpOptions opts;
    opts.steps_per_year = cfg.steps_per_year;
    opts.n_threads = threads;
    return gmwb::GmwbPricer(cfg.market, cfg.grid, mortality, cfg.start_age,
                            cfg.contract.maturity, opts);
}

const char* step_up_name(gmwb::StepUp s) {
    switch (s) {
        case gmwb::StepUp::none: return "none";
        case gmwb::StepUp::withdraw_then_step_up: return "w_su";
        case gmwb::StepUp::step_up_then_withdraw: return "su_w";
    }
    return "?";
}

const char* scheme_name(gmwb::Scheme s) {
    switch (s) {
        case gmwb::Scheme::static_only: return "S";
        case gmwb::Scheme::static_with_surrender: return "S+S";
        case gmwb::Scheme::dynamic: return "D";
    }
    return "?";
}

void dump_lattice(const gmwb::RateLattice& lattice, const std::string& path) {
    std::ofstream out(path);
    out << "step,level,rate,up_prob\n" << std::setprecision(12);
    for (int k = 0; k <= lattice.n_steps(); ++k) {
        for (int j = 0; j <= k; ++j) {
            out << k << ',' << j << ',' << lattice.rate(k, j) << ',';
            if (k < lattice.n_steps()) out << lattice.up_prob(k, j);
            out << '\n';
        }
    }
}

int cmd_price(const CommonArgs& args, const std::string& lattice_dump) {
    const auto cfg = load(args);
    const auto mortality = cfg.load_mortality();
    const auto pricer = make_pricer(cfg, mortality, args.threads);
    if (!lattice_dump.empty()) dump_lattice(pricer.lattice(), lattice_dump);

    auto out = open_report(args, cfg, "price.csv");
    out << "scenario,scheme,step_up,bonus,alpha_pct,beta_pct,value\n";
    for (gmwb::Scheme scheme : {gmwb::Scheme::static_only, gmwb::Scheme::static_with_surrender,
                                gmwb::Scheme::dynamic}) {
        gmwb::ContractSpec spec = cfg.contract;
        spec.scheme = scheme;
        if (scheme == gmwb::Scheme::static_with_surrender && !spec.surrender_allowed) continue;
        const double value = pricer.value(spec).value0;
        out << cfg.scenario_name << ',' << scheme_name(scheme) << ','
            << step_up_name(spec.step_up) << ',' << spec.bonus << ',' << 100.0 * spec.fee << ','
            << 100.0 * spec.penalty_at(1) << ',' << value << '\n';
        std::cout << scheme_name(scheme) << " value = " << value << '\n';
    }
    return 0;
}

int cmd_fair_fee(const CommonArgs& args, double tolerance) {
    const auto cfg = load(args);
    const auto mortality = cfg.load_mortality();
    const auto pricer = make_pricer(cfg, mortality, args.threads);
    const auto result = gmwb::solve_fair_fee(pricer, cfg.contract, tolerance);

    auto out = open_report(args, cfg, "fair_fee.csv", /*append=*/true);
    out << cfg.scenario_name << ',' << scheme_name(cfg.contract.scheme) << ','
        << step_up_name(cfg.contract.step_up) << ',' << 100.0 * cfg.contract.penalty_at(1) << ','
        << 100.0 * result.alpha_fair << ',' << result.achieved_value << ',' << result.iterations
        << ',' << (result.bracketed ? "ok" : "unsellable_at_par") << '\n';
    std::cout << "fair fee = " << 100.0 * result.alpha_fair << "% (value "
              << result.achieved_value << ", " << result.iterations << " valuations"
              << (result.bracketed ? "" : ", NOT bracketed") << ")\n";
    return result.bracketed ? 0 : 2;
}

int cmd_decompose(const CommonArgs& args) {
    const auto cfg = load(args);
    const auto mortality = cfg.load_mortality();

    // The no-step-up leg only needs the benefit axis up to the premium.
    gmwb::AccountGrid grid_no = cfg.grid;
    grid_no.n_b = static_cast<int>(std::lround(cfg.contract.premium / cfg.grid.delta_b));
    gmwb::AccountGrid grid_su = cfg.grid;

    gmwb::DpOptions opts;
    opts.steps_per_year = cfg.steps_per_year;
    opts.n_threads = args.threads;
    const auto d = gmwb::value_decomposition(cfg.market, cfg.contract, grid_su, grid_no,
                                             mortality, cfg.start_age, opts);
    auto out = open_report(args, cfg, "decompose.csv");
    out << "scenario,cb,time_value_pct,gmwb_pct,step_up_pct,value_step_up,value_no_step_up\n";
    out << cfg.scenario_name << ',' << d.cb << ',' << d.time_value_pct << ',' << d.gmwb_pct
        << ',' << d.step_up_pct << ',' << d.value_step_up << ',' << d.value_no_step_up << '\n';
    std::cout << "CB = " << d.cb << ", time value " << d.time_value_pct << "%, GMWB "
              << d.gmwb_pct << "%, step-up " << d.step_up_pct << "%\n";
    return 0;
}

int cmd_policy(const CommonArgs& args, int date, int levels, const std::string& what) {
    const auto cfg = load(args);
    if (date < 1 || date >= cfg.contract.maturity)
        throw std::runtime_error("policy: --date must lie in 1..maturity-1");
    const auto mortality = cfg.load_mortality();
    const auto pricer = make_pricer(cfg, mortality, args.threads);
    const auto result = pricer.value(cfg.contract, /*keep_surfaces=*/true);

    const int step = date * cfg.steps_per_year;
    const int n_levels = step + 1;
    const int center = (step + 1) / 2;
    const int half = levels / 2;
    fs::create_directories(args.out_dir);

    for (int l = center - half; l <= center + half; ++l) {
        if (l < 0 || l >= n_levels) continue;
        const double rate = pricer.lattice().rate(step, l);
        std::ostringstream name;
        name << what << "_t" << date << "_r" << std::fixed << std::setprecision(2)
             << 100.0 * rate << "pct.csv";
        auto out = open_report(args, cfg, name.str());
        const auto& policy = result.policy[static_cast<size_t>(date - 1)][static_cast<size_t>(l)];
        const auto& values = result.values[static_cast<size_t>(date - 1)][static_cast<size_t>(l)];
        const auto& sur = result.surrender[static_cast<size_t>(date - 1)][static_cast<size_t>(l)];
        out << "b";
        for (int i = 0; i <= cfg.grid.n_a; ++i) out << ',' << cfg.grid.a(i);
        out << '\n';
        for (int j = 0; j <= cfg.grid.n_b; ++j) {
            out << cfg.grid.b(j);
            for (int i = 0; i <= cfg.grid.n_a; ++i) {
                out << ',';
                if (what == "values") {
                    out << values(i, j);
                } else if (sur(i, j)) {
                    out << -1.0;  // surrender region
                } else {
                    out << policy(i, j);
                }
            }
            out << '\n';
        }
        std::cout << "wrote " << name.str() << " (r = " << 100.0 * rate << "%)\n";
    }
    return 0;
}

int cmd_validate(const CommonArgs& args) {
    const auto cfg = load(args);
    const auto mortality = cfg.load_mortality();
    const auto pricer = make_pricer(cfg, mortality, args.threads);

    gmwb::SimulationConfig mc = cfg.mc;
    mc.n_threads = args.threads;

    auto out = open_report(args, cfg, "validate.csv");
    out << "scenario,check,dp_value,mc_value,mc_half_width,inside_ci\n";

    gmwb::ContractSpec s_spec = cfg.contract;
    s_spec.scheme = gmwb::Scheme::static_only;
    const double dp_s = pricer.value(s_spec).value0;
    const auto mc_s = gmwb::price_static(cfg.market, s_spec, mortality, cfg.start_age, mc);
    const bool ok_s = std::abs(dp_s - mc_s.mean) <= mc_s.half_width_95;
    out << cfg.scenario_name << ",static_vs_mc," << dp_s << ',' << mc_s.mean << ','
        << mc_s.half_width_95 << ',' << (ok_s ? 1 : 0) << '\n';
    std::cout << "S: dp " << dp_s << " vs mc " << mc_s.mean << " +- " << mc_s.half_width_95
              << (ok_s ? " [inside]" : " [outside]") << '\n';

    gmwb::ContractSpec ss_spec = cfg.contract;
    ss_spec.scheme = gmwb::Scheme::static_with_surrender;
    ss_spec.surrender_allowed = true;
    const double dp_ss = pricer.value(ss_spec).value0;
    const auto lsm = gmwb::price_lsm(cfg.market, ss_spec, mortality, cfg.start_age, mc);
    const bool ok_ss = std::abs(dp_ss - lsm.mean) <= std::max(lsm.half_width_95, 0.21);
    out << cfg.scenario_name << ",surrender_vs_lsm," << dp_ss << ',' << lsm.mean << ','
        << lsm.half_width_95 << ',' << (ok_ss ? 1 : 0) << '\n';
    std::cout << "S+S: dp " << dp_ss << " vs lsm " << lsm.mean << " +- " << lsm.half_width_95
              << (ok_ss ? " [inside]" : " [outside]") << '\n';
    return (ok_s && ok_ss) ? 0 : 2;
}

// Cartesian sweep over the configured axes, resumable through a progress file that
// lists finished points; progress writes are atomic (write then rename).
int cmd_sweep(const CommonArgs& args) {
    const auto cfg = load(args);
    if (cfg.sweep_axes.empty()) throw std::runtime_error("sweep: config has no sweep block");
    const auto mortality = cfg.load_mortality();

    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> axis_values;
    for (const auto& [name, values] : cfg.sweep_axes) {
        axis_names.push_back(name);
        axis_values.push_back(values);
    }

    const fs::path progress_path = fs::path(args.out_dir) / "sweep_progress.json";
    std::set<std::string> done;
    if (fs::exists(progress_path)) {
        std::ifstream in(progress_path);
        json j = json::parse(in, nullptr, false);
        if (!j.is_discarded() && j.contains("done"))
            for (const auto& key : j["done"]) done.insert(key.get<std::string>());
    }
    const auto save_progress = [&] {
        json j;
        j["done"] = done;
        const fs::path tmp = progress_path.string() + ".tmp";
        std::ofstream out(tmp);
        out << j.dump();
        out.close();
        fs::rename(tmp, progress_path);
    };

    auto out = open_report(args, cfg, "sweep.csv", /*append=*/true);
    if (done.empty())
        out << "scenario,scheme," << [&] {
            std::string header;
            for (const auto& n : axis_names) header += n + ",";
            return header;
        }() << "value\n";

    std::vector<size_t> idx(axis_names.size(), 0);
    std::map<std::string, gmwb::GmwbPricer> pricer_cache;
    bool more = true;
    while (more) {
        std::ostringstream key;
        gmwb::RunConfig point = cfg;
        for (size_t ax = 0; ax < axis_names.size(); ++ax) {
            const double v = axis_values[ax][idx[ax]];
            const std::string& name = axis_names[ax];
            key << name << '=' << v << ';';
            if (name == "alpha_pct")
                point.contract.fee = v;
            else if (name == "beta_pct")
                point.contract.penalty.assign(point.contract.penalty.size(), v);
            else if (name == "sigma_s_pct")
                point.market.equity.sigma_s = v;
            else if (name == "sigma_r_pct")
                point.market.hw.sigma_r = v;
            else if (name == "rho_pct")
                point.market.equity.rho = v;
            else if (name == "a")
                point.market.hw.a = v;
            else
                throw std::runtime_error("sweep: unsupported axis " + name);
        }
        if (!done.count(key.str())) {
            std::ostringstream market_key;
            market_key << point.market.hw.a << '|' << point.market.hw.sigma_r << '|'
                       << point.market.equity.rho;
            auto it = pricer_cache.find(market_key.str());
            if (it == pricer_cache.end())
                it = pricer_cache
                         .emplace(market_key.str(), make_pricer(point, mortality, args.threads))
                         .first;
            const double value = it->second.value(point.contract).value0;
            out << cfg.scenario_name << ',' << scheme_name(point.contract.scheme) << ',';
            for (size_t ax = 0; ax < axis_names.size(); ++ax)
                out << axis_values[ax][idx[ax]] << ',';
            out << value << '\n';
            out.flush();
            done.insert(key.str());
            save_progress();
            std::cout << key.str() << " value = " << value << '\n';
        }
        // advance the mixed-radix counter
        more = false;
        for (size_t ax = axis_names.size(); ax-- > 0;) {
            if (++idx[ax] < axis_values[ax].size()) {
                more = true;
                break;
            }
            idx[ax] = 0;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GMWB variable annuity valuation engine"};
    app.require_subcommand(1);

    CommonArgs args;
    app.add_option("--config", args.config_path, "run configuration (JSON)")->required();
    app.add_option("--out", args.out_dir, "output directory for CSV reports");
    app.add_option("--set", args.overrides, "override config fields, e.g. contract.fee_pct=13.51");
    app.add_option("--threads", args.threads, "worker threads (0 = all cores)");
    app.add_option("--seed", args.seed, "Monte Carlo seed override");

    auto* price = app.add_subcommand("price", "value the contract under the S, S+S, D schemes");
    std::string lattice_dump;
    price->add_option("--dump-lattice", lattice_dump, "write the rate lattice to a CSV file");

    auto* fair = app.add_subcommand("fair-fee", "calibrate the management fee to par");
    double tolerance = 0.01;
    fair->add_option("--tolerance", tolerance, "par tolerance in currency units");

    app.add_subcommand("decompose", "split the step-up value into CB/GMWB/step-up parts");

    auto* policy = app.add_subcommand("policy", "export optimal-withdrawal matrices to CSV");
    int policy_date = 5, policy_levels = 3;
    std::string policy_what = "policy";
    policy->add_option("--date", policy_date, "anniversary date to export")->required();
    policy->add_option("--levels", policy_levels, "number of central rate nodes");
    policy->add_option("--export", policy_what, "policy|values");

    app.add_subcommand("validate", "compare the lattice engine against Monte Carlo oracles");
    app.add_subcommand("sweep", "run the parameter sweep defined in the config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("price")) return cmd_price(args, lattice_dump);
        if (app.got_subcommand("fair-fee")) return cmd_fair_fee(args, tolerance);
        if (app.got_subcommand("decompose")) return cmd_decompose(args);
        if (app.got_subcommand("policy"))
            return cmd_policy(args, policy_date, policy_levels, policy_what);
        if (app.got_subcommand("validate")) return cmd_validate(args);
        if (app.got_subcommand("sweep")) return cmd_sweep(args);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
