// esgrisk: utility-based financial/ESG risk measurement from the command line.
//
// Subcommands: calibrate, simulate, risk, premium, shift-curve, optimize,
// backtest. All outputs are plot-ready CSV; every command is deterministic
// given its inputs, --seed and --config.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "esgrisk/calibration.hpp"
#include "esgrisk/config.hpp"
#include "esgrisk/csv_io.hpp"
#include "esgrisk/errors.hpp"
#include "esgrisk/portfolio.hpp"
#include "esgrisk/risk.hpp"
#include "esgrisk/scenarios.hpp"
#include "esgrisk/stats.hpp"
#include "esgrisk/utility.hpp"

namespace fs = std::filesystem;
using namespace esgrisk;

namespace {

struct SharedFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> samples;
    bool dry_run = false;
    bool json_errors = false;
};

void add_shared(CLI::App* cmd, SharedFlags& shared) {
    cmd->add_option("--config", shared.config_path, "flat key-value config file");
    cmd->add_option("--seed", shared.seed, "RNG seed (overrides sim.seed)");
    cmd->add_option("--out", shared.out, "output directory (overrides io.out_dir)");
    cmd->add_option("--samples", shared.samples, "Monte Carlo samples (overrides sim.samples)");
    cmd->add_flag("--dry-run", shared.dry_run, "validate config and inputs, skip computation");
    cmd->add_flag("--json-errors", shared.json_errors, "emit machine-readable error JSON");
}

RunConfig load_config(const SharedFlags& shared) {
    RunConfig cfg =
        shared.config_path.empty() ? RunConfig{} : RunConfig::from_file(shared.config_path);
    if (shared.seed) cfg.sim_seed = *shared.seed;
    if (shared.out) cfg.out_dir = *shared.out;
    if (shared.samples) cfg.sim_samples = *shared.samples;
    cfg.risk.validate();
    return cfg;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

// Per-asset scenario sets with per-asset derived seeds (common across the
// financial and ESG evaluations of the same asset).
ScenarioSet asset_scenarios(const AssetDynamics& dyn, const RunConfig& cfg, std::size_t index) {
    return sample_single(dyn, cfg.sim_delta, cfg.sim_samples, mix_seed(cfg.sim_seed, index));
}

std::vector<RiskTableRow> compute_risk_table(
    const std::vector<std::pair<std::string, AssetDynamics>>& dynamics, const RunConfig& cfg) {
    const MultiUtility u = cfg.build_utility();
    std::vector<RiskTableRow> rows;
    rows.reserve(dynamics.size());
    for (std::size_t i = 0; i < dynamics.size(); ++i) {
        const auto& [name, dyn] = dynamics[i];
        const ScenarioSet scen = asset_scenarios(dyn, cfg, i);
        const RiskResult rho_hat = financial_shortfall_risk(u.u1, scen, cfg.risk);
        const RiskResult rho = shortfall_risk(u, scen, cfg.risk);
        if (const auto* e1 = std::get_if<Exponential>(&u.u1.form())) {
            const double closed = entropic_closed_form(e1->gamma, scen);
            if (rho_hat.value.is_finite() && std::abs(closed - rho_hat.value.value()) > 1e-6)
                std::cerr << "warning: " << name
                          << ": Monte Carlo financial risk deviates from the closed form by "
                          << format_double(std::abs(closed - rho_hat.value.value())) << "\n";
        }
        rows.push_back({name, rho_hat.value.value(), rho.value.value(),
                        (rho.value - rho_hat.value).value(),
                        normalized_from_rescaled(dyn.s0_rescaled)});
    }
    return rows;
}

BasketDynamics basket_from_cli(const std::vector<std::pair<std::string, AssetDynamics>>& dynamics,
                               const std::string& z_corr_path,
                               const std::string& jump_corr_path) {
    std::vector<AssetDynamics> assets;
    assets.reserve(dynamics.size());
    for (const auto& [name, dyn] : dynamics) assets.push_back(dyn);
    BasketDynamics basket = BasketDynamics::independent(std::move(assets));
    if (!z_corr_path.empty()) basket.z_correlation = read_matrix_csv(z_corr_path);
    if (!jump_corr_path.empty()) basket.jump_correlation = read_matrix_csv(jump_corr_path);
    basket.validate();
    return basket;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Utility-based shortfall risk for joint financial/ESG positions"};
    app.require_subcommand(1);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "estimate dynamics from price/rating history");
    SharedFlags calibrate_shared;
    std::string prices_path, ratings_path;
    bool unconditional = false;
    calibrate->add_option("prices", prices_path, "prices.csv")->required();
    calibrate->add_option("ratings", ratings_path, "ratings.csv")->required();
    calibrate->add_flag("--unconditional", unconditional,
                        "report the all-months correlation instead of the change-month one");
    add_shared(calibrate, calibrate_shared);

    // simulate
    auto* simulate = app.add_subcommand("simulate", "sample joint (X, S_norm) scenarios");
    SharedFlags simulate_shared;
    std::string sim_dynamics, sim_z_corr, sim_jump_corr;
    simulate->add_option("dynamics", sim_dynamics, "dynamics.csv")->required();
    simulate->add_option("--z-corr", sim_z_corr, "2n x 2n return-normal correlation CSV");
    simulate->add_option("--jump-corr", sim_jump_corr, "n x n jump correlation CSV");
    add_shared(simulate, simulate_shared);

    // risk / premium
    auto* risk_cmd = app.add_subcommand("risk", "per-asset financial and ESG risk table");
    SharedFlags risk_shared;
    std::string risk_dynamics;
    risk_cmd->add_option("dynamics", risk_dynamics, "dynamics.csv")->required();
    add_shared(risk_cmd, risk_shared);

    auto* premium_cmd = app.add_subcommand("premium", "risk table ordered by ESG risk premium");
    SharedFlags premium_shared;
    std::string premium_dynamics;
    premium_cmd->add_option("dynamics", premium_dynamics, "dynamics.csv")->required();
    add_shared(premium_cmd, premium_shared);

    // shift-curve
    auto* shift_cmd = app.add_subcommand("shift-curve", "risk vs deterministic rating shifts");
    SharedFlags shift_shared;
    std::string shift_dynamics, shift_asset;
    std::size_t grid_points = 41;
    std::optional<double> compare_c;
    shift_cmd->add_option("dynamics", shift_dynamics, "dynamics.csv")->required();
    shift_cmd->add_option("--asset", shift_asset, "ticker (default: first row)");
    shift_cmd->add_option("--grid-points", grid_points, "points on [-1,1] (default 41)");
    shift_cmd->add_option("--compare-c", compare_c, "also run with this alternate u2 scale");
    add_shared(shift_cmd, shift_shared);

    // optimize
    auto* optimize_cmd = app.add_subcommand("optimize", "one-shot minimum risk portfolio");
    SharedFlags optimize_shared;
    std::string opt_dynamics, opt_z_corr, opt_jump_corr;
    optimize_cmd->add_option("dynamics", opt_dynamics, "dynamics.csv")->required();
    optimize_cmd->add_option("--z-corr", opt_z_corr, "2n x 2n return-normal correlation CSV");
    optimize_cmd->add_option("--jump-corr", opt_jump_corr, "n x n jump correlation CSV");
    add_shared(optimize_cmd, optimize_shared);

    // backtest
    auto* backtest_cmd = app.add_subcommand("backtest", "rolling-window strategy comparison");
    SharedFlags backtest_shared;
    std::string bt_prices, bt_ratings, bt_rebalance = "monthly", bt_strategies;
    std::optional<std::size_t> bt_window;
    backtest_cmd->add_option("prices", bt_prices, "prices.csv")->required();
    backtest_cmd->add_option("ratings", bt_ratings, "ratings.csv")->required();
    backtest_cmd->add_option("--window", bt_window, "estimation window in months (default 20)");
    backtest_cmd->add_option("--rebalance", bt_rebalance, "rebalance frequency (monthly)");
    backtest_cmd->add_option("--strategies", bt_strategies,
                             "comma list from entropic,esg,equal");
    add_shared(backtest_cmd, backtest_shared);

    CLI11_PARSE(app, argc, argv);

    const SharedFlags& shared = calibrate->parsed()    ? calibrate_shared
                                : simulate->parsed()   ? simulate_shared
                                : risk_cmd->parsed()   ? risk_shared
                                : premium_cmd->parsed()? premium_shared
                                : shift_cmd->parsed()  ? shift_shared
                                : optimize_cmd->parsed()? optimize_shared
                                                        : backtest_shared;

    try {
        RunConfig cfg = load_config(shared);

        if (calibrate->parsed()) {
            const HistoricalSeries h = read_series_csvs(prices_path, ratings_path);
            if (shared.dry_run) return 0;
            std::vector<AssetDynamics> dynamics;
            for (std::size_t a = 0; a < h.n_assets(); ++a) {
                DynamicsEstimate est = estimate_dynamics(h, a);
                if (est.no_rating_changes)
                    std::cerr << "warning: " << h.tickers[a]
                              << ": rating never changes (p = 0)\n";
                if (unconditional) est.dynamics.rho = est.rho_unconditional;
                dynamics.push_back(est.dynamics);
            }
            std::vector<double> last_norm;
            for (std::size_t a = 0; a < h.n_assets(); ++a)
                last_norm.push_back(normalize_rating(h.ratings_raw[a].back()));
            cfg.u2_s0 = baseline_from_median(last_norm);
            write_dynamics_csv(out_path(cfg, "dynamics.csv"), h.tickers, dynamics);
            std::ofstream ucfg(out_path(cfg, "utility.conf"));
            ucfg << cfg.utility_section();
            std::cout << "calibrated " << h.n_assets() << " assets over "
                      << h.n_observations() << " months; baseline s0 = "
                      << format_double(cfg.u2_s0) << "\n";
            return 0;
        }

        if (simulate->parsed()) {
            const auto dynamics = read_dynamics_csv(sim_dynamics);
            const BasketDynamics basket = basket_from_cli(dynamics, sim_z_corr, sim_jump_corr);
            if (shared.dry_run) return 0;
            const ScenarioSet scen =
                sample_basket(basket, cfg.sim_delta, cfg.sim_samples, cfg.sim_seed);
            std::vector<std::string> tickers;
            for (const auto& [name, d] : dynamics) tickers.push_back(name);
            write_scenarios_csv(out_path(cfg, "scenarios.csv"), scen, tickers);
            std::cout << "wrote " << scen.n_samples() << " samples x " << scen.n_assets()
                      << " assets\n";
            return 0;
        }

        if (risk_cmd->parsed() || premium_cmd->parsed()) {
            const auto dynamics =
                read_dynamics_csv(risk_cmd->parsed() ? risk_dynamics : premium_dynamics);
            if (shared.dry_run) return 0;
            auto rows = compute_risk_table(dynamics, cfg);
            std::string file = "risk_table.csv";
            if (premium_cmd->parsed()) {
                std::stable_sort(rows.begin(), rows.end(),
                                 [](const auto& a, const auto& b) { return a.premium > b.premium; });
                file = "premium_table.csv";
            }
            write_risk_table_csv(out_path(cfg, file), rows);
            std::cout << "wrote " << rows.size() << " assets to " << file << "\n";
            return 0;
        }

        if (shift_cmd->parsed()) {
            const auto dynamics = read_dynamics_csv(shift_dynamics);
            std::size_t index = 0;
            if (!shift_asset.empty()) {
                const auto it = std::find_if(dynamics.begin(), dynamics.end(),
                                             [&](const auto& d) { return d.first == shift_asset; });
                if (it == dynamics.end())
                    throw InputError("shift-curve: asset '" + shift_asset + "' not in dynamics");
                index = static_cast<std::size_t>(it - dynamics.begin());
            }
            if (grid_points < 2) throw InputError("shift-curve: need at least 2 grid points");
            if (shared.dry_run) return 0;
            std::vector<double> grid(grid_points);
            for (std::size_t i = 0; i < grid_points; ++i)
                grid[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
            const ScenarioSet scen = asset_scenarios(dynamics[index].second, cfg, index);
            write_shift_curve_csv(out_path(cfg, "shift_curve.csv"),
                                  shift_curve(cfg.build_utility(), scen, grid, cfg.risk));
            if (compare_c) {
                RunConfig alt = cfg;
                alt.u2_c = *compare_c;
                write_shift_curve_csv(out_path(cfg, "shift_curve_compare.csv"),
                                      shift_curve(alt.build_utility(), scen, grid, cfg.risk));
            }
            std::cout << "wrote shift curve for " << dynamics[index].first << "\n";
            return 0;
        }

        if (optimize_cmd->parsed()) {
            const auto dynamics = read_dynamics_csv(opt_dynamics);
            const BasketDynamics basket = basket_from_cli(dynamics, opt_z_corr, opt_jump_corr);
            if (shared.dry_run) return 0;
            const ScenarioSet scen =
                sample_basket(basket, cfg.sim_delta, cfg.sim_samples, cfg.sim_seed);
            const FeasibleSet fsld =
                FeasibleSet::long_only_capped(dynamics.size(), cfg.pf_upper, cfg.pf_lower);
            const MultiUtility u = cfg.build_utility();
            std::ofstream out(out_path(cfg, "optimal_weights.csv"));
            out << "strategy,asset,weight,risk\n";
            for (const std::string& strategy : cfg.pf_strategies) {
                if (strategy == "equal") continue;
                const RiskObjective objective = (strategy == "esg") ? RiskObjective(u)
                                                                    : RiskObjective(u.u1);
                const OptimizeResult res = minimize_risk(objective, scen, fsld, cfg.build_opt());
                for (std::size_t j = 0; j < dynamics.size(); ++j)
                    out << strategy << ',' << dynamics[j].first << ','
                        << format_double(res.weights[j]) << ',' << format_double(res.risk) << '\n';
                std::cout << strategy << " minimum risk: " << format_double(res.risk) << "\n";
            }
            return 0;
        }

        // backtest
        const HistoricalSeries h = read_series_csvs(bt_prices, bt_ratings);
        if (bt_rebalance != "monthly")
            throw InputError("backtest: only monthly rebalancing is supported");
        if (bt_window) cfg.pf_window = *bt_window;
        if (!bt_strategies.empty()) {
            RunConfig tmp;
            tmp.set("portfolio.strategies", bt_strategies);
            cfg.pf_strategies = tmp.pf_strategies;
        }
        if (shared.dry_run) return 0;

        BacktestConfig bt{cfg.build_utility()};
        bt.window = cfg.pf_window;
        bt.samples = cfg.sim_samples;
        bt.seed = cfg.sim_seed;
        bt.horizon = cfg.sim_delta;
        bt.lower = cfg.pf_lower;
        bt.upper = cfg.pf_upper;
        bt.strategies = cfg.pf_strategies;
        bt.opt = cfg.build_opt();
        const BacktestLedger ledger = run_backtest(h, bt);

        write_ledger_csv(out_path(cfg, "ledger.csv"), ledger);
        write_backtest_weights_csv(out_path(cfg, "weights.csv"), ledger, h.tickers);

        // Average weights per strategy, categorized by the last-date raw ratings.
        std::vector<std::pair<std::string, CategoryBreakdown>> cats;
        std::vector<double> last_raw;
        for (std::size_t a = 0; a < h.n_assets(); ++a) last_raw.push_back(h.ratings_raw[a].back());
        for (const auto& strategy : bt.strategies) {
            std::vector<double> avg(h.n_assets(), 0.0);
            std::size_t count = 0;
            for (const auto& row : ledger.rows) {
                if (row.strategy != strategy) continue;
                for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += row.weights[j];
                ++count;
            }
            if (count > 0)
                for (double& a : avg) a /= static_cast<double>(count);
            cats.emplace_back(strategy, risk_category_breakdown(avg, last_raw));
        }
        write_category_csv(out_path(cfg, "category_breakdown.csv"), cats);

        for (const auto& w : ledger.warnings) std::cerr << "warning: " << w << "\n";
        std::map<std::string, std::pair<double, double>> summary; // final cum, mean rating
        std::map<std::string, std::size_t> counts;
        for (const auto& row : ledger.rows) {
            summary[row.strategy].first = row.cum_log_return;
            summary[row.strategy].second += row.esg_rating;
            counts[row.strategy] += 1;
        }
        for (const auto& strategy : bt.strategies) {
            const auto& [cum, rating_sum] = summary[strategy];
            std::cout << strategy << ": cumulative log-return "
                      << format_double(cum) << ", mean portfolio rating "
                      << format_double(rating_sum / static_cast<double>(counts[strategy])) << "\n";
        }
        return 0;
    } catch (const InputError& e) {
        if (shared.json_errors) {
            nlohmann::json j{{"error", {{"kind", "input"}, {"message", e.what()}}}};
            std::cout << j.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 2;
    } catch (const std::exception& e) {
        if (shared.json_errors) {
            nlohmann::json j{{"error", {{"kind", "model"}, {"message", e.what()}}}};
            std::cout << j.dump() << "\n";
        } else {
            std::cerr << "error: " << e.what() << "\n";
        }
        return 3;
    }
}

} // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
