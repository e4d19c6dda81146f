#ifndef ESGRISK_PORTFOLIO_HPP
#define ESGRISK_PORTFOLIO_HPP

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "esgrisk/calibration.hpp"
#include "esgrisk/risk.hpp"
#include "esgrisk/scenarios.hpp"
#include "esgrisk/utility.hpp"

namespace esgrisk {

// Box-constrained budget simplex { sum w = budget, lower <= w <= upper }.
struct FeasibleSet {
    std::size_t n = 0;
    std::vector<double> lower;
    std::vector<double> upper;
    double budget = 1.0;

    static FeasibleSet long_only_capped(std::size_t n, double cap = 0.2, double floor = 0.0);
    void validate() const;
    bool contains(const std::vector<double>& w, double tol = 1e-12) const;
    void check_weights(const std::vector<double>& w, double tol = 1e-12) const;
};

// Per-sample linear combination (X^w, S^w) as a single-position scenario set.
ScenarioSet portfolio_exposure(const std::vector<double>& w, const ScenarioSet& multi);

// Euclidean projection onto the feasible set, by bisection on the dual shift
// of the clipped affine map w(lambda) = clip(v - lambda, lower, upper).
std::vector<double> project_feasible(const std::vector<double>& v, const FeasibleSet& fs);

struct OptConfig {
    double opt_tol = 1e-6;   // objective-value tolerance
    int max_iterations = 100;
    int multistarts = 8;     // equal-weight start plus seeded random feasible starts
    std::uint64_t seed = 1;
    double fd_step = 1e-4;   // central finite-difference step
    RiskConfig risk;
};

// financial objective (rho_hat of X^w) or ESG objective (rho of (X^w, S^w)).
using RiskObjective = std::variant<ScalarUtility, MultiUtility>;

struct OptimizeResult {
    std::vector<double> weights;
    double risk = 0.0;
    int objective_evaluations = 0;
    int best_start = 0;
};

// Projected-gradient descent with central finite-difference gradients and
// Armijo backtracking, multistarted; deterministic given the seed.
OptimizeResult minimize_risk(const RiskObjective& objective, const ScenarioSet& multi,
                             const FeasibleSet& fs, const OptConfig& cfg = {});

// Portfolio weight per vendor risk-category band ([0,10) Negligible, [10,20)
// Low, [20,30) Medium, [30,40) High, 40+ Severe).
struct CategoryBreakdown {
    static constexpr std::array<const char*, 5> names = {"Negligible", "Low", "Medium", "High",
                                                         "Severe"};
    std::array<double, 5> weight{};
};
CategoryBreakdown risk_category_breakdown(const std::vector<double>& w,
                                          const std::vector<double>& ratings_raw);

struct BacktestConfig {
    MultiUtility utility; // esg strategy objective; its u1 drives the entropic strategy
    std::size_t window = 20;
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    double horizon = 1.0 / 12.0;
    double lower = 0.0;
    double upper = 0.2;
    std::vector<std::string> strategies = {"entropic", "esg", "equal"};
    OptConfig opt;
};

// One row per rebalance date and strategy. The log return and rating are the
// realized values over the month following the rebalance; the cumulative
// column telescopes over them.
struct BacktestLedger {
    struct Row {
        std::string date;
        std::string strategy;
        std::vector<double> weights;
        double log_return = 0.0;
        double esg_rating = 0.0;
        double cum_log_return = 0.0;
    };
    std::vector<Row> rows;
    std::vector<std::string> warnings;
};

// Rolling-window backtest: at each rebalance date, estimates the basket from
// the trailing window, simulates one month ahead, optimizes each strategy and
// records the realized next-month portfolio return and rating. Estimation
// degeneracies demote that date to equal weights with a warning.
BacktestLedger run_backtest(const HistoricalSeries& h, const BacktestConfig& cfg);

// Deterministic per-date stream seed derivation.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

} // namespace esgrisk

#endif
