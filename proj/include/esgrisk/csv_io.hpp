#ifndef ESGRISK_CSV_IO_HPP
#define ESGRISK_CSV_IO_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "esgrisk/calibration.hpp"
#include "esgrisk/portfolio.hpp"
#include "esgrisk/risk.hpp"
#include "esgrisk/scenarios.hpp"

namespace esgrisk {

// Shortest round-trip decimal rendering; infinities as "inf"/"-inf".
std::string format_double(double v);

// Paired monthly panels with header `date,TICKER1,...`, ISO month-start dates
// ascending. Schema violations name the file, row and column.
HistoricalSeries read_series_csvs(const std::string& prices_path,
                                  const std::string& ratings_path);

void write_series_csv(const std::string& path, const std::vector<std::string>& dates,
                      const std::vector<std::string>& tickers,
                      const std::vector<std::vector<double>>& columns);

// Calibrated dynamics: asset,mu_x,sigma_x,mu_s,sigma_s,rho,p,s0_rescaled.
void write_dynamics_csv(const std::string& path, const std::vector<std::string>& tickers,
                        const std::vector<AssetDynamics>& dynamics);
std::vector<std::pair<std::string, AssetDynamics>> read_dynamics_csv(const std::string& path);

// Scenario export: sample,asset,x,s_norm.
void write_scenarios_csv(const std::string& path, const ScenarioSet& scen,
                         const std::vector<std::string>& tickers);

// Risk table: asset,rho_financial,rho_esg,premium,esg_rating_now.
struct RiskTableRow {
    std::string asset;
    double rho_financial;
    double rho_esg;
    double premium;
    double esg_rating_now;
};
void write_risk_table_csv(const std::string& path, const std::vector<RiskTableRow>& rows);

// Shift curve: shift,rho,marginal_rho.
void write_shift_curve_csv(const std::string& path, const ShiftCurve& curve);

// Backtest ledger: date,strategy,cum_log_return,portfolio_esg_rating.
void write_ledger_csv(const std::string& path, const BacktestLedger& ledger);

// Backtest weights: date,strategy,asset,weight.
void write_backtest_weights_csv(const std::string& path, const BacktestLedger& ledger,
                                const std::vector<std::string>& tickers);

// Category breakdown: strategy,category,weight.
void write_category_csv(const std::string& path,
                        const std::vector<std::pair<std::string, CategoryBreakdown>>& rows);

// Square numeric matrix without header.
Eigen::MatrixXd read_matrix_csv(const std::string& path);

} // namespace esgrisk

#endif
