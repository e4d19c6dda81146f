#ifndef ESGRISK_CALIBRATION_HPP
#define ESGRISK_CALIBRATION_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "esgrisk/scenarios.hpp"

namespace esgrisk {

// Monthly history of prices and raw ESG ratings for one or more assets.
struct HistoricalSeries {
    std::vector<std::string> dates; // ISO month starts, ascending
    std::vector<std::string> tickers;
    std::vector<std::vector<double>> prices;      // [asset][t], positive
    std::vector<std::vector<double>> ratings_raw; // [asset][t], in [0,50]

    std::size_t n_assets() const { return tickers.size(); }
    std::size_t n_observations() const { return dates.size(); }
    void validate() const;

    // Observations [first, first+count) as a new series.
    HistoricalSeries window(std::size_t first, std::size_t count) const;
};

struct DynamicsEstimate {
    AssetDynamics dynamics;
    double rho_unconditional = 0.0; // correlation over all months, for diagnostics
    bool no_rating_changes = false; // p = 0; the rating-side parameters are zeroed
    bool rho_clamped = false;
};

// Annualized moments of the monthly log price returns; jump probability from
// the count of rating changes (raw values compared at 2 decimals); rating
// drift/volatility/correlation from rescaled-rating log-changes restricted to
// change months. The last rescaled rating seeds the forecast.
DynamicsEstimate estimate_dynamics(const HistoricalSeries& h, std::size_t asset);

// Sample median of a normalized-rating cross-section (midpoint rule).
double baseline_from_median(const std::vector<double>& ratings_norm);

// Two-outcome indifference position: S = s_low with probability p_low,
// s_high otherwise, calibrated so that E[u2(S)] = 0.
struct IndifferenceSpec {
    double s_low;
    double s_high;
    double p_low;
};

// The unique gamma2 > 0 with p*exp(-g*(s_low-s0)) + (1-p)*exp(-g*(s_high-s0)) = 1.
// Throws ModelError when the root sits at the gamma2 = 0 boundary, which
// happens whenever E[S] <= s0 (the risk-neutral or infeasible case).
double calibrate_gamma2(const IndifferenceSpec& spec, double s0);

// Forward counterpart: the p_low that makes (s_low, s_high) an indifference
// position under gamma2.
double implied_p_low(double gamma2, double s_low, double s_high, double s0);

// Per-asset dynamics plus cross-asset correlation matrices estimated from the
// same window: return-normal correlations with the conditional convention of
// the single-asset rho, jump correlations from the binary change indicators,
// both repaired to the PSD cone by eigenvalue clipping.
struct BasketEstimate {
    BasketDynamics basket;
    std::vector<DynamicsEstimate> per_asset;
};
BasketEstimate estimate_basket_dynamics(const HistoricalSeries& h);

} // namespace esgrisk

#endif
