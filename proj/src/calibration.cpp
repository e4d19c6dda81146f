#include "esgrisk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "esgrisk/errors.hpp"
#include "esgrisk/stats.hpp"

namespace esgrisk {

namespace {

constexpr double kAnnualization = 12.0;

double round2(double v) { return std::round(v * 100.0) / 100.0; }

bool rating_changed(double prev_raw, double cur_raw) { return round2(prev_raw) != round2(cur_raw); }

// Per-asset monthly diagnostics shared by single-asset and basket estimation.
struct AssetSeries {
    std::vector<double> log_returns;       // length T-1
    std::vector<double> rating_log_change; // length T-1, 0 on no-change months
    std::vector<double> change_indicator;  // length T-1, {0,1}
    double last_rescaled = 0.0;
};

AssetSeries build_asset_series(const HistoricalSeries& h, std::size_t asset) {
    const auto& prices = h.prices[asset];
    const auto& raw = h.ratings_raw[asset];
    const std::size_t t_count = h.n_observations();

    AssetSeries s;
    s.log_returns.reserve(t_count - 1);
    s.rating_log_change.reserve(t_count - 1);
    s.change_indicator.reserve(t_count - 1);

    std::vector<double> rescaled(t_count);
    for (std::size_t t = 0; t < t_count; ++t) {
        const double norm = normalize_rating(raw[t]);
        if (!(norm > 0.0 && norm < 1.0))
            throw InputError(h.tickers[asset] +
                             ": rating at the scale boundary cannot be rescaled (raw 0 or 50)");
        rescaled[t] = rescale_rating(norm);
    }
    s.last_rescaled = rescaled.back();

    for (std::size_t t = 1; t < t_count; ++t) {
        s.log_returns.push_back(std::log(prices[t] / prices[t - 1]));
        const bool changed = rating_changed(raw[t - 1], raw[t]);
        s.change_indicator.push_back(changed ? 1.0 : 0.0);
        s.rating_log_change.push_back(changed ? std::log(rescaled[t] / rescaled[t - 1]) : 0.0);
    }
    return s;
}

double clamp_correlation(double r, bool* clamped) {
    if (r > 1.0) {
        if (clamped) *clamped = true;
        return 1.0;
    }
    if (r < -1.0) {
        if (clamped) *clamped = true;
        return -1.0;
    }
    return r;
}

// Pearson over the months selected by the mask; 0 when degenerate.
double masked_pearson(const std::vector<double>& xs, const std::vector<double>& ys,
                      const std::vector<double>& mask) {
    std::vector<double> mx, my;
    for (std::size_t t = 0; t < mask.size(); ++t) {
        if (mask[t] != 0.0) {
            mx.push_back(xs[t]);
            my.push_back(ys[t]);
        }
    }
    return pearson(mx, my);
}

std::vector<double> both_mask(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> m(a.size());
    for (std::size_t t = 0; t < a.size(); ++t) m[t] = (a[t] != 0.0 && b[t] != 0.0) ? 1.0 : 0.0;
    return m;
}

// Clip negative eigenvalues and restore the unit diagonal.
Eigen::MatrixXd repair_correlation(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw ModelError("correlation repair: eigensolver failed");
    Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd repaired =
        es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
    for (Eigen::Index i = 0; i < repaired.rows(); ++i) {
        const double d = repaired(i, i);
        if (d <= 0.0) {
            repaired.row(i).setZero();
            repaired.col(i).setZero();
            repaired(i, i) = 1.0;
        }
    }
    Eigen::VectorXd scale = repaired.diagonal().cwiseSqrt().cwiseInverse();
    repaired = scale.asDiagonal() * repaired * scale.asDiagonal();
    repaired = 0.5 * (repaired + repaired.transpose());
    for (Eigen::Index i = 0; i < repaired.rows(); ++i) repaired(i, i) = 1.0;
    return repaired;
}

DynamicsEstimate estimate_from_series(const AssetSeries& s, const std::string& ticker) {
    DynamicsEstimate est;
    AssetDynamics& d = est.dynamics;

    const double sd_r = sample_stdev(s.log_returns);
    if (sd_r <= 0.0)
        throw InputError(ticker + ": constant prices give a degenerate volatility estimate");
    d.mu_x = kAnnualization * mean(s.log_returns);
    d.sigma_x = std::sqrt(kAnnualization) * sd_r;

    const std::size_t months = s.change_indicator.size();
    std::vector<double> changes;
    std::vector<double> returns_on_change;
    for (std::size_t t = 0; t < months; ++t) {
        if (s.change_indicator[t] != 0.0) {
            changes.push_back(s.rating_log_change[t]);
            returns_on_change.push_back(s.log_returns[t]);
        }
    }
    d.p = static_cast<double>(changes.size()) / static_cast<double>(months);

    if (changes.empty()) {
        est.no_rating_changes = true;
        d.mu_s = d.sigma_s = d.rho = 0.0;
    } else {
        d.mu_s = kAnnualization * mean(changes);
        d.sigma_s = std::sqrt(kAnnualization) * sample_stdev(changes);
        d.rho = clamp_correlation(pearson(returns_on_change, changes), &est.rho_clamped);
    }
    est.rho_unconditional =
        clamp_correlation(pearson(s.log_returns, s.rating_log_change), nullptr);

    d.s0_rescaled = s.last_rescaled;
    d.notional = 1.0;
    d.validate();
    return est;
}

} // namespace

void HistoricalSeries::validate() const {
    if (tickers.empty()) throw InputError("HistoricalSeries: no assets");
    if (dates.size() < 2) throw InputError("HistoricalSeries: need at least 2 observations");
    if (prices.size() != tickers.size() || ratings_raw.size() != tickers.size())
        throw InputError("HistoricalSeries: per-asset columns do not match tickers");
    for (std::size_t a = 0; a < tickers.size(); ++a) {
        if (prices[a].size() != dates.size() || ratings_raw[a].size() != dates.size())
            throw InputError("HistoricalSeries: column length mismatch for " + tickers[a]);
        for (double p : prices[a])
            if (!(p > 0.0)) throw InputError("HistoricalSeries: non-positive price for " + tickers[a]);
        for (double r : ratings_raw[a])
            if (!(r >= 0.0 && r <= 50.0))
                throw InputError("HistoricalSeries: rating outside [0,50] for " + tickers[a]);
    }
    for (std::size_t t = 1; t < dates.size(); ++t)
        if (!(dates[t - 1] < dates[t]))
            throw InputError("HistoricalSeries: dates must be strictly ascending");
}

HistoricalSeries HistoricalSeries::window(std::size_t first, std::size_t count) const {
    if (first + count > n_observations()) throw InputError("HistoricalSeries: window out of range");
    HistoricalSeries w;
    w.tickers = tickers;
    w.dates.assign(dates.begin() + first, dates.begin() + first + count);
    w.prices.resize(n_assets());
    w.ratings_raw.resize(n_assets());
    for (std::size_t a = 0; a < n_assets(); ++a) {
        w.prices[a].assign(prices[a].begin() + first, prices[a].begin() + first + count);
        w.ratings_raw[a].assign(ratings_raw[a].begin() + first,
                                ratings_raw[a].begin() + first + count);
    }
    return w;
}

DynamicsEstimate estimate_dynamics(const HistoricalSeries& h, std::size_t asset) {
    h.validate();
    if (asset >= h.n_assets()) throw InputError("estimate_dynamics: asset out of range");
    if (h.n_observations() < 3) throw InputError("estimate_dynamics: need at least 3 observations");
    return estimate_from_series(build_asset_series(h, asset), h.tickers[asset]);
}

double baseline_from_median(const std::vector<double>& ratings_norm) {
    if (ratings_norm.empty()) throw InputError("baseline_from_median: empty cross-section");
    return median(ratings_norm);
}

double implied_p_low(double gamma2, double s_low, double s_high, double s0) {
    if (!(gamma2 > 0.0)) throw InputError("implied_p_low: gamma2 must be > 0");
    if (!(s_low < s0 && s0 < s_high)) throw InputError("implied_p_low: requires s_low < s0 < s_high");
    const double el = std::exp(-gamma2 * (s_low - s0));
    const double eh = std::exp(-gamma2 * (s_high - s0));
    return (1.0 - eh) / (el - eh);
}

double calibrate_gamma2(const IndifferenceSpec& spec, double s0) {
    if (!(spec.s_low < s0 && s0 < spec.s_high))
        throw InputError("IndifferenceSpec: requires s_low < s0 < s_high");
    if (!(spec.p_low > 0.0 && spec.p_low < 1.0))
        throw InputError("IndifferenceSpec: p_low must lie in (0,1)");

    // g(gamma) = p*e^{gamma a} + (1-p)*e^{-gamma b} - 1 with a = s0 - s_low,
    // b = s_high - s0 is strictly convex with g(0) = 0; a positive root exists
    // iff g'(0) = p*a - (1-p)*b < 0, i.e. iff E[S] > s0.
    const double a = s0 - spec.s_low;
    const double b = spec.s_high - s0;
    const double slope0 = spec.p_low * a - (1.0 - spec.p_low) * b;
    if (slope0 >= 0.0)
        throw ModelError(
            "calibrate_gamma2: the indifference equation has its root at gamma2 = 0 "
            "(mean rating does not exceed the baseline; risk-neutral or infeasible spec)");

    const auto g = [&](double gamma) {
        return spec.p_low * std::exp(gamma * a) + (1.0 - spec.p_low) * std::exp(-gamma * b) - 1.0;
    };

    double hi = 1.0;
    constexpr double kGammaMax = 1e6;
    while (g(hi) <= 0.0) {
        hi *= 2.0;
        if (hi > kGammaMax)
            throw ModelError("calibrate_gamma2: no root below gamma2 = 1e6");
    }
    double lo = hi * 0.5;
    while (g(lo) > 0.0) {
        lo *= 0.5;
        if (lo < 1e-12)
            throw ModelError("calibrate_gamma2: root collapses to the gamma2 = 0 boundary");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

BasketEstimate estimate_basket_dynamics(const HistoricalSeries& h) {
    h.validate();
    if (h.n_observations() < 3)
        throw InputError("estimate_basket_dynamics: need at least 3 observations");
    const std::size_t n = h.n_assets();

    std::vector<AssetSeries> series;
    series.reserve(n);
    for (std::size_t a = 0; a < n; ++a) series.push_back(build_asset_series(h, a));

    BasketEstimate out;
    out.per_asset.reserve(n);
    for (std::size_t a = 0; a < n; ++a)
        out.per_asset.push_back(estimate_from_series(series[a], h.tickers[a]));

    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd z = Eigen::MatrixXd::Identity(2 * ni, 2 * ni);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const auto& si = series[i];
            const auto& sj = series[j];
            if (i != j) {
                z(2 * i, 2 * j) = pearson(si.log_returns, sj.log_returns);
                z(2 * i + 1, 2 * j + 1) =
                    masked_pearson(si.rating_log_change, sj.rating_log_change,
                                   both_mask(si.change_indicator, sj.change_indicator));
            }
            // Return-vs-rating entries condition on the rating asset changing.
            const double c = masked_pearson(si.log_returns, sj.rating_log_change,
                                            sj.change_indicator);
            z(2 * i, 2 * j + 1) = c;
            z(2 * j + 1, 2 * i) = c;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        z(2 * i, 2 * i + 1) = out.per_asset[i].dynamics.rho;
        z(2 * i + 1, 2 * i) = out.per_asset[i].dynamics.rho;
    }
    z = repair_correlation(z);

    Eigen::MatrixXd jump = Eigen::MatrixXd::Identity(ni, ni);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r = pearson(series[i].change_indicator, series[j].change_indicator);
            jump(i, j) = r;
            jump(j, i) = r;
        }
    jump = repair_correlation(jump);

    BasketDynamics basket;
    basket.assets.reserve(n);
    for (std::size_t a = 0; a < n; ++a) {
        AssetDynamics d = out.per_asset[a].dynamics;
        // The repair may nudge the own-asset block; the repaired matrix is the
        // model, so rho follows it.
        d.rho = std::clamp(z(2 * a, 2 * a + 1), -1.0, 1.0);
        out.per_asset[a].dynamics = d;
        basket.assets.push_back(d);
    }
    basket.z_correlation = z;
    basket.jump_correlation = jump;
    basket.validate();
    out.basket = basket;
    return out;
}

} // namespace esgrisk
