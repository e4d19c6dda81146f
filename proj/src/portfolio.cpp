#include "esgrisk/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>

#include "esgrisk/errors.hpp"

namespace esgrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// rho(w) evaluator with a warm bracket carried across nearby evaluations.
class PortfolioObjective {
public:
    PortfolioObjective(const RiskObjective& objective, const ScenarioSet& scen,
                       const RiskConfig& risk)
        : objective_(objective), scen_(scen), risk_(risk) {}

    double operator()(const std::vector<double>& w) {
        ++evaluations_;
        const ScenarioSet exposure = portfolio_exposure(w, scen_);
        const RiskResult r = std::visit(
            [&](const auto& obj) {
                detail::AcceptanceObjective f(obj, exposure);
                return detail::solve_shortfall(f, risk_, hint_);
            },
            objective_);
        if (r.value.is_finite()) hint_ = r.value.value();
        return r.value.value();
    }

    int evaluations() const { return evaluations_; }

private:
    const RiskObjective& objective_;
    const ScenarioSet& scen_;
    RiskConfig risk_;
    std::optional<double> hint_;
    int evaluations_ = 0;
};

} // namespace

FeasibleSet FeasibleSet::long_only_capped(std::size_t n, double cap, double floor) {
    FeasibleSet fs;
    fs.n = n;
    fs.lower.assign(n, floor);
    fs.upper.assign(n, cap);
    fs.budget = 1.0;
    fs.validate();
    return fs;
}

void FeasibleSet::validate() const {
    if (n == 0) throw InputError("FeasibleSet: empty");
    if (lower.size() != n || upper.size() != n)
        throw InputError("FeasibleSet: bound dimensions do not match n");
    double lo_sum = 0.0, hi_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] <= upper[i])) throw InputError("FeasibleSet: lower bound above upper bound");
        lo_sum += lower[i];
        hi_sum += upper[i];
    }
    if (!(hi_sum >= budget && budget >= lo_sum))
        throw InputError("FeasibleSet: infeasible (need sum(lower) <= budget <= sum(upper))");
}

bool FeasibleSet::contains(const std::vector<double>& w, double tol) const {
    if (w.size() != n) return false;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (w[i] < lower[i] - tol || w[i] > upper[i] + tol) return false;
        sum += w[i];
    }
    return std::abs(sum - budget) <= tol;
}

void FeasibleSet::check_weights(const std::vector<double>& w, double tol) const {
    if (!contains(w, tol)) throw InputError("Weights violate the feasible set");
}

ScenarioSet portfolio_exposure(const std::vector<double>& w, const ScenarioSet& multi) {
    if (w.size() != multi.n_assets())
        throw InputError("portfolio_exposure: weight dimension does not match assets");
    const std::size_t m = multi.n_samples();
    const std::size_t n = multi.n_assets();
    ScenarioSet out(m, 1, multi.horizon(), multi.seed());
    const auto& xs = multi.x_data();
    const auto& ss = multi.s_data();
    for (std::size_t i = 0; i < m; ++i) {
        double xw = 0.0, sw = 0.0;
        const std::size_t base = i * n;
        for (std::size_t j = 0; j < n; ++j) {
            xw += w[j] * xs[base + j];
            sw += w[j] * ss[base + j];
        }
        out.x_[i] = xw;
        out.s_[i] = sw;
    }
    return out;
}

std::vector<double> project_feasible(const std::vector<double>& v, const FeasibleSet& fs) {
    fs.validate();
    if (v.size() != fs.n) throw InputError("project_feasible: dimension mismatch");
    if (fs.contains(v)) return v;

    const auto clipped_sum = [&](double lambda) {
        double s = 0.0;
        for (std::size_t i = 0; i < fs.n; ++i)
            s += std::clamp(v[i] - lambda, fs.lower[i], fs.upper[i]);
        return s;
    };

    double lo = v[0] - fs.upper[0], hi = v[0] - fs.lower[0];
    for (std::size_t i = 1; i < fs.n; ++i) {
        lo = std::min(lo, v[i] - fs.upper[i]);
        hi = std::max(hi, v[i] - fs.lower[i]);
    }
    // clipped_sum is non-increasing: >= budget at lo, <= budget at hi.
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(lo) + std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_sum(mid) >= fs.budget ? lo : hi) = mid;
    }
    const double lambda = 0.5 * (lo + hi);

    std::vector<double> w(fs.n);
    double sum = 0.0;
    for (std::size_t i = 0; i < fs.n; ++i) {
        w[i] = std::clamp(v[i] - lambda, fs.lower[i], fs.upper[i]);
        sum += w[i];
    }
    // Spread the bisection residual over the strictly interior coordinates.
    double residual = fs.budget - sum;
    for (int pass = 0; pass < 2 && residual != 0.0; ++pass) {
        std::vector<std::size_t> free;
        for (std::size_t i = 0; i < fs.n; ++i)
            if (w[i] > fs.lower[i] && w[i] < fs.upper[i]) free.push_back(i);
        if (free.empty()) break;
        const double bump = residual / static_cast<double>(free.size());
        for (std::size_t i : free) w[i] = std::clamp(w[i] + bump, fs.lower[i], fs.upper[i]);
        sum = 0.0;
        for (double wi : w) sum += wi;
        residual = fs.budget - sum;
    }
    return w;
}

OptimizeResult minimize_risk(const RiskObjective& objective, const ScenarioSet& multi,
                             const FeasibleSet& fs, const OptConfig& cfg) {
    fs.validate();
    cfg.risk.validate();
    if (fs.n != multi.n_assets()) throw InputError("minimize_risk: dimension mismatch");
    if (cfg.multistarts < 1) throw InputError("minimize_risk: multistarts must be >= 1");
    if (!(cfg.fd_step > 0.0)) throw InputError("minimize_risk: fd_step must be > 0");

    const std::size_t n = fs.n;
    PortfolioObjective risk_of(objective, multi, cfg.risk);

    // Deterministic start list: equal weights, then seeded random feasible points.
    std::vector<std::vector<double>> starts;
    starts.push_back(project_feasible(std::vector<double>(n, fs.budget / static_cast<double>(n)), fs));
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 1; s < cfg.multistarts; ++s) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i)
            v[i] = fs.lower[i] + unif(rng) * (fs.upper[i] - fs.lower[i]);
        starts.push_back(project_feasible(v, fs));
    }

    OptimizeResult best;
    best.risk = kInf;
    best.best_start = -1;

    for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
        std::vector<double> w = starts[s];
        double fw = risk_of(w);
        if (std::isfinite(fw)) {
            const double h = cfg.fd_step;
            double step = 1.0;
            int small_improvements = 0;
            for (int iter = 0; iter < cfg.max_iterations; ++iter) {
                std::vector<double> g(n);
                bool grad_ok = true;
                for (std::size_t i = 0; i < n && grad_ok; ++i) {
                    std::vector<double> wp = w, wm = w;
                    wp[i] += h;
                    wm[i] -= h;
                    const double fp = risk_of(wp), fm = risk_of(wm);
                    g[i] = (fp - fm) / (2.0 * h);
                    grad_ok = std::isfinite(g[i]);
                }
                if (!grad_ok) break;

                double t = step;
                bool accepted = false;
                std::vector<double> wt;
                double ft = 0.0;
                for (int ls = 0; ls < 30; ++ls) {
                    std::vector<double> target(n);
                    for (std::size_t i = 0; i < n; ++i) target[i] = w[i] - t * g[i];
                    wt = project_feasible(target, fs);
                    std::vector<double> dw(n);
                    for (std::size_t i = 0; i < n; ++i) dw[i] = w[i] - wt[i];
                    const double decrease = dot(g, dw);
                    double norm2 = dot(dw, dw);
                    if (norm2 < 1e-24 || decrease <= 0.0) break; // pinned by the constraints
                    ft = risk_of(wt);
                    if (ft <= fw - 1e-4 * decrease) {
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
                if (!accepted) break;
                const double improvement = fw - ft;
                w = wt;
                fw = ft;
                step = std::min(t * 2.0, 1e3);
                if (improvement < cfg.opt_tol) {
                    if (++small_improvements >= 2) break;
                } else {
                    small_improvements = 0;
                }
            }
        }
        if (fw < best.risk || best.best_start < 0) {
            best.risk = fw;
            best.weights = w;
            best.best_start = s;
        }
    }

    best.objective_evaluations = risk_of.evaluations();
    if (!std::isfinite(best.risk) && best.risk > 0.0)
        throw ModelError("minimize_risk: no feasible start achieves acceptance (risk is +inf)");
    return best;
}

CategoryBreakdown risk_category_breakdown(const std::vector<double>& w,
                                          const std::vector<double>& ratings_raw) {
    if (w.size() != ratings_raw.size())
        throw InputError("risk_category_breakdown: dimension mismatch");
    CategoryBreakdown out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double r = ratings_raw[i];
        if (!(r >= 0.0 && r <= 50.0))
            throw InputError("risk_category_breakdown: raw rating outside [0,50]");
        const auto band = static_cast<std::size_t>(std::min(std::floor(r / 10.0), 4.0));
        out.weight[band] += w[i];
    }
    return out;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

BacktestLedger run_backtest(const HistoricalSeries& h, const BacktestConfig& cfg) {
    h.validate();
    if (h.n_observations() < cfg.window + 2)
        throw InputError("run_backtest: series shorter than window + 2 observations");
    if (cfg.window < 2) throw InputError("run_backtest: window must be >= 2");
    if (cfg.samples < 1) throw InputError("run_backtest: samples must be >= 1");
    if (cfg.strategies.empty()) throw InputError("run_backtest: no strategies selected");
    for (const auto& s : cfg.strategies)
        if (s != "entropic" && s != "esg" && s != "equal")
            throw InputError("run_backtest: unknown strategy '" + s + "'");

    const std::size_t n = h.n_assets();
    const FeasibleSet fs = [&] {
        FeasibleSet f;
        f.n = n;
        f.lower.assign(n, cfg.lower);
        f.upper.assign(n, cfg.upper);
        f.budget = 1.0;
        f.validate();
        return f;
    }();
    const std::vector<double> equal_w =
        project_feasible(std::vector<double>(n, 1.0 / static_cast<double>(n)), fs);

    BacktestLedger ledger;
    std::map<std::string, double> cum;
    for (const auto& s : cfg.strategies) cum[s] = 0.0;

    for (std::size_t t = cfg.window; t + 1 < h.n_observations(); ++t) {
        const std::string& date = h.dates[t];
        std::optional<ScenarioSet> scen;
        try {
            const BasketEstimate est = estimate_basket_dynamics(h.window(t - cfg.window, cfg.window + 1));
            scen = sample_basket(est.basket, cfg.horizon, cfg.samples, mix_seed(cfg.seed, t));
        } catch (const std::exception& e) {
            ledger.warnings.push_back(date + ": estimation failed (" + e.what() +
                                      "); equal-weight fallback");
        }

        for (const auto& strategy : cfg.strategies) {
            std::vector<double> w = equal_w;
            if (strategy != "equal" && scen) {
                try {
                    OptConfig opt = cfg.opt;
                    opt.seed = mix_seed(cfg.seed, t * 2 + (strategy == "esg" ? 1 : 0));
                    const RiskObjective objective =
                        (strategy == "esg") ? RiskObjective(cfg.utility)
                                            : RiskObjective(cfg.utility.u1);
                    w = minimize_risk(objective, *scen, fs, opt).weights;
                } catch (const ModelError& e) {
                    ledger.warnings.push_back(date + ": " + strategy + " optimization failed (" +
                                              e.what() + "); equal-weight fallback");
                }
            }

            double gross = 0.0, rating = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                gross += w[j] * (h.prices[j][t + 1] / h.prices[j][t]);
                rating += w[j] * normalize_rating(h.ratings_raw[j][t + 1]);
            }
            const double log_ret = std::log(gross);
            cum[strategy] += log_ret;
            ledger.rows.push_back({date, strategy, std::move(w), log_ret, rating, cum[strategy]});
        }
    }
    return ledger;
}

} // namespace esgrisk
