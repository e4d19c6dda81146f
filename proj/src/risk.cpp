#include "esgrisk/risk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "esgrisk/errors.hpp"
#include "esgrisk/stats.hpp"

namespace esgrisk {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_single_position(const ScenarioSet& scen, const char* op) {
    if (scen.n_assets() != 1)
        throw InputError(std::string(op) + ": expects a single-position scenario set");
    if (scen.n_samples() == 0) throw InputError(std::string(op) + ": empty scenario set");
}

} // namespace

void RiskConfig::validate() const {
    if (!(root_tol > 0.0)) throw InputError("RiskConfig: root_tol must be > 0");
    if (!(bracket_seed > 0.0)) throw InputError("RiskConfig: bracket_seed must be > 0");
    if (!(bracket_cap >= bracket_seed)) throw InputError("RiskConfig: bracket_cap < bracket_seed");
    if (max_iter < 8) throw InputError("RiskConfig: max_iter too small");
}

ExtReal expected_utility(const MultiUtility& u, const ScenarioSet& scen, double m) {
    require_single_position(scen, "expected_utility");
    ExtReal sum(0.0);
    for (std::size_t i = 0; i < scen.n_samples(); ++i) {
        sum = sum + u(scen.x(i) + m, scen.s_norm(i));
        if (sum.is_neg_inf()) return ExtReal::neg_inf();
    }
    return sum * ExtReal(1.0 / static_cast<double>(scen.n_samples()));
}

namespace detail {

AcceptanceObjective::AcceptanceObjective(const MultiUtility& u, const ScenarioSet& scen)
    : multi_(u), capped_(u.capped), k_(u.k) {
    require_single_position(scen, "shortfall_risk");
    xs_ = scen.x_data();
    const std::size_t n = xs_.size();

    a_.resize(n);
    b_.resize(n);
    bool all_u2_finite = true;
    for (std::size_t i = 0; i < n; ++i) {
        const ExtReal v2 = u.u2(scen.s_norm(i));
        b_[i] = v2.value();
        a_[i] = (ExtReal(1.0) + ExtReal(k_) * v2).value();
        if (!v2.is_finite()) all_u2_finite = false;
        if (capped_) {
            // Rating outside the effective domain makes the sample -inf at
            // every cash level.
            if (!(std::isfinite(a_[i]) && a_[i] >= 0.0)) const_neg_inf_ = true;
        } else if (v2.is_neg_inf()) {
            const_neg_inf_ = true; // -inf absorbs in the uncapped composition
        }
    }

    const auto* e1 = std::get_if<Exponential>(&u.u1.form());
    const bool full_domain = u.u1.domain().lo == -kInf && u.u1.domain().hi == kInf;
    const bool cap_check_ok = !capped_ || k_ >= 0.0; // k<0 flips the x-side domain condition
    if (e1 && full_domain && all_u2_finite && !const_neg_inf_ && cap_check_ok) {
        gamma1_ = e1->gamma;
        exp_neg_gamma_x_.resize(n);
        for (std::size_t i = 0; i < n; ++i) exp_neg_gamma_x_[i] = std::exp(-gamma1_ * xs_[i]);
        fast_ = true;
    }
}

AcceptanceObjective::AcceptanceObjective(const ScalarUtility& u1, const ScenarioSet& scen)
    : financial_(u1) {
    require_single_position(scen, "financial_shortfall_risk");
    xs_ = scen.x_data();
    const auto* e1 = std::get_if<Exponential>(&u1.form());
    const bool full_domain = u1.domain().lo == -kInf && u1.domain().hi == kInf;
    if (e1 && full_domain) {
        gamma1_ = e1->gamma;
        exp_neg_gamma_x_.resize(xs_.size());
        for (std::size_t i = 0; i < xs_.size(); ++i)
            exp_neg_gamma_x_[i] = std::exp(-gamma1_ * xs_[i]);
        fast_ = true;
    }
}

ExtReal AcceptanceObjective::operator()(double m) const {
    if (const_neg_inf_) return ExtReal::neg_inf();
    if (!fast_) return eval_generic(m);

    const double t = std::exp(-gamma1_ * m);
    if (std::isinf(t)) return ExtReal::neg_inf(); // u1 = -inf at every sample
    const std::size_t n = xs_.size();
    // For k > 0: 1 + k*u1(x+m) >= 0 iff exp(-gamma (x+m)) <= 1 + gamma/k.
    const double cap_floor = (capped_ && k_ > 0.0) ? 1.0 + gamma1_ / k_ : kInf;
    double acc = 0.0;
    if (financial_) {
        for (std::size_t i = 0; i < n; ++i) acc += (1.0 - exp_neg_gamma_x_[i] * t) / gamma1_;
    } else if (!capped_) {
        for (std::size_t i = 0; i < n; ++i) {
            const double q = exp_neg_gamma_x_[i] * t;
            if (std::isinf(q)) return ExtReal::neg_inf();
            acc += a_[i] * ((1.0 - q) / gamma1_) + b_[i];
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const double q = exp_neg_gamma_x_[i] * t;
            if (q > cap_floor || std::isinf(q)) return ExtReal::neg_inf();
            acc += a_[i] * ((1.0 - q) / gamma1_) + b_[i];
        }
    }
    if (std::isnan(acc)) return eval_generic(m); // overflow cancellation; take the exact route
    return ExtReal(acc / static_cast<double>(n));
}

ExtReal AcceptanceObjective::eval_generic(double m) const {
    const std::size_t n = xs_.size();
    ExtReal sum(0.0);
    if (financial_) {
        for (std::size_t i = 0; i < n; ++i) {
            sum = sum + (*financial_)(xs_[i] + m);
            if (sum.is_neg_inf()) return ExtReal::neg_inf();
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            const ExtReal v1 = multi_->u1(xs_[i] + m);
            sum = sum + combine_utilities(v1, ExtReal(b_[i]), k_, capped_);
            if (sum.is_neg_inf()) return ExtReal::neg_inf();
        }
    }
    return sum * ExtReal(1.0 / static_cast<double>(n));
}

RiskResult solve_shortfall(const AcceptanceObjective& f, const RiskConfig& cfg,
                           std::optional<double> hint, double hint_half_width) {
    cfg.validate();

    RiskResult out;
    double min_accept = kInf;   // smallest m seen with f(m) >= 0
    double max_reject = -kInf;  // largest m seen with f(m) < 0
    double f_at_min_accept = 0.0;

    auto accepts = [&](double m) {
        ++out.iterations;
        const ExtReal v = f(m);
        const bool ok = v >= ExtReal(0.0);
        if (ok && m < min_accept) {
            min_accept = m;
            f_at_min_accept = v.value();
        }
        if (!ok && m > max_reject) max_reject = m;
        const double guard = std::max(2.0 * cfg.root_tol, 1e-12 * (1.0 + std::abs(m)));
        if (min_accept < max_reject - guard)
            throw ModelError(
                "acceptance map is not monotone in cash (sign pattern +,-,+); "
                "consider the capped utility");
        return ok;
    };

    double lo, hi;
    if (hint && accepts(*hint + hint_half_width) && !accepts(*hint - hint_half_width)) {
        lo = *hint - hint_half_width;
        hi = *hint + hint_half_width;
    } else {
        // Expand up from the seed until acceptance.
        hi = cfg.bracket_seed;
        while (!accepts(hi)) {
            hi *= 2.0;
            if (hi > cfg.bracket_cap) {
                out.value = ExtReal::pos_inf();
                out.bracket_lo = max_reject;
                out.bracket_hi = kInf;
                out.acceptance_utility = -kInf;
                return out;
            }
        }
        // Expand down until rejection.
        lo = -cfg.bracket_seed;
        while (lo >= hi || accepts(lo)) {
            lo *= 2.0;
            if (lo < -cfg.bracket_cap) {
                out.value = ExtReal::neg_inf();
                out.bracket_lo = -kInf;
                out.bracket_hi = std::min(min_accept, hi);
                out.acceptance_utility = f_at_min_accept;
                return out;
            }
        }
        hi = std::min(hi, min_accept);
    }

    int bisections = 0;
    while (hi - lo > cfg.root_tol && bisections < cfg.max_iter) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket at float resolution
        if (accepts(mid))
            hi = mid;
        else
            lo = mid;
        ++bisections;
    }

    out.value = ExtReal(hi);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.acceptance_utility = (hi == min_accept) ? f_at_min_accept : f(hi).value();
    return out;
}

} // namespace detail

RiskResult shortfall_risk(const MultiUtility& u, const ScenarioSet& scen, const RiskConfig& cfg) {
    return detail::solve_shortfall(detail::AcceptanceObjective(u, scen), cfg);
}

RiskResult financial_shortfall_risk(const ScalarUtility& u1, const ScenarioSet& scen,
                                    const RiskConfig& cfg) {
    return detail::solve_shortfall(detail::AcceptanceObjective(u1, scen), cfg);
}

double entropic_closed_form(double gamma1, const ScenarioSet& scen, std::size_t asset) {
    if (!(gamma1 > 0.0)) throw InputError("entropic_closed_form: gamma1 must be > 0");
    if (asset >= scen.n_assets()) throw InputError("entropic_closed_form: asset out of range");
    if (scen.n_samples() == 0) throw InputError("entropic_closed_form: empty scenario set");
    std::vector<double> z(scen.n_samples());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = -gamma1 * scen.x(i, asset);
    return (log_sum_exp(z) - std::log(static_cast<double>(z.size()))) / gamma1;
}

ExtReal esg_risk_premium(const MultiUtility& u, const ScenarioSet& scen, const RiskConfig& cfg) {
    const RiskResult rho = shortfall_risk(u, scen, cfg);
    const RiskResult rho_hat = financial_shortfall_risk(u.u1, scen, cfg);
    return rho.value - rho_hat.value;
}

double indifference_gap(const ScalarUtility& u2, const ScenarioSet& scen) {
    require_single_position(scen, "indifference_gap");
    ExtReal sum(0.0);
    for (std::size_t i = 0; i < scen.n_samples(); ++i) {
        sum = sum + u2(scen.s_norm(i));
        if (sum.is_neg_inf()) break;
    }
    return (sum * ExtReal(1.0 / static_cast<double>(scen.n_samples()))).value();
}

ShiftCurve shift_curve(const MultiUtility& u, const ScenarioSet& scen,
                       const std::vector<double>& shifts, const RiskConfig& cfg) {
    require_single_position(scen, "shift_curve");
    if (shifts.empty()) throw InputError("shift_curve: empty grid");
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        if (!(shifts[i] >= -1.0 && shifts[i] <= 1.0))
            throw InputError("shift_curve: grid outside [-1,1]");
        if (i > 0 && !(shifts[i] > shifts[i - 1]))
            throw InputError("shift_curve: grid must be strictly ascending");
    }

    ShiftCurve curve;
    curve.shift = shifts;
    curve.rho.reserve(shifts.size());
    for (double m : shifts) {
        std::vector<double> shifted(scen.n_samples());
        for (std::size_t i = 0; i < scen.n_samples(); ++i)
            shifted[i] = std::clamp(scen.s_norm(i) + m, 0.0, 1.0);
        const ScenarioSet moved =
            ScenarioSet::from_columns(scen.x_data(), std::move(shifted), scen.horizon(), scen.seed());
        curve.rho.push_back(shortfall_risk(u, moved, cfg).value.value());
    }

    curve.marginal_rho.resize(shifts.size(), std::numeric_limits<double>::quiet_NaN());
    const auto fd = [&](std::size_t i, std::size_t j) {
        return (curve.rho[j] - curve.rho[i]) / (curve.shift[j] - curve.shift[i]);
    };
    const std::size_t n = shifts.size();
    if (n >= 2) {
        curve.marginal_rho[0] = fd(0, 1);
        curve.marginal_rho[n - 1] = fd(n - 2, n - 1);
        for (std::size_t i = 1; i + 1 < n; ++i) curve.marginal_rho[i] = fd(i - 1, i + 1);
    }
    return curve;
}

} // namespace esgrisk
