#include "esgrisk/utility.hpp"

#include <cmath>

#include "esgrisk/errors.hpp"

namespace esgrisk {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw InputError(msg);
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

ExtReal eval_form(const Exponential& f, double x) {
    // 1 - exp(-g*x) can overflow to -inf for very negative x; that is the
    // correct extended-real limit.
    return ExtReal((1.0 - std::exp(-f.gamma * x)) / f.gamma);
}

ExtReal eval_form(const ScaledShiftedExponential& f, double s) {
    if (f.c == 0.0) return ExtReal(0.0);
    return ExtReal(f.c / f.gamma * (1.0 - std::exp(-f.gamma * (s - f.s0))));
}

ExtReal eval_form(const Step& f, double s) {
    if (s >= f.s_bar) return ExtReal(0.0);
    return ExtReal(-f.eta);
}

ExtReal eval_form(const SShaped& f, double s) {
    const double d = s - f.s0;
    if (d >= 0.0) return ExtReal(std::pow(d, f.gamma));
    return ExtReal(-f.lambda * std::pow(-d, f.gamma));
}

} // namespace

ScalarUtility::ScalarUtility(Exponential f, Interval domain) : form_(f), domain_(domain) {
    require(f.gamma > 0.0, "Exponential: gamma must be > 0");
}

ScalarUtility::ScalarUtility(ScaledShiftedExponential f, Interval domain)
    : form_(f), domain_(domain) {
    require(f.gamma > 0.0, "ScaledShiftedExponential: gamma must be > 0");
    require(f.c >= 0.0, "ScaledShiftedExponential: c must be >= 0");
    require(in_unit(f.s0), "ScaledShiftedExponential: s0 must lie in the rating scale [0,1]");
}

ScalarUtility::ScalarUtility(Step f, Interval domain) : form_(f), domain_(domain) {
    require(in_unit(f.s_bar), "Step: s_bar must lie in the rating scale [0,1]");
    require(f.eta >= 0.0, "Step: eta must be >= 0 (may be +inf)");
}

ScalarUtility::ScalarUtility(SShaped f, Interval domain) : form_(f), domain_(domain) {
    require(in_unit(f.s0), "SShaped: s0 must lie in the rating scale [0,1]");
    require(f.gamma > 0.0 && f.gamma <= 1.0, "SShaped: gamma must lie in (0,1]");
    require(f.lambda >= 0.0, "SShaped: lambda must be >= 0");
}

ScalarUtility ScalarUtility::exponential(double gamma) { return ScalarUtility(Exponential{gamma}); }

ScalarUtility ScalarUtility::scaled_shifted_exponential(double gamma, double c, double s0) {
    return ScalarUtility(ScaledShiftedExponential{gamma, c, s0});
}

ScalarUtility ScalarUtility::step(double s_bar, double eta) {
    return ScalarUtility(Step{s_bar, eta});
}

ScalarUtility ScalarUtility::s_shaped(double s0, double gamma, double lambda) {
    return ScalarUtility(SShaped{s0, gamma, lambda});
}

ExtReal ScalarUtility::operator()(double x) const {
    if (!domain_.contains(x)) throw InputError("utility input outside declared domain");
    return std::visit([x](const auto& f) { return eval_form(f, x); }, form_);
}

std::string ScalarUtility::form_name() const {
    struct Namer {
        std::string operator()(const Exponential&) const { return "exponential"; }
        std::string operator()(const ScaledShiftedExponential&) const {
            return "scaled_shifted_exponential";
        }
        std::string operator()(const Step&) const { return "step"; }
        std::string operator()(const SShaped&) const { return "s_shaped"; }
    };
    return std::visit(Namer{}, form_);
}

ExtReal combine_utilities(ExtReal v1, ExtReal v2, double k, bool capped) {
    if (capped) {
        const ExtReal a1 = ExtReal(1.0) + ExtReal(k) * v1;
        const ExtReal a2 = ExtReal(1.0) + ExtReal(k) * v2;
        const bool in_dom = a1.is_finite() && a1.value() >= 0.0 && a2.is_finite() && a2.value() >= 0.0;
        if (!in_dom) return ExtReal::neg_inf();
    }
    return v1 + v2 + ExtReal(k) * v1 * v2;
}

ExtReal MultiUtility::operator()(double x, double s) const {
    return combine_utilities(u1(x), u2(s), k, capped);
}

bool monotone_factor_ok(ExtReal v, double k) {
    const ExtReal a = ExtReal(1.0) + ExtReal(k) * v;
    return a.is_neg_inf() || a.value() >= 0.0;
}

DomainBounds effective_domain_bounds(const MultiUtility& u) {
    const auto* e1 = std::get_if<Exponential>(&u.u1.form());
    const auto* e2 = std::get_if<ScaledShiftedExponential>(&u.u2.form());
    if (!e1 || !e2 || e2->c <= 0.0 || u.k <= 0.0) {
        throw InputError(
            "effective_domain_bounds: requires exponential u1, scaled-shifted exponential u2 "
            "with c > 0, and k > 0");
    }
    const double x_low = -std::log1p(e1->gamma / u.k) / e1->gamma;
    const double s_low = -std::log1p(e2->gamma / (e2->c * u.k)) / e2->gamma + e2->s0;
    return {x_low, s_low};
}

MonotonicityReport monotonicity_report(const MultiUtility& u,
                                       const std::vector<double>& x_probes,
                                       const std::vector<double>& s_probes) {
    MonotonicityReport rep;
    rep.in_x.reserve(s_probes.size());
    rep.in_s.reserve(x_probes.size());
    for (double s : s_probes) {
        const ExtReal a = ExtReal(1.0) + ExtReal(u.k) * u.u2(s);
        const bool ok = monotone_factor_ok(u.u2(s), u.k);
        rep.in_x.push_back({s, a.value(), ok});
        rep.monotone_in_x_everywhere = rep.monotone_in_x_everywhere && ok;
    }
    for (double x : x_probes) {
        const ExtReal a = ExtReal(1.0) + ExtReal(u.k) * u.u1(x);
        const bool ok = monotone_factor_ok(u.u1(x), u.k);
        rep.in_s.push_back({x, a.value(), ok});
        rep.monotone_in_s_everywhere = rep.monotone_in_s_everywhere && ok;
    }
    return rep;
}

} // namespace esgrisk
