#ifndef ESGRISK_UTILITY_HPP
#define ESGRISK_UTILITY_HPP

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "esgrisk/ext_real.hpp"

namespace esgrisk {

// Closed interval of admissible inputs for a scalar utility.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
    static Interval reals() { return {}; }
    static Interval unit() { return {0.0, 1.0}; }
};

// u(x) = (1/gamma) * (1 - exp(-gamma x)); increasing, concave, bounded by 1/gamma.
struct Exponential {
    double gamma;
};

// u(s) = (c/gamma) * (1 - exp(-gamma (s - s0))); vanishes exactly at s0.
// c = 0 degenerates to the zero utility.
struct ScaledShiftedExponential {
    double gamma;
    double c;
    double s0;
};

// u(s) = 0 for s >= s_bar, -eta below; eta may be +inf (hard threshold).
struct Step {
    double s_bar;
    double eta;
};

// u(s) = (s - s0)^gamma above s0 and -lambda * |s - s0|^gamma below,
// gamma in (0,1], lambda >= 0. gamma = lambda = 1 gives the affine utility.
struct SShaped {
    double s0;
    double gamma;
    double lambda;
};

// Single-attribute utility: a parametric form plus its admissible domain.
// Values are immutable after construction; evaluation is pure.
class ScalarUtility {
public:
    using Form = std::variant<Exponential, ScaledShiftedExponential, Step, SShaped>;

    ScalarUtility(Exponential f, Interval domain = Interval::reals());
    ScalarUtility(ScaledShiftedExponential f, Interval domain = Interval::reals());
    ScalarUtility(Step f, Interval domain = Interval::reals());
    ScalarUtility(SShaped f, Interval domain = Interval::reals());

    static ScalarUtility exponential(double gamma);
    static ScalarUtility scaled_shifted_exponential(double gamma, double c, double s0);
    static ScalarUtility step(double s_bar, double eta);
    static ScalarUtility s_shaped(double s0, double gamma, double lambda);

    // Throws InputError outside the declared domain.
    ExtReal operator()(double x) const;

    const Interval& domain() const { return domain_; }
    const Form& form() const { return form_; }

    bool is_exponential() const { return std::holds_alternative<Exponential>(form_); }
    std::string form_name() const;

private:
    Form form_;
    Interval domain_;
};

// Multi-attribute utility u(x,s) = u1(x) + u2(s) + k*u1(x)*u2(s), with the
// -inf-absorbing extended arithmetic of ExtReal. When capped, the value is
// the same on dom(u) = { 1 + k*u1(x) in [0,inf) and 1 + k*u2(s) in [0,inf) }
// and -inf elsewhere.
struct MultiUtility {
    ScalarUtility u1;
    ScalarUtility u2;
    double k = 0.0;
    bool capped = false;

    ExtReal operator()(double x, double s) const;
};

// Composition of already-evaluated scalar utilities; single source of truth
// for the extended-real conventions of the decomposition.
ExtReal combine_utilities(ExtReal v1, ExtReal v2, double k, bool capped);

// True iff 1 + k*v lies in {-inf} U [0, +inf], the range on which the
// other coordinate of u stays non-decreasing.
bool monotone_factor_ok(ExtReal v, double k);

// Closed-form finiteness thresholds (x_low, s_low) of the capped utility for
// exponential u1 and scaled-shifted-exponential u2 with c > 0 and k > 0;
// throws InputError for any other combination.
struct DomainBounds {
    double x_low;
    double s_low;
};
DomainBounds effective_domain_bounds(const MultiUtility& u);

// Pointwise monotonicity diagnostics on probe grids. monotone_in_x holds one
// entry per s-probe (monotone in x at that rating) and vice versa.
struct MonotonicityReport {
    struct Entry {
        double point;
        double one_plus_k_u; // may be +/-inf
        bool monotone;
    };
    std::vector<Entry> in_x; // indexed by s-probes
    std::vector<Entry> in_s; // indexed by x-probes
    bool monotone_in_x_everywhere = true;
    bool monotone_in_s_everywhere = true;
};
MonotonicityReport monotonicity_report(const MultiUtility& u,
                                       const std::vector<double>& x_probes,
                                       const std::vector<double>& s_probes);

} // namespace esgrisk

#endif
