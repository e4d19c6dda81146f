#ifndef ESGRISK_RISK_HPP
#define ESGRISK_RISK_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "esgrisk/ext_real.hpp"
#include "esgrisk/scenarios.hpp"
#include "esgrisk/utility.hpp"

namespace esgrisk {

struct RiskConfig {
    double root_tol = 1e-10;    // absolute tolerance on the cash amount
    double bracket_seed = 1.0;  // initial bracket half-width
    double bracket_cap = 1e9;   // beyond this the risk is declared infinite
    int max_iter = 200;

    void validate() const;
};

struct RiskResult {
    ExtReal value;                  // rho (or rho_hat) in dollars; +/-inf possible
    int iterations = 0;             // objective evaluations spent
    double bracket_lo = 0.0;        // final bracket around the root
    double bracket_hi = 0.0;
    double acceptance_utility = 0.0; // E[u(X + value, S)]; meaningful for finite value
};

// Empirical mean of u(X_i + m, S_i) over a single-position scenario set;
// -inf as soon as any sample evaluates to -inf.
ExtReal expected_utility(const MultiUtility& u, const ScenarioSet& scen, double m);

// inf{ m : E[u(X+m, S)] >= 0 } on the empirical measure, located by bracket
// doubling from bracket_seed and bisection to root_tol. POS_INF when no m
// within bracket_cap achieves acceptance, NEG_INF when acceptance holds below
// -bracket_cap. Throws ModelError if the acceptance map is found non-monotone.
RiskResult shortfall_risk(const MultiUtility& u, const ScenarioSet& scen,
                          const RiskConfig& cfg = {});

// Classical financial shortfall risk: same solve with u2 absent.
RiskResult financial_shortfall_risk(const ScalarUtility& u1, const ScenarioSet& scen,
                                    const RiskConfig& cfg = {});

// (1/gamma1) * log( mean exp(-gamma1 X_i) ), log-sum-exp guarded.
double entropic_closed_form(double gamma1, const ScenarioSet& scen, std::size_t asset = 0);

// rho[X,S] - rho_hat[X] on the same samples (common random numbers).
ExtReal esg_risk_premium(const MultiUtility& u, const ScenarioSet& scen,
                         const RiskConfig& cfg = {});

// Mean of u2(S_i); zero characterizes indifference positions, the sign
// separates favorable (>0) from unfavorable (<0) ESG exposures.
double indifference_gap(const ScalarUtility& u2, const ScenarioSet& scen);

// rho[X, clamp(S + m, 0, 1)] over a grid of deterministic rating shifts,
// with the central finite-difference marginal curve.
struct ShiftCurve {
    std::vector<double> shift;
    std::vector<double> rho;
    std::vector<double> marginal_rho;
};
ShiftCurve shift_curve(const MultiUtility& u, const ScenarioSet& scen,
                       const std::vector<double>& shifts, const RiskConfig& cfg = {});

namespace detail {

// m -> empirical mean utility with per-scenario caching. The rating-side
// values are m-independent and computed once; exponential u1 additionally
// caches exp(-gamma x_i) so each probe costs one pass of multiply-adds.
class AcceptanceObjective {
public:
    AcceptanceObjective(const MultiUtility& u, const ScenarioSet& scen);
    AcceptanceObjective(const ScalarUtility& u1, const ScenarioSet& scen);

    ExtReal operator()(double m) const;
    std::size_t n_samples() const { return xs_.size(); }

private:
    ExtReal eval_generic(double m) const;

    std::optional<MultiUtility> multi_;
    std::optional<ScalarUtility> financial_;
    std::vector<double> xs_;
    std::vector<double> a_; // 1 + k * u2(s_i)
    std::vector<double> b_; // u2(s_i)
    std::vector<double> exp_neg_gamma_x_;
    double gamma1_ = 0.0;
    bool fast_ = false;           // exponential-u1 cached path usable
    bool const_neg_inf_ = false;  // every sample is -inf for every m
    bool capped_ = false;
    double k_ = 0.0;
};

// hint, when given, is tried as a bracket center before the standard
// expansion; it never changes the result, only the number of evaluations.
RiskResult solve_shortfall(const AcceptanceObjective& f, const RiskConfig& cfg,
                           std::optional<double> hint = std::nullopt,
                           double hint_half_width = 0.05);

} // namespace detail

} // namespace esgrisk

#endif
