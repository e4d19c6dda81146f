#ifndef ESGRISK_CONFIG_HPP
#define ESGRISK_CONFIG_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "esgrisk/portfolio.hpp"
#include "esgrisk/risk.hpp"
#include "esgrisk/utility.hpp"

namespace esgrisk {

// Flat key-value run configuration with section prefixes (`sim.samples=10000`).
// Every field has a default; unknown keys are rejected by name.
struct RunConfig {
    // utility section (canonical keys: u1.form, u1.gamma, u2.form, u2.gamma,
    // u2.c, u2.s0, k, capped; step/s-shaped forms add u2.s_bar, u2.eta,
    // u2.lambda)
    std::string u1_form = "exponential";
    double u1_gamma = 1.0;
    std::string u2_form = "scaled_shifted_exponential";
    double u2_gamma = 0.75;
    double u2_c = 0.1;
    double u2_s0 = 0.5982;
    double u2_s_bar = 0.5;
    double u2_eta = std::numeric_limits<double>::infinity();
    double u2_lambda = 1.0;
    double k = 1.0;
    bool capped = false;

    // sim section
    double sim_delta = 1.0 / 12.0;
    std::size_t sim_samples = 10000;
    std::uint64_t sim_seed = 1;

    // risk section
    RiskConfig risk;

    // portfolio section
    double pf_lower = 0.0;
    double pf_upper = 0.2;
    std::size_t pf_window = 20;
    std::vector<std::string> pf_strategies = {"entropic", "esg", "equal"};
    int pf_multistarts = 8;
    double pf_opt_tol = 1e-6;
    int pf_max_iterations = 100;
    double pf_fd_step = 1e-4;

    // io section
    std::string out_dir = ".";

    static RunConfig from_file(const std::string& path);

    // Apply one key; throws InputError naming an unknown key or bad value.
    void set(const std::string& key, const std::string& value);

    ScalarUtility build_u1() const;
    ScalarUtility build_u2() const;
    MultiUtility build_utility() const;
    OptConfig build_opt() const;

    // The canonical utility section, e.g. for emission next to calibrated
    // dynamics.
    std::string utility_section() const;
};

} // namespace esgrisk

#endif
