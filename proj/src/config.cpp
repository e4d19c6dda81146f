#include "esgrisk/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "esgrisk/csv_io.hpp"
#include "esgrisk/errors.hpp"

namespace esgrisk {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
    const std::string t = trim(value);
    if (t == "inf") return std::numeric_limits<double>::infinity();
    if (t == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw InputError("config key '" + key + "': cannot parse number '" + value + "'");
    return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& value) {
    const std::string t = trim(value);
    Int v{};
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw InputError("config key '" + key + "': cannot parse integer '" + value + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    const std::string t = trim(value);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw InputError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

} // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path + ": cannot open config");
    RunConfig cfg;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError(path + " line " + std::to_string(row) + ": expected key=value");
        cfg.set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (key == "u1.form") u1_form = value;
    else if (key == "u1.gamma") u1_gamma = to_double(key, value);
    else if (key == "u2.form") u2_form = value;
    else if (key == "u2.gamma") u2_gamma = to_double(key, value);
    else if (key == "u2.c") u2_c = to_double(key, value);
    else if (key == "u2.s0") u2_s0 = to_double(key, value);
    else if (key == "u2.s_bar") u2_s_bar = to_double(key, value);
    else if (key == "u2.eta") u2_eta = to_double(key, value);
    else if (key == "u2.lambda") u2_lambda = to_double(key, value);
    else if (key == "k") k = to_double(key, value);
    else if (key == "capped") capped = to_bool(key, value);
    else if (key == "sim.delta") sim_delta = to_double(key, value);
    else if (key == "sim.samples") sim_samples = to_int<std::size_t>(key, value);
    else if (key == "sim.seed") sim_seed = to_int<std::uint64_t>(key, value);
    else if (key == "risk.root_tol") risk.root_tol = to_double(key, value);
    else if (key == "risk.bracket_seed") risk.bracket_seed = to_double(key, value);
    else if (key == "risk.bracket_cap") risk.bracket_cap = to_double(key, value);
    else if (key == "risk.max_iter") risk.max_iter = to_int<int>(key, value);
    else if (key == "portfolio.lower") pf_lower = to_double(key, value);
    else if (key == "portfolio.upper") pf_upper = to_double(key, value);
    else if (key == "portfolio.window") pf_window = to_int<std::size_t>(key, value);
    else if (key == "portfolio.strategies") {
        pf_strategies = split_list(value);
        if (pf_strategies.empty())
            throw InputError("config key 'portfolio.strategies': empty list");
    }
    else if (key == "portfolio.multistarts") pf_multistarts = to_int<int>(key, value);
    else if (key == "portfolio.opt_tol") pf_opt_tol = to_double(key, value);
    else if (key == "portfolio.max_iterations") pf_max_iterations = to_int<int>(key, value);
    else if (key == "portfolio.fd_step") pf_fd_step = to_double(key, value);
    else if (key == "io.out_dir") out_dir = value;
    else throw InputError("unknown config key '" + key + "'");
}

ScalarUtility RunConfig::build_u1() const {
    if (u1_form == "exponential") return ScalarUtility::exponential(u1_gamma);
    throw InputError("config key 'u1.form': unsupported form '" + u1_form + "'");
}

ScalarUtility RunConfig::build_u2() const {
    if (u2_form == "scaled_shifted_exponential")
        return ScalarUtility::scaled_shifted_exponential(u2_gamma, u2_c, u2_s0);
    if (u2_form == "step") return ScalarUtility::step(u2_s_bar, u2_eta);
    if (u2_form == "s_shaped") return ScalarUtility::s_shaped(u2_s0, u2_gamma, u2_lambda);
    throw InputError("config key 'u2.form': unsupported form '" + u2_form + "'");
}

MultiUtility RunConfig::build_utility() const { return MultiUtility{build_u1(), build_u2(), k, capped}; }

OptConfig RunConfig::build_opt() const {
    OptConfig opt;
    opt.opt_tol = pf_opt_tol;
    opt.max_iterations = pf_max_iterations;
    opt.multistarts = pf_multistarts;
    opt.seed = sim_seed;
    opt.fd_step = pf_fd_step;
    opt.risk = risk;
    return opt;
}

std::string RunConfig::utility_section() const {
    std::string out;
    out += "u1.form=" + u1_form + "\n";
    out += "u1.gamma=" + format_double(u1_gamma) + "\n";
    out += "u2.form=" + u2_form + "\n";
    out += "u2.gamma=" + format_double(u2_gamma) + "\n";
    out += "u2.c=" + format_double(u2_c) + "\n";
    out += "u2.s0=" + format_double(u2_s0) + "\n";
    out += "k=" + format_double(k) + "\n";
    out += "capped=" + std::string(capped ? "true" : "false") + "\n";
    return out;
}

} // namespace esgrisk
