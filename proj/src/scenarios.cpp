#include "esgrisk/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "esgrisk/errors.hpp"
#include "esgrisk/stats.hpp"

namespace esgrisk {

namespace {

// Deterministic normal stream: one 53-bit uniform in (0,1) per engine draw,
// mapped through the normal quantile. Stream layout per sample is fixed as
// the 2n return normals followed by the n jump latents.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double next() {
        const double u =
            (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
        return inverse_normal_cdf(u);
    }

private:
    std::mt19937_64 engine_;
};

void check_correlation_shape(const Eigen::MatrixXd& m, Eigen::Index expected, const char* name) {
    if (m.rows() != expected || m.cols() != expected)
        throw InputError(std::string(name) + ": wrong dimensions");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (std::abs(m(i, i) - 1.0) > 1e-12)
            throw InputError(std::string(name) + ": diagonal must be 1");
        for (Eigen::Index j = 0; j < i; ++j) {
            if (std::abs(m(i, j) - m(j, i)) > 1e-12)
                throw InputError(std::string(name) + ": not symmetric");
        }
    }
}

} // namespace

double normalize_rating(double raw) {
    if (!(raw >= 0.0 && raw <= 50.0)) throw InputError("raw rating outside [0,50]");
    return (50.0 - raw) / 50.0;
}

double rescale_rating(double s_norm) {
    if (!(s_norm >= 0.0 && s_norm < 1.0))
        throw InputError("normalized rating outside [0,1) (the scale has a pole at 1)");
    return std::tan(std::numbers::pi / 2.0 * s_norm);
}

double normalized_from_rescaled(double s_rescaled) {
    if (!(s_rescaled >= 0.0)) throw InputError("rescaled rating must be >= 0");
    return 2.0 / std::numbers::pi * std::atan(s_rescaled);
}

void AssetDynamics::validate() const {
    if (!(sigma_x > 0.0)) throw InputError("AssetDynamics: sigma_x must be > 0");
    if (!(sigma_s >= 0.0)) throw InputError("AssetDynamics: sigma_s must be >= 0");
    if (!(rho >= -1.0 && rho <= 1.0)) throw InputError("AssetDynamics: rho outside [-1,1]");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("AssetDynamics: p outside [0,1]");
    if (!(s0_rescaled > 0.0)) throw InputError("AssetDynamics: s0_rescaled must be > 0");
    if (!std::isfinite(mu_x) || !std::isfinite(mu_s) || !std::isfinite(notional))
        throw InputError("AssetDynamics: parameters must be finite");
}

void BasketDynamics::validate() const {
    if (assets.empty()) throw InputError("BasketDynamics: empty basket");
    for (const auto& a : assets) a.validate();
    const auto n = static_cast<Eigen::Index>(assets.size());
    check_correlation_shape(z_correlation, 2 * n, "z_correlation");
    check_correlation_shape(jump_correlation, n, "jump_correlation");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(z_correlation(2 * i, 2 * i + 1) - assets[i].rho) > 1e-9)
            throw InputError("z_correlation: own-asset block must carry the asset's rho");
    }
    // PSD is verified by the sampling factorization itself.
}

BasketDynamics BasketDynamics::independent(std::vector<AssetDynamics> assets) {
    BasketDynamics b;
    const auto n = static_cast<Eigen::Index>(assets.size());
    b.z_correlation = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
        b.z_correlation(2 * i, 2 * i + 1) = assets[i].rho;
        b.z_correlation(2 * i + 1, 2 * i) = assets[i].rho;
    }
    b.jump_correlation = Eigen::MatrixXd::Identity(n, n);
    b.assets = std::move(assets);
    return b;
}

ScenarioSet ScenarioSet::from_columns(std::vector<double> x, std::vector<double> s_norm,
                                      double horizon, std::uint64_t seed) {
    if (x.size() != s_norm.size()) throw InputError("ScenarioSet: column length mismatch");
    if (x.empty()) throw InputError("ScenarioSet: empty");
    for (double s : s_norm)
        if (!(s >= 0.0 && s <= 1.0)) throw InputError("ScenarioSet: rating outside [0,1]");
    ScenarioSet set(x.size(), 1, horizon, seed);
    set.x_ = std::move(x);
    set.s_ = std::move(s_norm);
    return set;
}

ScenarioSet ScenarioSet::asset_slice(std::size_t asset) const {
    if (asset >= n_assets_) throw InputError("asset index out of range");
    ScenarioSet out(n_samples_, 1, horizon_, seed_);
    for (std::size_t i = 0; i < n_samples_; ++i) {
        out.x_[i] = x(i, asset);
        out.s_[i] = s_norm(i, asset);
    }
    return out;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* name, double clip_tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success)
        throw ModelError(std::string(name) + ": eigendecomposition failed");
    Eigen::VectorXd lambda = es.eigenvalues();
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < -clip_tol)
            throw InputError(std::string(name) + " is not positive semidefinite");
        lambda[i] = std::sqrt(std::max(lambda[i], 0.0));
    }
    return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
}

ScenarioSet sample_single(const AssetDynamics& dyn, double horizon, std::size_t count,
                          std::uint64_t seed) {
    // Degenerate one-asset basket; shares the stream protocol bit for bit.
    return sample_basket(BasketDynamics::independent({dyn}), horizon, count, seed);
}

ScenarioSet sample_basket(const BasketDynamics& dyn, double horizon, std::size_t count,
                          std::uint64_t seed) {
    dyn.validate();
    if (count < 1) throw InputError("sample_basket: count must be >= 1");
    if (!(horizon > 0.0)) throw InputError("sample_basket: horizon must be > 0");

    const std::size_t n = dyn.size();
    const Eigen::MatrixXd a = psd_sqrt(dyn.z_correlation, "z_correlation");
    const Eigen::MatrixXd b = psd_sqrt(dyn.jump_correlation, "jump_correlation");
    const double sqrt_dt = std::sqrt(horizon);

    std::vector<double> jump_threshold(n);
    for (std::size_t i = 0; i < n; ++i) jump_threshold[i] = inverse_normal_cdf(dyn.assets[i].p);

    NormalStream normals(seed);
    ScenarioSet set(count, n, horizon, seed);
    Eigen::VectorXd eps(2 * n), lat(n);
    for (std::size_t i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < eps.size(); ++j) eps[j] = normals.next();
        for (Eigen::Index j = 0; j < lat.size(); ++j) lat[j] = normals.next();
        const Eigen::VectorXd g = a * eps;
        const Eigen::VectorXd h = b * lat;
        for (std::size_t j = 0; j < n; ++j) {
            const AssetDynamics& d = dyn.assets[j];
            const double z1 = d.sigma_x * g[2 * j];
            const double z2 = d.sigma_s * g[2 * j + 1];
            const double r_x = d.mu_x * horizon + sqrt_dt * z1;
            const bool jump = h[static_cast<Eigen::Index>(j)] <= jump_threshold[j];
            const double r_s = jump ? d.mu_s * horizon + sqrt_dt * z2 : 0.0;
            set.x_[i * n + j] = d.notional * std::expm1(r_x);
            set.s_[i * n + j] = normalized_from_rescaled(d.s0_rescaled * std::exp(r_s));
        }
    }
    return set;
}

} // namespace esgrisk
