#ifndef ESGRISK_SCENARIOS_HPP
#define ESGRISK_SCENARIOS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace esgrisk {

// Raw vendor score in [0,50] -> order-reversed normalized rating in [0,1].
double normalize_rating(double raw);

// Normalized rating in [0,1) -> tan(pi/2 * s), a positive level suitable for
// multiplicative log-change dynamics. Inverse of normalized_from_rescaled.
double rescale_rating(double s_norm);
double normalized_from_rescaled(double s_rescaled);

// One asset's monthly forecasting model:
//   R_X = mu_x * dt + sqrt(dt) * Z1,   X = notional * (e^{R_X} - 1)
//   R_S = J * (mu_s * dt + sqrt(dt) * Z2),  S_resc = s0_rescaled * e^{R_S}
// with (Z1, Z2) centered normal, corr rho conditional on the jump J ~ Bernoulli(p).
struct AssetDynamics {
    double mu_x = 0.0;
    double sigma_x = 0.0;
    double mu_s = 0.0;
    double sigma_s = 0.0;
    double rho = 0.0;
    double p = 0.0;
    double s0_rescaled = 1.0;
    double notional = 1.0;

    void validate() const;
};

// Joint model for n assets. z_correlation is the 2n x 2n correlation matrix of
// the standardized return normals ordered (Z1^1, Z2^1, ..., Z1^n, Z2^n);
// jump_correlation is the n x n correlation of the Gaussian-copula latents
// driving the jump indicators.
struct BasketDynamics {
    std::vector<AssetDynamics> assets;
    Eigen::MatrixXd z_correlation;
    Eigen::MatrixXd jump_correlation;

    std::size_t size() const { return assets.size(); }
    void validate() const;

    // Cross-asset independence; each asset keeps its own (Z1, Z2) correlation.
    static BasketDynamics independent(std::vector<AssetDynamics> assets);
};

// M joint samples of (X, S_norm) per asset, immutable after creation.
class ScenarioSet {
public:
    static ScenarioSet from_columns(std::vector<double> x, std::vector<double> s_norm,
                                    double horizon, std::uint64_t seed);

    std::size_t n_samples() const { return n_samples_; }
    std::size_t n_assets() const { return n_assets_; }
    double horizon() const { return horizon_; }
    std::uint64_t seed() const { return seed_; }

    double x(std::size_t sample, std::size_t asset = 0) const {
        return x_[sample * n_assets_ + asset];
    }
    double s_norm(std::size_t sample, std::size_t asset = 0) const {
        return s_[sample * n_assets_ + asset];
    }

    const std::vector<double>& x_data() const { return x_; }
    const std::vector<double>& s_data() const { return s_; }

    ScenarioSet asset_slice(std::size_t asset) const;

private:
    friend ScenarioSet sample_basket(const BasketDynamics&, double, std::size_t, std::uint64_t);
    friend ScenarioSet portfolio_exposure(const std::vector<double>&, const ScenarioSet&);

    ScenarioSet(std::size_t n_samples, std::size_t n_assets, double horizon, std::uint64_t seed)
        : n_samples_(n_samples), n_assets_(n_assets), horizon_(horizon), seed_(seed),
          x_(n_samples * n_assets), s_(n_samples * n_assets) {}

    std::size_t n_samples_;
    std::size_t n_assets_;
    double horizon_;
    std::uint64_t seed_;
    std::vector<double> x_; // row-major [sample][asset]
    std::vector<double> s_;
};

ScenarioSet sample_single(const AssetDynamics& dyn, double horizon, std::size_t count,
                          std::uint64_t seed);
ScenarioSet sample_basket(const BasketDynamics& dyn, double horizon, std::size_t count,
                          std::uint64_t seed);

// Symmetric PSD square root via eigendecomposition. Eigenvalues below
// -clip_tol throw InputError(name + " is not positive semidefinite");
// those in [-clip_tol, 0) are clipped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* name, double clip_tol = 1e-10);

} // namespace esgrisk

#endif
