#ifndef ACL_MODELS_HPP
#define ACL_MODELS_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <variant>

#include "acl/common.hpp"
#include "acl/features.hpp"
#include "acl/rng.hpp"

namespace acl {

/// Axis-aligned box {x : l <= x <= u}.
struct Box {
    VectorXd lower;
    VectorXd upper;

    Box() = default;
    Box(VectorXd l, VectorXd u) : lower(std::move(l)), upper(std::move(u)) {
        if (lower.size() != upper.size()) throw DimensionError("box bounds differ in length");
        if (((upper - lower).array() < 0.0).any())
            throw ArgumentError("box needs lower <= upper componentwise");
    }

    static Box unit(int d) { return Box(VectorXd::Zero(d), VectorXd::Ones(d)); }
    static Box centered(int d, double half_width) {
        return Box(VectorXd::Constant(d, -half_width), VectorXd::Constant(d, half_width));
    }

    int dim() const { return static_cast<int>(lower.size()); }
    double width_inf() const { return (upper - lower).maxCoeff(); }
    bool empty() const { return lower.size() == 0; }

    bool contains(const VectorXd& x, double slack = 0.0) const {
        return (x.array() >= lower.array() - slack).all() &&
               (x.array() <= upper.array() + slack).all();
    }
    VectorXd clamp(const VectorXd& x) const {
        return x.cwiseMax(lower).cwiseMin(upper);
    }
};

/// Mixture of K point masses: weights alpha_k >= 0 summing to one, centroids
/// as the columns of a d x K matrix.
struct DiracMixture {
    VectorXd weights;
    MatrixXd centroids;  // d x K

    int components() const { return static_cast<int>(weights.size()); }
    int dim() const { return static_cast<int>(centroids.rows()); }
};

/// Mixture of K axis-aligned Gaussians; variances holds the covariance
/// diagonals, one column per component.
struct GaussianMixture {
    VectorXd weights;
    MatrixXd means;      // d x K
    MatrixXd variances;  // d x K

    int components() const { return static_cast<int>(weights.size()); }
    int dim() const { return static_cast<int>(means.rows()); }
};

inline double variance_floor(const Box& box) {
    const double w = box.width_inf();
    return 1e-8 * w * w;
}

inline void validate(const DiracMixture& mix, const Box& box) {
    if (mix.centroids.cols() != mix.weights.size())
        throw DimensionError("weights/centroids size mismatch");
    if (std::abs(mix.weights.sum() - 1.0) > 1e-9) throw ArgumentError("weights must sum to 1");
    if (mix.weights.minCoeff() < 0.0) throw ArgumentError("weights must be nonnegative");
    for (int k = 0; k < mix.components(); ++k)
        if (!box.contains(mix.centroids.col(k), 1e-12 * (1.0 + box.width_inf())))
            throw ArgumentError("centroid outside the task box");
}

inline void validate(const GaussianMixture& mix, const Box& box, double S) {
    if (mix.means.cols() != mix.weights.size() || mix.variances.cols() != mix.weights.size())
        throw DimensionError("weights/means/variances size mismatch");
    if (std::abs(mix.weights.sum() - 1.0) > 1e-9) throw ArgumentError("weights must sum to 1");
    if (mix.weights.minCoeff() < 0.0) throw ArgumentError("weights must be nonnegative");
    const double floor = variance_floor(box);
    for (int k = 0; k < mix.components(); ++k) {
        if (!box.contains(mix.means.col(k), 1e-12 * (1.0 + box.width_inf())))
            throw ArgumentError("mean outside the task box");
        if (mix.variances.col(k).maxCoeff() > S * (1.0 + 1e-12))
            throw ArgumentError("variance above the cap S");
        if (mix.variances.col(k).minCoeff() < floor * (1.0 - 1e-12))
            throw ArgumentError("variance below the floor");
    }
}

// ---------------------------------------------------------------------------
// analytic model sketches
// ---------------------------------------------------------------------------

/// Sketch of a Dirac mixture: sum_k alpha_k Psi(c_k). Valid for any map.
inline VectorXcd sketch_model(const FeatureMap& map, const DiracMixture& mix) {
    if (mix.dim() != map.dim()) throw DimensionError("model dimension does not match map");
    VectorXcd out = VectorXcd::Zero(map.size());
    for (int k = 0; k < mix.components(); ++k)
        out += mix.weights[k] * map.apply(mix.centroids.col(k));
    return out;
}

namespace detail {

// Per-component Gaussian sketch: v_j = (1/sqrt m) e^{i(omega_j . mu + xi_j)}
// e^{-(1/2) sum_l omega_jl^2 gamma_l}; this is the characteristic function of
// N(mu, diag(gamma)) evaluated at the map's frequencies.
inline VectorXcd gaussian_component_sketch(const FeatureMap& map, const VectorXd& mu,
                                           const VectorXd& gamma) {
    const int m = map.size();
    const VectorXd phase = map.omega().transpose() * mu + map.dither();
    const VectorXd atten = (-0.5 * (map.omega_squared().transpose() * gamma)).array().exp();
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    VectorXcd v(m);
    for (int j = 0; j < m; ++j) v[j] = std::polar(scale * atten[j], phase[j]);
    return v;
}

}  // namespace detail

/// Sketch of a diagonal Gaussian mixture. Requires the complex exponential
/// nonlinearity: no closed form exists for distorted maps.
inline VectorXcd sketch_model(const FeatureMap& map, const GaussianMixture& mix) {
    if (map.nonlinearity().kind() != PeriodicKind::ComplexExponential)
        throw UnsupportedAnalyticSketchError(
            "gaussian model sketches need the complex exponential map");
    if (mix.dim() != map.dim()) throw DimensionError("model dimension does not match map");
    VectorXcd out = VectorXcd::Zero(map.size());
    for (int k = 0; k < mix.components(); ++k)
        out += mix.weights[k] *
               detail::gaussian_component_sketch(map, mix.means.col(k), mix.variances.col(k));
    if (map.renormalize()) out *= map.renorm_factor();
    return out;
}

using MixtureModel = std::variant<DiracMixture, GaussianMixture>;

inline VectorXcd sketch_model(const FeatureMap& map, const MixtureModel& model) {
    return std::visit([&](const auto& mix) { return sketch_model(map, mix); }, model);
}

// ---------------------------------------------------------------------------
// sketch gradients
//
// Free parameters are flattened as
//   k-means: [alpha_1..alpha_K, c_1 (d), ..., c_K (d)]
//   GMM:     [w_1..w_K, mu_1..mu_K (d each), gamma_1..gamma_K (d each)]
// and the Jacobian column order follows this layout.
// ---------------------------------------------------------------------------

inline int parameter_count(const DiracMixture& mix) {
    return mix.components() * (1 + mix.dim());
}
inline int parameter_count(const GaussianMixture& mix) {
    return mix.components() * (1 + 2 * mix.dim());
}

/// d(sketch)/d(params) as an m x P complex matrix in the layout above.
inline MatrixXcd sketch_model_jacobian(const FeatureMap& map, const DiracMixture& mix) {
    if (mix.dim() != map.dim()) throw DimensionError("model dimension does not match map");
    const int m = map.size(), K = mix.components(), d = mix.dim();
    MatrixXcd J(m, K + K * d);
    const cdouble iu(0.0, 1.0);
    for (int k = 0; k < K; ++k) {
        const VectorXcd phi = map.apply(mix.centroids.col(k));
        J.col(k) = phi;
        for (int j = 0; j < m; ++j) {
            const cdouble base = iu * mix.weights[k] * phi[j];
            for (int l = 0; l < d; ++l) J(j, K + k * d + l) = base * map.omega()(l, j);
        }
    }
    return J;
}

inline MatrixXcd sketch_model_jacobian(const FeatureMap& map, const GaussianMixture& mix) {
    if (map.nonlinearity().kind() != PeriodicKind::ComplexExponential)
        throw UnsupportedAnalyticSketchError(
            "gaussian model sketches need the complex exponential map");
    if (mix.dim() != map.dim()) throw DimensionError("model dimension does not match map");
    const int m = map.size(), K = mix.components(), d = mix.dim();
    MatrixXcd J(m, K + 2 * K * d);
    const cdouble iu(0.0, 1.0);
    const cdouble rn = map.renormalize() ? map.renorm_factor() : cdouble(1.0, 0.0);
    for (int k = 0; k < K; ++k) {
        const VectorXcd v =
            detail::gaussian_component_sketch(map, mix.means.col(k), mix.variances.col(k));
        J.col(k) = rn * v;
        for (int j = 0; j < m; ++j) {
            const cdouble wv = rn * mix.weights[k] * v[j];
            for (int l = 0; l < d; ++l) {
                J(j, K + k * d + l) = iu * wv * map.omega()(l, j);
                J(j, K + K * d + k * d + l) = -0.5 * wv * map.omega_squared()(l, j);
            }
        }
    }
    return J;
}

inline MatrixXcd sketch_model_jacobian(const FeatureMap& map, const MixtureModel& model) {
    return std::visit([&](const auto& mix) { return sketch_model_jacobian(map, mix); }, model);
}

inline int parameter_count(const MixtureModel& model) {
    return std::visit([](const auto& mix) { return parameter_count(mix); }, model);
}

// ---------------------------------------------------------------------------
// box geometry and sketch-size bounds
// ---------------------------------------------------------------------------

/// Enlarges the box by rho*S on every side; a Gaussian mixture whose means
/// live in the original box and whose variances are capped by S keeps almost
/// all of its mass in here.
inline Box extended_box(const Box& box, double rho, double S) {
    if (!(rho > 0.0) || !(S > 0.0)) throw ArgumentError("rho and S must be positive");
    const VectorXd pad = VectorXd::Constant(box.dim(), rho * S);
    return Box(box.lower - pad, box.upper + pad);
}

/// Covering-entropy bound of the box at radius nu, in nats:
/// d log(1 + sqrt(d) ||u - l||_inf / nu).
inline double entropy_bound(const Box& box, double nu) {
    if (!(nu > 0.0)) throw ArgumentError("nu must be positive");
    const double d = static_cast<double>(box.dim());
    return d * std::log(1.0 + std::sqrt(d) * box.width_inf() / nu);
}

/// Bound on the Gaussian-mixture mass escaping the extended box:
/// min(1, d/(rho sqrt(2 pi)) e^{-rho^2/2}).
inline double zeta_bound(double rho, int d) {
    if (!(rho > 0.0)) throw ArgumentError("rho must be positive");
    const double tail =
        static_cast<double>(d) / (rho * std::sqrt(kTwoPi)) * std::exp(-0.5 * rho * rho);
    return std::min(1.0, tail);
}

struct SketchSizeTask {
    enum class Kind { KMeans, GMM } kind = Kind::KMeans;
    double rho = 0.0;  // GMM only
    double S = 0.0;    // GMM only

    static SketchSizeTask kmeans() { return {}; }
    static SketchSizeTask gmm(double rho, double S) {
        SketchSizeTask t;
        t.kind = Kind::GMM;
        t.rho = rho;
        t.S = S;
        return t;
    }
};

/// Sketch size sufficient for the distortion error bound at level eps0:
/// m >= 128 eps0^-2 d log(1 + c_f sqrt(d) W / eps0), where W is the box width
/// (extended by 2 rho S for GMM). Uses the closed-form mean Lipschitz
/// constant when one is known.
inline std::int64_t required_sketch_size(const PeriodicFunction& f, double C_Lambda,
                                         const Box& box, double eps0,
                                         const SketchSizeTask& task) {
    if (!(eps0 > 0.0)) throw ArgumentError("eps0 must be positive");
    double width = box.width_inf();
    if (task.kind == SketchSizeTask::Kind::GMM) {
        if (!(task.rho > 0.0) || !(task.S > 0.0))
            throw ArgumentError("gmm sketch-size bound needs rho > 0 and S > 0");
        width += 2.0 * task.rho * task.S;
    }
    const auto known = f.known_mean_lipschitz();
    const double cf = known ? f.constant_cf(C_Lambda, *known) : f.constant_cf(C_Lambda);
    const double d = static_cast<double>(box.dim());
    const double bound =
        128.0 / (eps0 * eps0) * d * std::log(1.0 + cf * std::sqrt(d) * width / eps0);
    return static_cast<std::int64_t>(std::ceil(bound));
}

// ---------------------------------------------------------------------------
// sampling
// ---------------------------------------------------------------------------

/// Draws n iid samples from the mixture, one row per sample. When
/// force_cover is true the first K rows take one component each, so every
/// mode is represented even for tiny n.
inline MatrixXd sample_mixture(const GaussianMixture& mix, int n, std::uint64_t seed,
                               bool force_cover = false) {
    if (n < 1) throw ArgumentError("need n >= 1 samples");
    auto eng = make_engine(seed);
    std::normal_distribution<double> gauss;
    std::discrete_distribution<int> pick(mix.weights.data(),
                                         mix.weights.data() + mix.weights.size());
    const int d = mix.dim();
    MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        const int k = (force_cover && i < mix.components()) ? i : pick(eng);
        for (int j = 0; j < d; ++j)
            X(i, j) = mix.means(j, k) + std::sqrt(mix.variances(j, k)) * gauss(eng);
    }
    return X;
}

}  // namespace acl

#endif  // ACL_MODELS_HPP
