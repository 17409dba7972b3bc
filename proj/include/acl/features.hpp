#ifndef ACL_FEATURES_HPP
#define ACL_FEATURES_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "acl/common.hpp"
#include "acl/periodic.hpp"
#include "acl/rng.hpp"

namespace acl {

enum class FrequencyLaw { Gaussian, FoldedGaussian };

inline const char* to_string(FrequencyLaw law) {
    return law == FrequencyLaw::Gaussian ? "gaussian" : "folded_gaussian";
}

/// Law of the random frequency columns omega_j.
struct FrequencySampler {
    FrequencyLaw law = FrequencyLaw::Gaussian;
    double sigma2 = 1.0;  // per-coordinate variance scale
    int dim = 1;

    FrequencySampler() = default;
    FrequencySampler(FrequencyLaw l, double s2, int d) : law(l), sigma2(s2), dim(d) {
        if (!(sigma2 > 0.0)) throw ArgumentError("frequency sigma2 must be positive");
        if (dim < 1) throw ArgumentError("frequency dimension must be >= 1");
    }
};

/// Draws the d x m frequency matrix. Gaussian law: columns iid N(0, sigma2 I).
/// Folded Gaussian law: a uniformly random direction scaled by |g| with
/// g ~ N(0, d sigma2), which matches the Gaussian law's E||omega||^2 while
/// putting more mass on low radii.
inline MatrixXd sample_frequencies(const FrequencySampler& sampler, int m, std::uint64_t seed) {
    if (m < 1) throw ArgumentError("m must be >= 1");
    const int d = sampler.dim;
    MatrixXd omega(d, m);
    auto eng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (sampler.law == FrequencyLaw::Gaussian) {
        const double sigma = std::sqrt(sampler.sigma2);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < d; ++i) omega(i, j) = sigma * gauss(eng);
    } else {
        const double radial_sigma = std::sqrt(static_cast<double>(d) * sampler.sigma2);
        for (int j = 0; j < m; ++j) {
            VectorXd dir(d);
            double nrm = 0.0;
            do {
                for (int i = 0; i < d; ++i) dir[i] = gauss(eng);
                nrm = dir.norm();
            } while (nrm == 0.0);
            const double radius = std::abs(radial_sigma * gauss(eng));
            omega.col(j) = dir * (radius / nrm);
        }
    }
    return omega;
}

/// Uniform dither xi_j ~ U([0, 2pi)).
inline VectorXd sample_dither(int m, std::uint64_t seed) {
    if (m < 1) throw ArgumentError("m must be >= 1");
    VectorXd xi(m);
    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);
    for (int j = 0; j < m; ++j) xi[j] = uni(eng);
    return xi;
}

/// Everything needed to regenerate a FeatureMap; this is what gets serialized.
/// A missing dither seed means xi = 0 (used by symmetric sketching).
struct FeatureMapConfig {
    int d = 1;
    int m = 1;
    FrequencyLaw law = FrequencyLaw::Gaussian;
    double sigma2 = 1.0;
    std::uint64_t omega_seed = 0;
    std::optional<std::uint64_t> dither_seed;
    PeriodicKind nonlinearity = PeriodicKind::ComplexExponential;
    bool renormalize = false;

    std::string canonical_string() const {
        std::ostringstream ss;
        ss.precision(17);
        ss << "d=" << d << ";m=" << m << ";law=" << to_string(law) << ";sigma2=" << sigma2
           << ";omega_seed=" << omega_seed << ";dither_seed=";
        if (dither_seed)
            ss << *dither_seed;
        else
            ss << "none";
        ss << ";f=" << to_string(nonlinearity) << ";renorm=" << (renormalize ? 1 : 0);
        return ss.str();
    }
};

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace detail

/// Random periodic feature map x -> (1/sqrt(m)) f(Omega^T x + xi), optionally
/// renormalized by 1/F_1. Immutable after construction; applying it is pure.
class FeatureMap {
public:
    static FeatureMap create(const FeatureMapConfig& cfg) {
        return build(cfg, make_function(cfg.nonlinearity));
    }

    /// Builds a map around an arbitrary periodic nonlinearity (e.g. a
    /// tabulated one); cfg.nonlinearity is overridden by f's kind.
    static FeatureMap create(FeatureMapConfig cfg, const PeriodicFunction& f) {
        cfg.nonlinearity = f.kind();
        return build(cfg, f);
    }

    const FeatureMapConfig& config() const { return cfg_; }
    int dim() const { return cfg_.d; }
    int size() const { return cfg_.m; }
    const MatrixXd& omega() const { return omega_; }
    const MatrixXd& omega_squared() const { return omega_sq_; }
    const VectorXd& dither() const { return dither_; }
    const PeriodicFunction& nonlinearity() const { return nonlinearity_; }
    bool renormalize() const { return cfg_.renormalize; }
    std::uint64_t hash() const { return hash_; }

    /// 1/F_1 when renormalizing, 1 otherwise.
    cdouble renorm_factor() const { return renorm_; }

    /// Component j is (1/sqrt(m)) f(omega_j . x + xi_j), times 1/F_1 if the
    /// map renormalizes.
    VectorXcd apply(const VectorXd& x) const {
        VectorXcd out = apply_raw(x);
        if (cfg_.renormalize) out *= renorm_;
        return out;
    }

    /// Same but always without the 1/F_1 factor.
    VectorXcd apply_raw(const VectorXd& x) const {
        if (x.size() != cfg_.d)
            throw DimensionError("feature map expects dimension " + std::to_string(cfg_.d) +
                                 ", got " + std::to_string(x.size()));
        const VectorXd t = omega_.transpose() * x + dither_;
        VectorXcd out(cfg_.m);
        const double scale = 1.0 / std::sqrt(static_cast<double>(cfg_.m));
        for (int j = 0; j < cfg_.m; ++j) out[j] = nonlinearity_.eval(t[j]) * scale;
        return out;
    }

    /// The learning-phase companion: same frequencies and dither, complex
    /// exponential nonlinearity, no renormalization.
    FeatureMap reference() const {
        FeatureMapConfig ref = cfg_;
        ref.nonlinearity = PeriodicKind::ComplexExponential;
        ref.renormalize = false;
        return create(ref);
    }

    /// True when the two maps share Omega and xi (same seeds, law and shape),
    /// regardless of nonlinearity or renormalization.
    bool shares_projection(const FeatureMap& other) const {
        const auto& a = cfg_;
        const auto& b = other.cfg_;
        return a.d == b.d && a.m == b.m && a.law == b.law && a.sigma2 == b.sigma2 &&
               a.omega_seed == b.omega_seed && a.dither_seed == b.dither_seed;
    }

private:
    static PeriodicFunction make_function(PeriodicKind kind) {
        switch (kind) {
            case PeriodicKind::ComplexExponential: return PeriodicFunction::complex_exponential();
            case PeriodicKind::UniversalQuantizer: return PeriodicFunction::universal_quantizer();
            case PeriodicKind::ComplexModulo: return PeriodicFunction::complex_modulo();
            case PeriodicKind::TabulatedCustom:
                throw ArgumentError("tabulated nonlinearities must be attached explicitly");
        }
        throw ArgumentError("unknown nonlinearity");
    }

    static FeatureMap build(const FeatureMapConfig& cfg, const PeriodicFunction& f) {
        if (cfg.d < 1 || cfg.m < 1) throw ArgumentError("feature map needs d >= 1 and m >= 1");
        FeatureMap map;
        map.cfg_ = cfg;
        map.omega_ = sample_frequencies(FrequencySampler(cfg.law, cfg.sigma2, cfg.d), cfg.m,
                                        cfg.omega_seed);
        map.omega_sq_ = map.omega_.cwiseProduct(map.omega_);
        map.dither_ = cfg.dither_seed ? sample_dither(cfg.m, *cfg.dither_seed)
                                      : VectorXd::Zero(cfg.m);
        map.nonlinearity_ = f;
        std::string canon = cfg.canonical_string();
        if (f.kind() == PeriodicKind::TabulatedCustom) {
            // fold the table contents in so distinct custom maps never collide
            std::string bytes(reinterpret_cast<const char*>(f.table().data()),
                              f.table().size() * sizeof(cdouble));
            canon += ";table=" + std::to_string(detail::fnv1a64(bytes));
        }
        map.hash_ = detail::fnv1a64(canon);
        if (cfg.renormalize) {
            const cdouble f1 = map.nonlinearity_.fourier_coefficient(1);
            if (std::abs(f1) < 1e-12)
                throw DegenerateFunctionError("cannot renormalize: F_1 = 0 for " +
                                              std::string(to_string(cfg.nonlinearity)));
            map.renorm_ = 1.0 / f1;
        }
        return map;
    }

    FeatureMap() : nonlinearity_(PeriodicFunction::complex_exponential()) {}

    FeatureMapConfig cfg_;
    MatrixXd omega_;
    MatrixXd omega_sq_;
    VectorXd dither_;
    PeriodicFunction nonlinearity_;
    cdouble renorm_ = {1.0, 0.0};
    std::uint64_t hash_ = 0;
};

/// Bits needed to transmit one feature-map contribution: 2m for one-bit
/// quantized outputs, otherwise two floats per complex entry.
inline std::int64_t contribution_bits(const FeatureMap& map, int float_bits) {
    if (float_bits != 32 && float_bits != 64)
        throw ArgumentError("float_bits must be 32 or 64");
    if (map.nonlinearity().kind() == PeriodicKind::UniversalQuantizer)
        return 2 * static_cast<std::int64_t>(map.size());
    return 2 * static_cast<std::int64_t>(float_bits) * map.size();
}

}  // namespace acl

#endif  // ACL_FEATURES_HPP
