#ifndef ACL_PERIODIC_HPP
#define ACL_PERIODIC_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "acl/common.hpp"

namespace acl {

enum class PeriodicKind {
    ComplexExponential,  // exp(i t), the plain random-Fourier nonlinearity
    UniversalQuantizer,  // sign(exp(i t)), one-bit contributions in {+-1 +-i}
    ComplexModulo,       // normalized sawtooth pair, self-reset ADC model
    TabulatedCustom,     // arbitrary centered 2pi-periodic map given by samples
};

inline const char* to_string(PeriodicKind k) {
    switch (k) {
        case PeriodicKind::ComplexExponential: return "rff";
        case PeriodicKind::UniversalQuantizer: return "quantized";
        case PeriodicKind::ComplexModulo: return "modulo";
        case PeriodicKind::TabulatedCustom: return "tabulated";
    }
    return "unknown";
}

namespace detail {

// sign convention: sign(0) = +1, so q(t) always lies in {+-1 +-i}.
inline double sign_pos(double v) { return v < 0.0 ? -1.0 : 1.0; }

// Normalized modulo: mod_T(t) = 2(t/T - floor(t/T)) - 1, a sawtooth in [-1, 1).
inline double normalized_mod_2pi(double t) {
    double frac = t / kTwoPi;
    return 2.0 * (frac - std::floor(frac)) - 1.0;
}

}  // namespace detail

/// A centered 2pi-periodic complex-valued map f together with its Fourier
/// coefficients F_k, sup-norm and mean Lipschitz constant. Instances are
/// immutable after construction and safe to share between threads.
class PeriodicFunction {
public:
    static PeriodicFunction complex_exponential() {
        return PeriodicFunction(PeriodicKind::ComplexExponential);
    }
    static PeriodicFunction universal_quantizer() {
        return PeriodicFunction(PeriodicKind::UniversalQuantizer);
    }
    static PeriodicFunction complex_modulo() {
        return PeriodicFunction(PeriodicKind::ComplexModulo);
    }

    /// Uniformly sampled values over [0, 2pi). The DC component is subtracted
    /// so the result is centered (F_0 = 0).
    static PeriodicFunction tabulated(std::vector<cdouble> samples) {
        if (samples.size() < (1u << 12))
            throw ArgumentError("tabulated periodic function needs >= 4096 samples");
        cdouble mean(0.0, 0.0);
        for (const cdouble& v : samples) mean += v;
        mean /= static_cast<double>(samples.size());
        for (cdouble& v : samples) v -= mean;
        PeriodicFunction f(PeriodicKind::TabulatedCustom);
        f.table_ = std::move(samples);
        return f;
    }

    /// Loads a table from CSV rows "t,re,im" with uniform t spacing over
    /// [0, 2pi), first sample at t = 0.
    static PeriodicFunction tabulated_from_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw DataError("cannot open table file: " + path);
        std::vector<double> ts;
        std::vector<cdouble> vals;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string tok;
            double cols[3];
            for (int c = 0; c < 3; ++c) {
                if (!std::getline(ss, tok, ',')) throw DataError("expected t,re,im row: " + line);
                try {
                    cols[c] = std::stod(tok);
                } catch (const std::exception&) {
                    throw DataError("non-numeric value in table row: " + line);
                }
            }
            ts.push_back(cols[0]);
            vals.emplace_back(cols[1], cols[2]);
        }
        if (ts.size() < 2) throw DataError("table file too short: " + path);
        const double step = kTwoPi / static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size(); ++i) {
            if (std::abs(ts[i] - static_cast<double>(i) * step) > 1e-3 * step)
                throw DataError("table abscissae must be uniform over [0, 2pi)");
        }
        return tabulated(std::move(vals));
    }

    PeriodicKind kind() const { return kind_; }
    const char* name() const { return to_string(kind_); }

    /// f(t). Total on all of R; reduces t modulo 2pi internally.
    cdouble eval(double t) const {
        switch (kind_) {
            case PeriodicKind::ComplexExponential:
                return {std::cos(t), std::sin(t)};
            case PeriodicKind::UniversalQuantizer:
                return {detail::sign_pos(std::cos(t)), detail::sign_pos(std::sin(t))};
            case PeriodicKind::ComplexModulo:
                return {detail::normalized_mod_2pi(t),
                        detail::normalized_mod_2pi(t - kPi / 2.0)};
            case PeriodicKind::TabulatedCustom: {
                // periodic linear interpolation on the uniform grid
                const std::size_t n = table_.size();
                double pos = t / kTwoPi;
                pos = (pos - std::floor(pos)) * static_cast<double>(n);
                std::size_t i0 = static_cast<std::size_t>(pos);
                if (i0 >= n) i0 = 0;
                const std::size_t i1 = (i0 + 1) % n;
                const double w = pos - static_cast<double>(i0);
                return table_[i0] * (1.0 - w) + table_[i1] * w;
            }
        }
        return {0.0, 0.0};
    }

    /// Fourier coefficient F_k = (1/2pi) Int_0^{2pi} f(t) e^{-ikt} dt.
    /// Closed form for the named kinds, quadrature for tabulated ones.
    cdouble fourier_coefficient(int k) const {
        if (std::abs(k) > max_fourier_index_)
            throw ArgumentError("fourier index " + std::to_string(k) + " beyond configured maximum " +
                                std::to_string(max_fourier_index_));
        switch (kind_) {
            case PeriodicKind::ComplexExponential:
                return k == 1 ? cdouble(1.0, 0.0) : cdouble(0.0, 0.0);
            case PeriodicKind::UniversalQuantizer: {
                // harmonics sit at k = 1 mod 4 with amplitude 4/(pi k)
                const int r = ((k % 4) + 4) % 4;
                if (k == 0 || r != 1) return {0.0, 0.0};
                return {4.0 / (kPi * static_cast<double>(k)), 0.0};
            }
            case PeriodicKind::ComplexModulo: {
                if (k == 0) return {0.0, 0.0};
                // F_k = (i/(pi k)) (1 + i e^{-ik pi/2}); e^{-ik pi/2} cycles 1,-i,-1,i
                static const cdouble quarter[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
                const int r = ((k % 4) + 4) % 4;
                const cdouble iunit(0.0, 1.0);
                return iunit / (kPi * static_cast<double>(k)) * (1.0 + iunit * quarter[r]);
            }
            case PeriodicKind::TabulatedCustom:
                return quadrature_coefficient(k);
        }
        return {0.0, 0.0};
    }

    double sup_norm() const {
        switch (kind_) {
            case PeriodicKind::ComplexExponential: return 1.0;
            case PeriodicKind::UniversalQuantizer: return std::sqrt(2.0);
            case PeriodicKind::ComplexModulo: return std::sqrt(5.0) / 2.0;
            case PeriodicKind::TabulatedCustom: {
                double s = 0.0;
                for (const cdouble& v : table_) s = std::max(s, std::abs(v));
                return s;
            }
        }
        return 0.0;
    }

    /// Closed-form mean Lipschitz constant when one is known for the kind.
    std::optional<double> known_mean_lipschitz() const {
        switch (kind_) {
            case PeriodicKind::ComplexExponential: return 1.0;
            case PeriodicKind::UniversalQuantizer: return 8.0 / kPi;
            case PeriodicKind::ComplexModulo: return (4.0 + std::sqrt(2.0)) / kPi;
            case PeriodicKind::TabulatedCustom: return std::nullopt;
        }
        return std::nullopt;
    }

    /// Numeric estimate of the mean Lipschitz constant: the smallest L such
    /// that the average maximum deviation of f over [-delta, delta] is bounded
    /// by L*delta for every radius delta in (0, pi].
    ///
    /// Estimator: tabulate f on 2^14 points, sweep 64 geometric radii in
    /// [1e-4, pi] snapped to whole grid steps, and report the sup over radii
    /// of (mean sliding-window deviation) / delta.
    double mean_lipschitz() const {
        constexpr int kGridBits = 14;
        constexpr std::size_t n = std::size_t(1) << kGridBits;
        const double h = kTwoPi / static_cast<double>(n);

        std::vector<cdouble> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = eval(static_cast<double>(i) * h);

        // geometric radius grid, snapped to an integer number of samples
        std::vector<std::size_t> windows;
        {
            const double lo = 1e-4, hi = kPi;
            const int pts = 64;
            std::size_t prev = 0;
            for (int g = 0; g < pts; ++g) {
                const double delta = lo * std::pow(hi / lo, static_cast<double>(g) / (pts - 1));
                std::size_t w = static_cast<std::size_t>(std::llround(delta / h));
                w = std::clamp<std::size_t>(w, 1, n / 2);
                if (w != prev) windows.push_back(w);
                prev = w;
            }
        }

        // per-sample squared deviation sup, grown incrementally with the window
        std::vector<double> sup2(n, 0.0);
        double best = 0.0;
        std::size_t cur = 0;
        for (std::size_t w : windows) {
            for (std::size_t j = cur + 1; j <= w; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    const cdouble fi = f[i];
                    const std::size_t ip = i + j < n ? i + j : i + j - n;
                    const std::size_t im = i >= j ? i - j : i + n - j;
                    const double dp = std::norm(f[ip] - fi);
                    const double dm = std::norm(f[im] - fi);
                    const double d = dp > dm ? dp : dm;
                    if (d > sup2[i]) sup2[i] = d;
                }
            }
            cur = w;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(sup2[i]);
            const double mean_dev = acc / static_cast<double>(n);
            best = std::max(best, mean_dev / (static_cast<double>(w) * h));
        }
        return best;
    }

    /// C_f = 1 + ||f||_inf / |F_1|.
    double constant_Cf() const {
        const double f1 = std::abs(fourier_coefficient(1));
        if (f1 < 1e-12)
            throw DegenerateFunctionError("first Fourier coefficient vanishes; cannot renormalize");
        return 1.0 + sup_norm() / f1;
    }

    /// c_f = 4 C_Lambda (4 + L_f / |F_1|) with the numeric mean Lipschitz estimate.
    double constant_cf(double C_Lambda) const {
        return constant_cf(C_Lambda, mean_lipschitz());
    }

    /// Same, with an externally supplied mean Lipschitz constant.
    double constant_cf(double C_Lambda, double mean_lipschitz_value) const {
        if (!(C_Lambda > 0.0)) throw ArgumentError("C_Lambda must be positive");
        const double f1 = std::abs(fourier_coefficient(1));
        if (f1 < 1e-12)
            throw DegenerateFunctionError("first Fourier coefficient vanishes; cannot renormalize");
        return 4.0 * C_Lambda * (4.0 + mean_lipschitz_value / f1);
    }

    int max_fourier_index() const { return max_fourier_index_; }
    void set_max_fourier_index(int k) {
        if (k < 1) throw ArgumentError("max fourier index must be >= 1");
        max_fourier_index_ = k;
    }

    const std::vector<cdouble>& table() const { return table_; }

private:
    explicit PeriodicFunction(PeriodicKind kind) : kind_(kind) {}

    cdouble quadrature_coefficient(int k) const {
        // Uniform periodic sampling makes the trapezoidal rule a plain mean.
        // Resample to at least 2^14 points for short tables.
        constexpr std::size_t kMinSamples = std::size_t(1) << 14;
        const std::size_t n = std::max(table_.size(), kMinSamples);
        const double h = kTwoPi / static_cast<double>(n);
        cdouble acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = static_cast<double>(i) * h;
            const cdouble e(std::cos(-k * t), std::sin(-k * t));
            acc += eval(t) * e;
        }
        return acc / static_cast<double>(n);
    }

    PeriodicKind kind_;
    std::vector<cdouble> table_;
    int max_fourier_index_ = 64;
};

}  // namespace acl

#endif  // ACL_PERIODIC_HPP
