#ifndef ACL_THEORY_HPP
#define ACL_THEORY_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "acl/common.hpp"
#include "acl/models.hpp"
#include "acl/sketch.hpp"
#include "acl/solver.hpp"

namespace acl {

/// Result of a signal-level limited-projected-distortion probe.
struct LPDReport {
    double eps_hat = 0.0;  // largest observed projection
    int pairs_tested = 0;
    int m = 0;
    std::string f_kind;
    std::uint64_t seed = 0;
};

namespace detail {

inline void require_probe_pair(const FeatureMap& phi, const FeatureMap& psi) {
    if (!phi.shares_projection(psi))
        throw IncompatibleSketchError("maps must share frequencies and dither");
    if (phi.nonlinearity().kind() != PeriodicKind::ComplexExponential || phi.renormalize())
        throw ArgumentError("reference map must be the plain RFF map");
    if (!psi.renormalize())
        throw ArgumentError("distorted map must be renormalized by 1/F_1");
}

}  // namespace detail

/// Largest |<Psi(x) - Phi(x), Phi(y)>| over random pairs x, y drawn uniformly
/// in the box. Small values mean the distorted features project onto the
/// reference features almost like the reference features themselves.
inline LPDReport slpd_error(const FeatureMap& phi, const FeatureMap& psi, const Box& box,
                            int pairs, std::uint64_t seed) {
    detail::require_probe_pair(phi, psi);
    if (box.dim() != phi.dim()) throw DimensionError("box dimension does not match maps");
    if (pairs < 1) throw ArgumentError("need at least one probe pair");

    auto eng = make_engine(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const VectorXd span = box.upper - box.lower;
    VectorXd x(box.dim()), y(box.dim());
    double eps = 0.0;
    for (int p = 0; p < pairs; ++p) {
        for (int i = 0; i < box.dim(); ++i) x[i] = box.lower[i] + span[i] * uni(eng);
        for (int i = 0; i < box.dim(); ++i) y[i] = box.lower[i] + span[i] * uni(eng);
        const VectorXcd diff = psi.apply(x) - phi.apply(x);
        eps = std::max(eps, std::abs(diff.dot(phi.apply(y))));
    }
    LPDReport report;
    report.eps_hat = eps;
    report.pairs_tested = pairs;
    report.m = phi.size();
    report.f_kind = psi.nonlinearity().name();
    report.seed = seed;
    return report;
}

/// Exact projected distortion of a weighted point set against a finite list
/// of candidate models: max_Q |<A_Psi(P) - A_Phi(P), A_Phi(Q)>|.
inline double lpd_error_discrete(const FeatureMap& phi, const FeatureMap& psi,
                                 const MatrixXd& points, const VectorXd& weights,
                                 const std::vector<MixtureModel>& models) {
    detail::require_probe_pair(phi, psi);
    if (points.rows() != weights.size()) throw DimensionError("points/weights size mismatch");
    if (points.rows() == 0) throw DataError("empty point set");
    if (models.empty()) throw ArgumentError("need at least one candidate model");

    VectorXcd diff = VectorXcd::Zero(phi.size());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const VectorXd x = points.row(i).transpose();
        diff += weights[i] * (psi.apply(x) - phi.apply(x));
    }
    double eps = 0.0;
    for (const auto& model : models)
        eps = std::max(eps, std::abs(diff.dot(sketch_model(phi, model))));
    return eps;
}

/// Outcome of the asymmetric-vs-symmetric suboptimality certificate over a
/// finite model grid.
struct SuboptimalityCertificate {
    double lhs = 0.0;      // symmetric-cost gap paid by the asymmetric argmin
    double rhs = 0.0;      // 2 sqrt(eps_hat)
    double eps_hat = 0.0;  // exact projected distortion over the grid
    bool holds = false;
};

/// Brute-force check that learning from the distorted sketch costs at most
/// 2 sqrt(eps) in symmetric cost, with eps the exact projected distortion
/// realized on the grid. Both argmins are exact since the grid is finite.
inline SuboptimalityCertificate suboptimality_check(const FeatureMap& phi, const FeatureMap& psi,
                                                    const Sketch& z_sym, const Sketch& z_asym,
                                                    const std::vector<MixtureModel>& grid) {
    if (grid.empty()) throw ArgumentError("model grid is empty");
    if (!phi.shares_projection(psi))
        throw IncompatibleSketchError("maps must share frequencies and dither");
    if (z_sym.map_hash != phi.hash() || z_asym.map_hash != psi.hash())
        throw IncompatibleSketchError("sketches do not match the supplied maps");

    std::size_t best_asym = 0;
    double cost_sym = 1e300, cost_asym = 1e300;
    std::vector<VectorXcd> model_sketches(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        model_sketches[i] = sketch_model(phi, grid[i]);
        const double cs = (z_sym.values - model_sketches[i]).norm();
        const double ca = (z_asym.values - model_sketches[i]).norm();
        cost_sym = std::min(cost_sym, cs);
        if (ca < cost_asym) {
            cost_asym = ca;
            best_asym = i;
        }
    }
    const VectorXcd diff = z_asym.values - z_sym.values;
    double eps = 0.0;
    for (const auto& ms : model_sketches) eps = std::max(eps, std::abs(diff.dot(ms)));

    SuboptimalityCertificate cert;
    cert.eps_hat = eps;
    cert.lhs = (z_sym.values - model_sketches[best_asym]).norm() - cost_sym;
    cert.rhs = 2.0 * std::sqrt(eps);
    cert.holds = cert.lhs <= cert.rhs + 1e-12;
    return cert;
}

/// Smoothness constant of the isotropic Gaussian frequency law:
/// max_{||a||=1} E |omega . a| = sigma sqrt(2/pi).
inline double smoothness_constant_gaussian(double sigma2) {
    if (!(sigma2 > 0.0)) throw ArgumentError("sigma2 must be positive");
    return std::sqrt(sigma2) * std::sqrt(2.0 / kPi);
}

}  // namespace acl

#endif  // ACL_THEORY_HPP
