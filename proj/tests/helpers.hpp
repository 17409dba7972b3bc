#ifndef ACL_TEST_HELPERS_HPP
#define ACL_TEST_HELPERS_HPP

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "acl/common.hpp"
#include "acl/periodic.hpp"

// Independent oracles used to freeze expected values. These deliberately use
// the dumbest correct method available and never call the code path they check.
namespace oracle {

// Rectangle-rule Fourier coefficient straight from pointwise evaluation.
inline acl::cdouble fourier_by_quadrature(const acl::PeriodicFunction& f, int k,
                                          std::size_t n = std::size_t(1) << 16) {
    acl::cdouble acc(0.0, 0.0);
    const double h = acl::kTwoPi / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = (static_cast<double>(i) + 0.5) * h;
        acc += f.eval(t) * std::polar(1.0, -k * t);
    }
    return acc / static_cast<double>(n);
}

// Brute-force SSE: double loop over points and centroids.
inline double sse_brute_force(const acl::MatrixXd& X, const acl::MatrixXd& centroids_dk) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index k = 0; k < centroids_dk.cols(); ++k) {
            const double d2 = (X.row(i).transpose() - centroids_dk.col(k)).squaredNorm();
            best = std::min(best, d2);
        }
        total += best;
    }
    return total;
}

// Unstabilized diagonal-GMM log-likelihood, safe only on small benign inputs.
inline double log_likelihood_naive(const acl::VectorXd& w, const acl::MatrixXd& mu,
                                   const acl::MatrixXd& var, const acl::MatrixXd& X) {
    const Eigen::Index d = X.cols();
    double total = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        double p = 0.0;
        for (Eigen::Index k = 0; k < w.size(); ++k) {
            double expo = 0.0, logdet = 0.0;
            for (Eigen::Index j = 0; j < d; ++j) {
                const double diff = X(i, j) - mu(j, k);
                expo += diff * diff / var(j, k);
                logdet += std::log(var(j, k));
            }
            p += w[k] * std::exp(-0.5 * expo) /
                 std::pow(2.0 * acl::kPi, 0.5 * d) / std::exp(0.5 * logdet);
        }
        total += std::log(p);
    }
    return total;
}

// Central finite differences of a scalar function of a real vector.
template <typename F>
acl::VectorXd central_difference(F&& fn, const acl::VectorXd& x, double step = 1e-6) {
    acl::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        acl::VectorXd xp = x, xm = x;
        xp[i] += step;
        xm[i] -= step;
        g[i] = (fn(xp) - fn(xm)) / (2.0 * step);
    }
    return g;
}

}  // namespace oracle

#endif  // ACL_TEST_HELPERS_HPP
