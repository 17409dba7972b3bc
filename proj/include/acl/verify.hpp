#ifndef ACL_VERIFY_HPP
#define ACL_VERIFY_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "acl/eval.hpp"
#include "acl/periodic.hpp"
#include "acl/theory.hpp"

// Numerical verification suites for the theoretical quantities the library
// relies on: nonlinearity constants, distortion projections, the
// suboptimality certificate, the dithered cost-shift identity, and the
// frequency-law smoothness constant.

namespace acl {

struct CheckRow {
    std::string suite;
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

inline CheckRow make_check(std::string suite, std::string name, double value, double expected,
                           double tol) {
    CheckRow row{std::move(suite), std::move(name), value, expected, tol, false};
    row.pass = std::abs(value - expected) <= tol;
    return row;
}

/// First Fourier coefficients, sup-norms, mean Lipschitz constants and the
/// derived C_f / c_f constants of the quantizer and modulo nonlinearities,
/// with both the closed-form and the numerically estimated Lipschitz routes.
inline std::vector<CheckRow> verify_constants() {
    std::vector<CheckRow> rows;
    auto q = PeriodicFunction::universal_quantizer();
    auto mod = PeriodicFunction::complex_modulo();
    auto rff = PeriodicFunction::complex_exponential();
    const double sqrt2 = std::sqrt(2.0);

    rows.push_back(make_check("constants", "Q1", std::abs(q.fourier_coefficient(1)), 4.0 / kPi,
                              1e-6));
    rows.push_back(make_check("constants", "M1_abs", std::abs(mod.fourier_coefficient(1)),
                              2.0 / kPi, 1e-6));
    rows.push_back(make_check("constants", "M1_imag", mod.fourier_coefficient(1).imag(),
                              2.0 / kPi, 1e-6));
    rows.push_back(make_check("constants", "F1_rff", std::abs(rff.fourier_coefficient(1)), 1.0,
                              1e-9));

    const double Lq = q.mean_lipschitz();
    const double Lmod = mod.mean_lipschitz();
    const double Lrff = rff.mean_lipschitz();
    rows.push_back(make_check("constants", "L_q", Lq, 8.0 / kPi, 1e-2));
    rows.push_back(make_check("constants", "L_mod", Lmod, (4.0 + sqrt2) / kPi, 1e-2));
    {
        CheckRow row{"constants", "L_rff_below_1", Lrff, 1.0, 1e-2};
        row.pass = Lrff <= 1.0 + 1e-2;
        rows.push_back(row);
    }

    rows.push_back(make_check("constants", "C_q", q.constant_Cf(), 1.0 + kPi / (2.0 * sqrt2),
                              1e-9));
    rows.push_back(make_check("constants", "C_mod", mod.constant_Cf(),
                              1.0 + std::sqrt(5.0) * kPi / 4.0, 1e-9));

    rows.push_back(make_check("constants", "c_q_closed",
                              q.constant_cf(1.0, *q.known_mean_lipschitz()), 24.0, 1e-9));
    rows.push_back(make_check("constants", "c_mod_closed",
                              mod.constant_cf(1.0, *mod.known_mean_lipschitz()),
                              24.0 + 2.0 * sqrt2, 1e-9));
    rows.push_back(make_check("constants", "c_q_numeric", q.constant_cf(1.0, Lq), 24.0, 5e-2));
    rows.push_back(make_check("constants", "c_mod_numeric", mod.constant_cf(1.0, Lmod),
                              24.0 + 2.0 * sqrt2, 5e-2));
    return rows;
}

struct SlpdRow {
    int m = 0;
    std::string kind;
    std::uint64_t seed = 0;
    double eps_hat = 0.0;
};

/// Distortion projections of the quantized and modulo maps against the RFF
/// reference over a unit box, for each sketch size and seed.
inline std::vector<SlpdRow> verify_slpd(const std::vector<int>& m_list, int seeds, int pairs,
                                        int d = 2, std::uint64_t base_seed = 0) {
    std::vector<SlpdRow> rows;
    const Box box = Box::unit(d);
    for (int m : m_list) {
        for (int s = 0; s < seeds; ++s) {
            FeatureMapConfig cfg;
            cfg.d = d;
            cfg.m = m;
            cfg.sigma2 = 1.0;
            cfg.omega_seed = derive_seed(base_seed, 2 * s);
            cfg.dither_seed = derive_seed(base_seed, 2 * s + 1);
            cfg.nonlinearity = PeriodicKind::ComplexExponential;
            const FeatureMap phi = FeatureMap::create(cfg);
            for (PeriodicKind kind : {PeriodicKind::ComplexExponential,
                                      PeriodicKind::UniversalQuantizer,
                                      PeriodicKind::ComplexModulo}) {
                FeatureMapConfig pcfg = cfg;
                pcfg.nonlinearity = kind;
                pcfg.renormalize = true;
                const FeatureMap psi = FeatureMap::create(pcfg);
                const auto report =
                    slpd_error(phi, psi, box, pairs, derive_seed(base_seed, 1000 + s));
                rows.push_back({m, psi.nonlinearity().name(), report.seed, report.eps_hat});
            }
        }
    }
    return rows;
}

struct SuboptimalityRow {
    int instance = 0;
    double lhs = 0.0;
    double rhs = 0.0;
    double eps_hat = 0.0;
    bool holds = false;
};

/// Random k-means instances: dataset in the unit box, a random candidate
/// grid, symmetric vs quantized sketches, certificate on each.
inline std::vector<SuboptimalityRow> verify_suboptimality(int instances, int grid_size, int m,
                                                          int d, int n,
                                                          std::uint64_t base_seed = 0) {
    std::vector<SuboptimalityRow> rows;
    for (int i = 0; i < instances; ++i) {
        auto eng = make_engine(derive_seed(base_seed, 7000 + i));
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        MatrixXd X =
            MatrixXd::NullaryExpr(n, d, [&](Eigen::Index, Eigen::Index) { return uni(eng); });

        FeatureMapConfig cfg;
        cfg.d = d;
        cfg.m = m;
        cfg.sigma2 = 2.0;
        cfg.omega_seed = derive_seed(base_seed, 2 * i);
        cfg.dither_seed = derive_seed(base_seed, 2 * i + 1);
        cfg.nonlinearity = PeriodicKind::ComplexExponential;
        const FeatureMap phi = FeatureMap::create(cfg);
        FeatureMapConfig qcfg = cfg;
        qcfg.nonlinearity = PeriodicKind::UniversalQuantizer;
        qcfg.renormalize = true;
        const FeatureMap psi = FeatureMap::create(qcfg);

        const Sketch z_sym = sketch_dataset(phi, X);
        const Sketch z_asym = sketch_dataset(psi, X);

        std::vector<MixtureModel> grid;
        std::uniform_int_distribution<int> kdist(1, 4);
        for (int g = 0; g < grid_size; ++g) {
            DiracMixture mix;
            const int K = kdist(eng);
            mix.weights = VectorXd::Constant(K, 1.0 / K);
            mix.centroids =
                MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
            grid.push_back(mix);
        }
        const auto cert = suboptimality_check(phi, psi, z_sym, z_asym, grid);
        rows.push_back({i, cert.lhs, cert.rhs, cert.eps_hat, cert.holds});
    }
    return rows;
}

struct DitherExpectationResult {
    std::vector<double> mean_diff;    // squared-cost shift per candidate model
    std::vector<double> stderr_diff;  // Monte Carlo standard error per model
    double max_pair_z = 0.0;          // worst pairwise z-score of the shifts
    double unsquared_spread = 0.0;    // spread of the plain-cost shifts (reported, not asserted)
    int dither_draws = 0;
    bool pass = false;
};

/// Averaged over the dither, the squared asymmetric (renormalized quantized)
/// cost minus the squared symmetric cost is the same constant for every
/// model. Checks that all pairwise differences of the estimated shifts stay
/// within 3 Monte Carlo sigma.
inline DitherExpectationResult verify_dither_expectation(int n_models, int dither_draws, int m,
                                                         int d, int n_points,
                                                         std::uint64_t base_seed = 0) {
    auto eng = make_engine(derive_seed(base_seed, 0xE12));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    MatrixXd X =
        MatrixXd::NullaryExpr(n_points, d, [&](Eigen::Index, Eigen::Index) { return uni(eng); });

    std::vector<DiracMixture> models(n_models);
    for (auto& mix : models) {
        const int K = 3;
        VectorXd w(K);
        for (int k = 0; k < K; ++k) w[k] = 0.2 + uni(eng);
        mix.weights = w / w.sum();
        mix.centroids =
            MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
    }

    MatrixXd diffs(dither_draws, n_models);
    MatrixXd diffs_plain(dither_draws, n_models);
    FeatureMapConfig cfg;
    cfg.d = d;
    cfg.m = m;
    cfg.sigma2 = 2.0;
    cfg.omega_seed = derive_seed(base_seed, 0xE34);
    cfg.nonlinearity = PeriodicKind::ComplexExponential;
    for (int t = 0; t < dither_draws; ++t) {
        cfg.dither_seed = derive_seed(base_seed, 10000 + t);
        cfg.nonlinearity = PeriodicKind::ComplexExponential;
        cfg.renormalize = false;
        const FeatureMap phi = FeatureMap::create(cfg);
        FeatureMapConfig qcfg = cfg;
        qcfg.nonlinearity = PeriodicKind::UniversalQuantizer;
        qcfg.renormalize = true;
        const FeatureMap psi = FeatureMap::create(qcfg);

        const VectorXcd z_sym = sketch_dataset(phi, X).values;
        const VectorXcd z_asym = sketch_dataset(psi, X).values;
        for (int i = 0; i < n_models; ++i) {
            const VectorXcd a = sketch_model(phi, models[i]);
            diffs(t, i) = (z_asym - a).squaredNorm() - (z_sym - a).squaredNorm();
            diffs_plain(t, i) = (z_asym - a).norm() - (z_sym - a).norm();
        }
    }

    DitherExpectationResult result;
    result.dither_draws = dither_draws;
    result.mean_diff.resize(n_models);
    result.stderr_diff.resize(n_models);
    for (int i = 0; i < n_models; ++i) {
        result.mean_diff[i] = diffs.col(i).mean();
        const double var = (diffs.col(i).array() - result.mean_diff[i]).square().sum() /
                           (dither_draws - 1);
        result.stderr_diff[i] = std::sqrt(var / dither_draws);
    }
    // pairwise z-scores on the per-draw differences (shared dithers cancel)
    for (int i = 0; i < n_models; ++i) {
        for (int j = i + 1; j < n_models; ++j) {
            const VectorXd g = diffs.col(i) - diffs.col(j);
            const double mean = g.mean();
            const double var = (g.array() - mean).square().sum() / (dither_draws - 1);
            const double se = std::sqrt(var / dither_draws);
            if (se > 0.0) result.max_pair_z = std::max(result.max_pair_z, std::abs(mean) / se);
        }
    }
    result.pass = result.max_pair_z <= 3.0;
    // constancy is only exact for the squared costs; the plain-cost spread is
    // informational
    const VectorXd plain_means = diffs_plain.colwise().mean();
    result.unsquared_spread = plain_means.maxCoeff() - plain_means.minCoeff();
    return result;
}

/// Monte Carlo check of the Gaussian smoothness constant over random unit
/// directions.
inline std::vector<CheckRow> verify_smoothness(double sigma2, int draws, int directions, int d,
                                               std::uint64_t base_seed = 0) {
    std::vector<CheckRow> rows;
    const double expect = smoothness_constant_gaussian(sigma2);
    MatrixXd omega = sample_frequencies(FrequencySampler(FrequencyLaw::Gaussian, sigma2, d),
                                        draws, derive_seed(base_seed, 0x536D));
    auto eng = make_engine(derive_seed(base_seed, 0x536E));
    std::normal_distribution<double> gauss;
    for (int rep = 0; rep < directions; ++rep) {
        VectorXd a(d);
        for (int i = 0; i < d; ++i) a[i] = gauss(eng);
        a.normalize();
        const VectorXd proj = (omega.transpose() * a).cwiseAbs();
        const double mc = proj.mean();
        const double sigma_mc =
            std::sqrt((proj.array() - mc).square().sum() / (draws - 1) / draws);
        rows.push_back(make_check("smoothness", "direction_" + std::to_string(rep), mc, expect,
                                  3.0 * sigma_mc));
    }
    return rows;
}

}  // namespace acl

#endif  // ACL_VERIFY_HPP
