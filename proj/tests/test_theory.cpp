#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "acl/theory.hpp"

using namespace acl;
using Catch::Approx;

namespace {

std::pair<FeatureMap, FeatureMap> probe_pair(int d, int m, PeriodicKind distorted,
                                             std::uint64_t seed) {
    FeatureMapConfig cfg;
    cfg.d = d;
    cfg.m = m;
    cfg.sigma2 = 1.0;
    cfg.omega_seed = seed;
    cfg.dither_seed = seed + 1;
    cfg.nonlinearity = PeriodicKind::ComplexExponential;
    FeatureMap phi = FeatureMap::create(cfg);
    cfg.nonlinearity = distorted;
    cfg.renormalize = true;
    FeatureMap psi = FeatureMap::create(cfg);
    return {phi, psi};
}

MixtureModel random_dirac(int d, int K, std::mt19937_64& eng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    DiracMixture mix;
    mix.weights = VectorXd::Constant(K, 1.0 / K);
    mix.centroids =
        MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
    return mix;
}

}  // namespace

TEST_CASE("slpd of a map against itself is zero", "[theory]") {
    FeatureMapConfig cfg;
    cfg.d = 2;
    cfg.m = 64;
    cfg.omega_seed = 11;
    cfg.dither_seed = 12;
    cfg.nonlinearity = PeriodicKind::ComplexExponential;
    FeatureMap phi = FeatureMap::create(cfg);
    cfg.renormalize = true;  // F_1 = 1, so the features are unchanged
    FeatureMap psi = FeatureMap::create(cfg);
    auto report = slpd_error(phi, psi, Box::unit(2), 100, 5);
    CHECK(report.eps_hat <= 1e-12);
    CHECK(report.pairs_tested == 100);
}

TEST_CASE("slpd preconditions", "[theory]") {
    auto [phi, psi] = probe_pair(2, 32, PeriodicKind::UniversalQuantizer, 21);
    FeatureMapConfig other = psi.config();
    other.omega_seed += 1;
    FeatureMap psi_other = FeatureMap::create(other);
    CHECK_THROWS_AS(slpd_error(phi, psi_other, Box::unit(2), 10, 1), IncompatibleSketchError);

    FeatureMapConfig raw = psi.config();
    raw.renormalize = false;
    CHECK_THROWS_AS(slpd_error(phi, FeatureMap::create(raw), Box::unit(2), 10, 1),
                    ArgumentError);
}

TEST_CASE("slpd shrinks with the sketch size", "[theory][slow]") {
    // medians over a few seeds at increasing m; the full sweep lives in the
    // acceptance suite
    auto median_eps = [&](int m) {
        std::vector<double> vals;
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            auto [phi, psi] = probe_pair(2, m, PeriodicKind::UniversalQuantizer, 300 + 17 * seed);
            vals.push_back(slpd_error(phi, psi, Box::unit(2), 128, 900 + seed).eps_hat);
        }
        std::nth_element(vals.begin(), vals.begin() + 2, vals.end());
        return vals[2];
    };
    CHECK(median_eps(1024) < median_eps(64));
}

TEST_CASE("modulo distorts more than quantization", "[theory][slow]") {
    int wins = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto [phi, psi_q] = probe_pair(2, 256, PeriodicKind::UniversalQuantizer, 500 + seed);
        auto [phi2, psi_mod] = probe_pair(2, 256, PeriodicKind::ComplexModulo, 500 + seed);
        const double eq = slpd_error(phi, psi_q, Box::unit(2), 128, 40 + seed).eps_hat;
        const double em = slpd_error(phi2, psi_mod, Box::unit(2), 128, 40 + seed).eps_hat;
        if (em >= eq) ++wins;
    }
    CHECK(wins >= 4);
}

TEST_CASE("discrete lpd error", "[theory]") {
    auto [phi, psi] = probe_pair(2, 48, PeriodicKind::UniversalQuantizer, 33);
    std::mt19937_64 eng(3);

    // psi = phi gives zero
    FeatureMapConfig same = phi.config();
    same.renormalize = true;
    FeatureMap psi_same = FeatureMap::create(same);
    MatrixXd P = MatrixXd::Random(5, 2).cwiseAbs();
    VectorXd w = VectorXd::Constant(5, 0.2);
    std::vector<MixtureModel> models = {random_dirac(2, 3, eng), random_dirac(2, 1, eng)};
    CHECK(lpd_error_discrete(phi, psi_same, P, w, models) <= 1e-12);

    // a single point against a single dirac reduces to the slpd integrand
    MatrixXd one_point(1, 2);
    one_point << 0.4, 0.7;
    VectorXd one_w = VectorXd::Ones(1);
    DiracMixture atom;
    atom.weights = VectorXd::Ones(1);
    atom.centroids = MatrixXd::Zero(2, 1);
    atom.centroids << 0.1, 0.9;
    std::vector<MixtureModel> single = {atom};
    const double got = lpd_error_discrete(phi, psi, one_point, one_w, single);
    const VectorXd x = one_point.row(0).transpose();
    const VectorXcd diff = psi.apply(x) - phi.apply(x);
    const double expect = std::abs(diff.dot(phi.apply(atom.centroids.col(0))));
    CHECK(got == Approx(expect).margin(1e-12));

    // Cauchy-Schwarz ceiling: C_phi (C_phi + C_psi)
    const double c_phi = 1.0;
    const double c_psi = psi.nonlinearity().sup_norm() /
                         std::abs(psi.nonlinearity().fourier_coefficient(1));
    std::mt19937_64 eng2(9);
    for (int rep = 0; rep < 5; ++rep) {
        MatrixXd pts = (MatrixXd::Random(8, 2).array() * 0.5 + 0.5).matrix();
        VectorXd ws = VectorXd::Constant(8, 0.125);
        std::vector<MixtureModel> ms = {random_dirac(2, 4, eng2)};
        CHECK(lpd_error_discrete(phi, psi, pts, ws, ms) <= c_phi * (c_phi + c_psi));
    }
}

TEST_CASE("suboptimality certificate", "[theory]") {
    const int d = 2, m = 128, n = 60;
    std::mt19937_64 eng(55);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    MatrixXd X =
        MatrixXd::NullaryExpr(n, d, [&](Eigen::Index, Eigen::Index) { return uni(eng); });

    auto [phi, psi] = probe_pair(d, m, PeriodicKind::UniversalQuantizer, 77);
    Sketch z_sym = sketch_dataset(phi, X);
    Sketch z_asym = sketch_dataset(psi, X);

    std::vector<MixtureModel> grid;
    for (int i = 0; i < 50; ++i) grid.push_back(random_dirac(d, 3, eng));

    auto cert = suboptimality_check(phi, psi, z_sym, z_asym, grid);
    CHECK(cert.holds);
    CHECK(cert.lhs >= -1e-12);

    // mismatched sketch/map combinations are refused
    CHECK_THROWS_AS(suboptimality_check(phi, psi, z_sym, z_sym, grid),
                    IncompatibleSketchError);
}

TEST_CASE("suboptimality certificate degenerate cases", "[theory]") {
    const int d = 2, m = 32;
    std::mt19937_64 eng(66);
    MatrixXd X = (MatrixXd::Random(20, d).array() * 0.5 + 0.5).matrix();

    FeatureMapConfig cfg;
    cfg.d = d;
    cfg.m = m;
    cfg.omega_seed = 81;
    cfg.dither_seed = 82;
    cfg.nonlinearity = PeriodicKind::ComplexExponential;
    FeatureMap phi = FeatureMap::create(cfg);
    cfg.renormalize = true;
    FeatureMap psi = FeatureMap::create(cfg);  // identical features, F_1 = 1

    Sketch z_sym = sketch_dataset(phi, X);
    Sketch z_asym = sketch_dataset(psi, X);
    std::vector<MixtureModel> grid = {random_dirac(d, 2, eng)};

    auto cert = suboptimality_check(phi, psi, z_sym, z_asym, grid);
    CHECK(cert.lhs == 0.0);  // grid of one: both argmins coincide
    CHECK(cert.eps_hat <= 1e-12);
    CHECK(cert.holds);

    CHECK_THROWS_AS(
        suboptimality_check(phi, psi, z_sym, z_asym, std::vector<MixtureModel>{}),
        ArgumentError);
}

TEST_CASE("gaussian smoothness constant", "[theory]") {
    CHECK(smoothness_constant_gaussian(1.0) == Approx(std::sqrt(2.0 / kPi)).epsilon(1e-12));
    CHECK(smoothness_constant_gaussian(4.0) == Approx(2.0 * std::sqrt(2.0 / kPi)).epsilon(1e-12));
    CHECK_THROWS_AS(smoothness_constant_gaussian(0.0), ArgumentError);

    // isotropy: Monte Carlo over random unit directions stays within 3 sigma
    const int n = 200000;
    MatrixXd omega = sample_frequencies(FrequencySampler(FrequencyLaw::Gaussian, 2.25, 3), n, 8);
    std::mt19937_64 eng(4);
    std::normal_distribution<double> gauss;
    const double expect = smoothness_constant_gaussian(2.25);
    for (int rep = 0; rep < 20; ++rep) {
        VectorXd a(3);
        for (int i = 0; i < 3; ++i) a[i] = gauss(eng);
        a.normalize();
        const VectorXd proj = (omega.transpose() * a).cwiseAbs();
        const double mc = proj.mean();
        const double sigma_mc = std::sqrt((proj.array() - mc).square().mean() / n);
        CHECK(std::abs(mc - expect) <= 3.0 * sigma_mc);
    }
}
