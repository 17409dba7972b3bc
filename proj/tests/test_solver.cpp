#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "acl/solver.hpp"
#include "helpers.hpp"

using namespace acl;
using Catch::Approx;

namespace {

FeatureMap rff_map(int d, int m, double sigma2, std::uint64_t seed) {
    FeatureMapConfig cfg;
    cfg.d = d;
    cfg.m = m;
    cfg.sigma2 = sigma2;
    cfg.omega_seed = seed;
    cfg.dither_seed = seed + 1;
    cfg.nonlinearity = PeriodicKind::ComplexExponential;
    return FeatureMap::create(cfg);
}

Sketch as_sketch(const VectorXcd& values, const FeatureMap& map, std::int64_t count = 1) {
    Sketch s;
    s.values = values;
    s.count = count;
    s.map_hash = map.hash();
    return s;
}

double match_distance(const MatrixXd& truth, const MatrixXd& found) {
    double worst = 0.0;
    for (int k = 0; k < truth.cols(); ++k) {
        double best = 1e300;
        for (int j = 0; j < found.cols(); ++j)
            best = std::min(best, (truth.col(k) - found.col(j)).norm());
        worst = std::max(worst, best);
    }
    return worst;
}

}  // namespace

TEST_CASE("cost basics", "[solver]") {
    auto map = rff_map(2, 24, 4.0, 900);
    DiracMixture mix;
    mix.weights = VectorXd::Constant(2, 0.5);
    mix.centroids = MatrixXd::Random(2, 2);

    Sketch exact = as_sketch(sketch_model(map, mix), map);
    CHECK(cost(map, exact, mix) == Approx(0.0).margin(1e-14));

    DiracMixture one;
    one.weights = VectorXd::Ones(1);
    one.centroids = MatrixXd::Random(2, 1);
    Sketch zero = as_sketch(VectorXcd::Zero(24), map);
    CHECK(cost(map, zero, one) == Approx(1.0).epsilon(1e-12));

    Sketch bad = as_sketch(VectorXcd::Zero(7), map);
    CHECK_THROWS_AS(cost(map, bad, one), DimensionError);

    FeatureMapConfig qcfg = map.config();
    qcfg.nonlinearity = PeriodicKind::UniversalQuantizer;
    auto qmap = FeatureMap::create(qcfg);
    CHECK_THROWS_AS(cost(qmap, zero, one), UnsupportedAnalyticSketchError);
}

TEST_CASE("cost gradients match central differences", "[solver]") {
    std::mt19937_64 eng(41);
    std::uniform_real_distribution<double> uni(0.1, 0.9);
    auto map = rff_map(2, 20, 2.0, 901);
    Sketch z = as_sketch(VectorXcd::Random(20) * 0.3, map);

    SECTION("k-means") {
        const int K = 3, d = 2;
        DiracMixture mix;
        mix.weights = VectorXd::Zero(K);
        mix.weights << 0.2, 0.5, 0.3;
        mix.centroids =
            MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
        VectorXd p0(parameter_count(mix));
        p0 << mix.weights, Eigen::Map<const VectorXd>(mix.centroids.data(), K * d);
        auto cost_at = [&](const VectorXd& p) {
            DiracMixture m2 = mix;
            m2.weights = p.head(K);
            m2.centroids = Eigen::Map<const MatrixXd>(p.data() + K, d, K);
            return cost(map, z, m2);
        };
        VectorXd fd = oracle::central_difference(cost_at, p0);
        VectorXd an = cost_gradient(map, z, mix);
        CHECK((an - fd).norm() <= 1e-5 * fd.norm());
    }

    SECTION("gmm") {
        const int K = 2, d = 2;
        GaussianMixture mix;
        mix.weights = VectorXd::Zero(K);
        mix.weights << 0.6, 0.4;
        mix.means =
            MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
        mix.variances = MatrixXd::Constant(d, K, 0.04);
        VectorXd p0(parameter_count(mix));
        p0 << mix.weights, Eigen::Map<const VectorXd>(mix.means.data(), K * d),
            Eigen::Map<const VectorXd>(mix.variances.data(), K * d);
        auto cost_at = [&](const VectorXd& p) {
            GaussianMixture m2 = mix;
            m2.weights = p.head(K);
            m2.means = Eigen::Map<const MatrixXd>(p.data() + K, d, K);
            m2.variances = Eigen::Map<const MatrixXd>(p.data() + K + K * d, d, K);
            return cost(map, z, m2);
        };
        VectorXd fd = oracle::central_difference(cost_at, p0);
        VectorXd an = cost_gradient(map, z, mix);
        CHECK((an - fd).norm() <= 1e-5 * fd.norm());
    }
}

TEST_CASE("clomp recovers a single point", "[solver]") {
    auto map = rff_map(2, 30, 20.0, 902);
    VectorXd x(2);
    x << 0.62, 0.31;
    Sketch z = as_sketch(map.apply(x), map);

    TaskSpec task = TaskSpec::kmeans(1, Box::unit(2));
    SolverOptions opts;
    opts.seed = 7;
    DiracMixture mix = clomp_kmeans(z, map, task, opts);
    validate(mix, task.box);
    CHECK((mix.centroids.col(0) - x).norm() < 1e-3);
    CHECK(mix.weights[0] == Approx(1.0).margin(1e-6));
}

TEST_CASE("clomp recovers a planted three-atom mixture", "[solver][slow]") {
    const int d = 2, m = 80;
    DiracMixture truth;
    truth.weights = VectorXd::Zero(3);
    truth.weights << 0.3, 0.4, 0.3;
    truth.centroids.resize(d, 3);
    truth.centroids << 0.15, 0.50, 0.85,  //
        0.20, 0.80, 0.30;

    TaskSpec task = TaskSpec::kmeans(3, Box::unit(2));
    int hits = 0;
    for (int seed = 0; seed < 10; ++seed) {
        auto map = rff_map(d, m, 40.0, 1000 + 13 * seed);
        Sketch z = as_sketch(sketch_model(map, truth), map, 100);
        SolverOptions opts;
        opts.seed = seed;
        DiracMixture est = clomp_kmeans(z, map, task, opts);
        validate(est, task.box);
        if (match_distance(truth.centroids, est.centroids) < 1e-2) ++hits;
    }
    CHECK(hits >= 8);
}

TEST_CASE("clomp cost never exceeds the first candidate's cost", "[solver]") {
    const int d = 2, m = 40;
    TaskSpec task = TaskSpec::kmeans(2, Box::unit(2));
    for (int seed = 0; seed < 6; ++seed) {
        auto map = rff_map(d, m, 30.0, 2000 + seed);
        DiracMixture truth;
        truth.weights = VectorXd::Constant(2, 0.5);
        truth.centroids.resize(d, 2);
        truth.centroids << 0.25, 0.75, 0.3, 0.7;
        Sketch z = as_sketch(sketch_model(map, truth), map);
        SolverOptions opts;
        opts.seed = 100 + seed;
        std::vector<std::pair<int, double>> trace;
        opts.trace = &trace;
        DiracMixture est = clomp_kmeans(z, map, task, opts);
        REQUIRE(trace.size() >= 2);
        CHECK(trace.back().second <= trace.front().second + 1e-12);
        CHECK(cost(map, z, est) == Approx(trace.back().second).margin(1e-12));
    }
}

TEST_CASE("solver output is deterministic", "[solver]") {
    auto map = rff_map(2, 32, 25.0, 903);
    DiracMixture truth;
    truth.weights = VectorXd::Constant(2, 0.5);
    truth.centroids.resize(2, 2);
    truth.centroids << 0.2, 0.8, 0.6, 0.4;
    Sketch z = as_sketch(sketch_model(map, truth), map);
    TaskSpec task = TaskSpec::kmeans(2, Box::unit(2));
    SolverOptions opts;
    opts.seed = 5;
    DiracMixture a = clomp_kmeans(z, map, task, opts);
    DiracMixture b = clomp_kmeans(z, map, task, opts);
    CHECK(a.weights == b.weights);
    CHECK(a.centroids == b.centroids);
}

TEST_CASE("splitting fits gaussian mixtures from exact sketches", "[solver][slow]") {
    const int d = 2, m = 100;
    GaussianMixture truth;
    truth.weights = VectorXd::Constant(2, 0.5);
    truth.means.resize(d, 2);
    truth.means << 0.30, 0.70, 0.40, 0.60;
    const double separation = (truth.means.col(0) - truth.means.col(1)).norm();
    const double sigma = separation / 8.0;
    truth.variances = MatrixXd::Constant(d, 2, sigma * sigma);

    TaskSpec task = TaskSpec::gmm(2, Box::unit(d), 0.02);
    int hits = 0;
    for (int seed = 0; seed < 10; ++seed) {
        auto map = rff_map(d, m, 30.0, 3000 + 7 * seed);
        Sketch z = as_sketch(sketch_model(map, truth), map, 100);
        SolverOptions opts;
        opts.seed = 40 + seed;
        GaussianMixture est = gaussian_splitting(z, map, task, opts);
        validate(est, task.box, task.S);
        CHECK(est.weights.sum() == Approx(1.0).margin(1e-9));
        if (match_distance(truth.means, est.means) < 0.05 * separation) ++hits;
    }
    CHECK(hits >= 8);
}

TEST_CASE("splitting with K=1 matches the direct single-gaussian fit", "[solver]") {
    const int d = 2, m = 60;
    GaussianMixture truth;
    truth.weights = VectorXd::Ones(1);
    truth.means = MatrixXd::Constant(d, 1, 0.5);
    truth.variances = MatrixXd::Constant(d, 1, 0.01);
    auto map = rff_map(d, m, 20.0, 904);
    Sketch z = as_sketch(sketch_model(map, truth), map);

    TaskSpec task = TaskSpec::gmm(1, Box::unit(d), 0.05);
    SolverOptions opts;
    opts.seed = 3;
    opts.variant = SolverVariant::CLOMP;
    GaussianMixture split = gaussian_splitting(z, map, task, opts);
    GaussianMixture direct = clomp_gmm(z, map, task, opts);
    CHECK(cost(map, z, split) == Approx(cost(map, z, direct)).margin(1e-6));
    CHECK((split.means - truth.means).norm() < 1e-2);
}

TEST_CASE("infeasible tasks are rejected", "[solver]") {
    auto map = rff_map(2, 8, 1.0, 905);
    Sketch z = as_sketch(VectorXcd::Zero(8), map);
    SolverOptions opts;
    CHECK_THROWS_AS(clomp(z, map, TaskSpec::kmeans(0, Box::unit(2)), opts), InfeasibleError);
    CHECK_THROWS_AS(clomp(z, map, TaskSpec::kmeans(2, Box::unit(3)), opts), InfeasibleError);
    CHECK_THROWS_AS(gaussian_splitting(z, map, TaskSpec::kmeans(2, Box::unit(2)), opts),
                    ArgumentError);
}
