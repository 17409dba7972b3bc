#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <random>

#include "acl/io.hpp"

using namespace acl;
using Catch::Approx;

TEST_CASE("feature map config json round trip", "[io]") {
    FeatureMapConfig cfg;
    cfg.d = 3;
    cfg.m = 17;
    cfg.law = FrequencyLaw::FoldedGaussian;
    cfg.sigma2 = 0.0123456789;
    cfg.omega_seed = 12345678901234567ULL;
    cfg.dither_seed = 42;
    cfg.nonlinearity = PeriodicKind::ComplexModulo;
    cfg.renormalize = true;

    const FeatureMapConfig back = feature_map_config_from_json(to_json(cfg));
    CHECK(back.canonical_string() == cfg.canonical_string());
    CHECK(FeatureMap::create(back).hash() == FeatureMap::create(cfg).hash());

    // a null dither seed means zero dither
    cfg.dither_seed = std::nullopt;
    const FeatureMapConfig zero = feature_map_config_from_json(to_json(cfg));
    CHECK_FALSE(zero.dither_seed.has_value());
    CHECK(FeatureMap::create(zero).dither().norm() == 0.0);
}

TEST_CASE("sketch json round trip preserves values exactly", "[io]") {
    FeatureMapConfig cfg;
    cfg.d = 2;
    cfg.m = 9;
    cfg.sigma2 = 1.7;
    cfg.omega_seed = 5;
    cfg.dither_seed = 6;
    cfg.nonlinearity = PeriodicKind::UniversalQuantizer;
    auto map = FeatureMap::create(cfg);
    MatrixXd X = MatrixXd::Random(20, 2);
    Sketch s = sketch_dataset(map, X);

    // through text and back, like the CLI does
    const std::string text = to_json(s, cfg).dump();
    auto [back, map2] = sketch_from_json(json::parse(text));
    CHECK(back.count == s.count);
    CHECK(back.map_hash == s.map_hash);
    CHECK((back.values - s.values).norm() == 0.0);
    CHECK(map2.hash() == map.hash());
}

TEST_CASE("model json round trips", "[io]") {
    Box box = Box::unit(2);

    DiracMixture dm;
    dm.weights = VectorXd::Constant(3, 1.0 / 3);
    dm.centroids = MatrixXd::Random(2, 3).cwiseAbs();
    auto [dback, dbox] = model_from_json(to_json(MixtureModel(dm), box));
    CHECK(std::holds_alternative<DiracMixture>(dback));
    CHECK((std::get<DiracMixture>(dback).centroids - dm.centroids).norm() == 0.0);
    CHECK((dbox.lower - box.lower).norm() == 0.0);

    GaussianMixture gm;
    gm.weights = VectorXd::Constant(2, 0.5);
    gm.means = MatrixXd::Random(2, 2).cwiseAbs();
    gm.variances = MatrixXd::Constant(2, 2, 0.03);
    auto [gback, gbox] = model_from_json(to_json(MixtureModel(gm), box, 0.1));
    CHECK(std::holds_alternative<GaussianMixture>(gback));
    CHECK((std::get<GaussianMixture>(gback).variances - gm.variances).norm() == 0.0);
}

TEST_CASE("experiment config parsing", "[io]") {
    json j = json::parse(R"({
        "task": "gmm", "K": 4, "d": 3, "n": 2000, "m_list": [60, 120],
        "kinds": ["rff", "quantized"], "trials": 7, "seed": 9,
        "sigma2": "gmm", "law": "gaussian", "separation": 6.5
    })");
    ExperimentConfig cfg = experiment_config_from_json(j);
    CHECK(cfg.task == TaskKind::GMM);
    CHECK(cfg.K == 4);
    CHECK(cfg.n_list == std::vector<int>{2000});
    CHECK(cfg.m_list == std::vector<int>{60, 120});
    CHECK(cfg.kinds.size() == 2);
    CHECK(cfg.trials == 7);
    CHECK(cfg.sigma2 == Approx(1.0 / 300.0).epsilon(1e-12));
    CHECK(cfg.law == FrequencyLaw::Gaussian);
    CHECK(cfg.separation == 6.5);

    CHECK_THROWS_AS(experiment_config_from_json(json::parse(R"({"task":"foo"})")), DataError);
}

TEST_CASE("csv loading", "[io]") {
    const std::string path = "io_test.csv";
    {
        std::ofstream out(path);
        out << "a,b\n1,2\n3,4\n5,6\n";
    }
    MatrixXd with_header = load_matrix_csv(path, true);
    CHECK(with_header.rows() == 3);
    CHECK(with_header(2, 1) == 6.0);
    CHECK_THROWS_AS(load_matrix_csv(path, false), DataError);  // header row is not numeric
    std::remove(path.c_str());

    {
        std::ofstream out(path);
        out << "1,2\n3\n";
    }
    CHECK_THROWS_AS(load_matrix_csv(path, false), DataError);
    std::remove(path.c_str());

    CHECK_THROWS_AS(load_matrix_csv("does_not_exist.csv", false), DataError);
}
