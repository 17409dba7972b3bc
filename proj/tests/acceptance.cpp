// Acceptance suite: one test case per shipped guarantee, each printing a
// single PASS/FAIL line with the measured quantities and its wall time.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "acl/acl.hpp"

using namespace acl;

namespace {

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void report(int criterion, const char* label, bool pass, const std::string& detail,
            double seconds) {
    std::printf("ACCEPTANCE criterion %d [%s]: %s (%s) [%.1fs]\n", criterion, label,
                pass ? "PASS" : "FAIL", detail.c_str(), seconds);
    std::fflush(stdout);
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

TEST_CASE("nonlinearity constants", "[criterion1]") {
    Stopwatch watch;
    const auto rows = verify_constants();
    bool pass = true;
    std::string detail;
    for (const auto& r : rows) {
        pass &= r.pass;
        if (!r.pass) detail += r.name + "=" + std::to_string(r.value) + " ";
    }
    if (pass) detail = std::to_string(rows.size()) + " constants within tolerance";
    const double secs = watch.seconds();
    pass &= secs < 10.0;
    report(1, "nonlinearity constants", pass, detail, secs);
    for (const auto& r : rows) {
        INFO(r.name << " = " << r.value << ", expected " << r.expected << " +- " << r.tolerance);
        CHECK(r.pass);
    }
    REQUIRE(secs < 10.0);
}

TEST_CASE("distortion projections shrink with the sketch size", "[criterion2]") {
    Stopwatch watch;
    const std::vector<int> m_list = {64, 256, 1024, 4096};
    const int seeds = 10, pairs = 200;
    const auto rows = verify_slpd(m_list, seeds, pairs, 2, 20260809);

    std::vector<double> med_q, med_mod;
    int mod_wins_total = 0, comparisons = 0;
    std::string detail = "medians q:";
    for (int m : m_list) {
        std::vector<double> q_eps, mod_eps;
        for (const auto& r : rows) {
            if (r.m != m) continue;
            if (r.kind == "quantized") q_eps.push_back(r.eps_hat);
            if (r.kind == "modulo") mod_eps.push_back(r.eps_hat);
        }
        REQUIRE(q_eps.size() == static_cast<std::size_t>(seeds));
        med_q.push_back(median_of(q_eps));
        med_mod.push_back(median_of(mod_eps));
        detail += " " + std::to_string(med_q.back());
        // per-seed ordering of the two distortions (same projections, pairs)
        int wins = 0;
        for (int s = 0; s < seeds; ++s)
            if (mod_eps[s] >= q_eps[s]) ++wins;
        mod_wins_total += wins >= 7 ? 1 : 0;
        ++comparisons;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < med_q.size(); ++i) decreasing &= med_q[i] < med_q[i - 1];
    const bool ordering = mod_wins_total == comparisons;
    const double secs = watch.seconds();
    const bool pass = decreasing && ordering && secs < 120.0;
    detail += decreasing ? "; strictly decreasing" : "; NOT decreasing";
    detail += ordering ? "; modulo >= quantized in >=7/10 seeds at every m"
                       : "; modulo/quantized ordering violated";
    report(2, "distortion trend", pass, detail, secs);
    CHECK(decreasing);
    CHECK(ordering);
    REQUIRE(secs < 120.0);
}

TEST_CASE("suboptimality certificate holds on random instances", "[criterion3]") {
    Stopwatch watch;
    const auto rows = verify_suboptimality(/*instances=*/100, /*grid_size=*/100, /*m=*/256,
                                           /*d=*/2, /*n=*/64, 20260810);
    int held = 0;
    for (const auto& r : rows) held += r.holds ? 1 : 0;
    const double secs = watch.seconds();
    const bool pass = held == 100 && secs < 120.0;
    report(3, "suboptimality certificate", pass,
           std::to_string(held) + "/100 instances satisfied the 2*sqrt(eps) bound", secs);
    CHECK(held == 100);
    REQUIRE(secs < 120.0);
}

TEST_CASE("dithered squared costs shift by a model-free constant", "[criterion4]") {
    Stopwatch watch;
    const auto res = verify_dither_expectation(/*n_models=*/10, /*dither_draws=*/10000,
                                               /*m=*/64, /*d=*/2, /*n_points=*/64, 20260811);
    const double secs = watch.seconds();
    const bool pass = res.pass && secs < 120.0;
    report(4, "dither expectation", pass,
           "max pairwise z = " + std::to_string(res.max_pair_z) + " over 10 models, " +
               std::to_string(res.dither_draws) + " dither draws",
           secs);
    CHECK(res.max_pair_z <= 3.0);
    REQUIRE(secs < 120.0);
}

TEST_CASE("analytic gaussian sketches match monte carlo", "[criterion5]") {
    Stopwatch watch;
    FeatureMapConfig cfg;
    cfg.d = 2;
    cfg.m = 16;
    cfg.sigma2 = 1.0;
    cfg.omega_seed = 515;
    cfg.dither_seed = 516;
    cfg.nonlinearity = PeriodicKind::ComplexExponential;
    const FeatureMap map = FeatureMap::create(cfg);

    auto eng = make_engine(20260812);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    GaussianMixture gm;
    gm.weights = VectorXd::Ones(1);
    gm.means = MatrixXd::Zero(2, 1);
    gm.means << 0.2 + 0.6 * uni(eng), 0.2 + 0.6 * uni(eng);
    gm.variances = MatrixXd::Zero(2, 1);
    gm.variances << 0.05 + 0.1 * uni(eng), 0.05 + 0.1 * uni(eng);

    const VectorXcd analytic = sketch_model(map, gm);
    const MatrixXd samples = sample_mixture(gm, 1000000, 20260813);
    const VectorXcd mc = sketch_dataset(map, samples).values;

    double worst = 0.0;
    for (int j = 0; j < 16; ++j)
        worst = std::max(worst, std::abs(analytic[j] - mc[j]) / std::abs(analytic[j]));
    const double secs = watch.seconds();
    const bool pass = worst < 1e-2 && secs < 30.0;
    report(5, "gaussian sketch oracle", pass,
           "worst relative entry error " + std::to_string(worst) + " over 1e6 samples", secs);
    CHECK(worst < 1e-2);
    REQUIRE(secs < 30.0);
}

TEST_CASE("node simulation merges exactly and tallies bits", "[criterion6]") {
    Stopwatch watch;
    FeatureMapConfig cfg;
    cfg.d = 3;
    cfg.m = 64;
    cfg.sigma2 = 2.0;
    cfg.omega_seed = 616;
    cfg.dither_seed = 617;
    cfg.nonlinearity = PeriodicKind::UniversalQuantizer;
    const FeatureMap map = FeatureMap::create(cfg);

    auto eng = make_engine(20260814);
    std::normal_distribution<double> gauss;
    MatrixXd X =
        MatrixXd::NullaryExpr(1000, 3, [&](Eigen::Index, Eigen::Index) { return gauss(eng); });

    const auto s1 = simulate_nodes(map, X, 1, 64);
    const auto s4 = simulate_nodes(map, X, 4, 64);
    const auto s16 = simulate_nodes(map, X, 16, 64);
    const double norm = s1.sketch.values.norm();
    const double d4 = (s1.sketch.values - s4.sketch.values).norm() / norm;
    const double d16 = (s1.sketch.values - s16.sketch.values).norm() / norm;
    const bool bits_ok = s1.total_bits == 1000 * 2 * 64 && s4.total_bits == s1.total_bits &&
                         s16.total_bits == s1.total_bits;
    const double secs = watch.seconds();
    const bool pass = d4 <= 1e-12 && d16 <= 1e-12 && bits_ok && secs < 10.0;
    report(6, "merge exactness", pass,
           "relative deviations " + std::to_string(d4) + ", " + std::to_string(d16) +
               "; bits = " + std::to_string(s1.total_bits),
           secs);
    CHECK(d4 <= 1e-12);
    CHECK(d16 <= 1e-12);
    CHECK(bits_ok);
    REQUIRE(secs < 10.0);
}

TEST_CASE("scaled experiment one: success rates by feature kind", "[criterion7]") {
    Stopwatch watch;
    ExperimentConfig cfg;
    cfg.task = TaskKind::KMeans;
    cfg.K = 10;
    cfg.d = 5;
    cfg.n_list = {10000};
    cfg.m_list = {100, 500};
    cfg.kinds = {PeriodicKind::ComplexExponential, PeriodicKind::UniversalQuantizer,
                 PeriodicKind::ComplexModulo};
    cfg.trials = 10;
    cfg.seed = 1;
    cfg.solver.restarts = 8;
    cfg.baseline_restarts = 10;

    const auto rows = run_experiment(cfg, 2);
    auto rate = [&](int m, const char* kind) {
        for (const auto& r : rows)
            if (r.m == m && r.kind == kind) return r.success_rate;
        throw Error("missing cell");
    };
    const double rff10 = rate(500, "rff");
    const double q10 = rate(500, "quantized");
    const double rff2 = rate(100, "rff");
    const double q2 = rate(100, "quantized");
    const double mod2 = rate(100, "modulo");

    const bool high_m = rff10 >= 0.8 && q10 >= 0.7;
    const bool ordering = rff2 >= q2 && q2 >= mod2;
    const double secs = watch.seconds();
    const bool pass = high_m && ordering && secs < 900.0;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "rff@10Kd=%.2f quant@10Kd=%.2f; ordering@2Kd %.2f>=%.2f>=%.2f", rff10, q10,
                  rff2, q2, mod2);
    report(7, "experiment one scaled", pass, buf, secs);
    CHECK(rff10 >= 0.8);
    CHECK(q10 >= 0.7);
    CHECK(ordering);
    REQUIRE(secs < 900.0);
}

TEST_CASE("scaled experiment two: the excess-risk crossing", "[criterion8]") {
    Stopwatch watch;
    ExperimentConfig cfg;
    cfg.task = TaskKind::KMeans;
    cfg.K = 10;
    cfg.d = 5;
    cfg.super_n = 100000;
    cfg.n_list = {100, 10000};
    cfg.m_list = {100, 5000};
    cfg.kinds = {PeriodicKind::ComplexExponential, PeriodicKind::UniversalQuantizer};
    cfg.trials = 11;
    cfg.seed = 7;
    cfg.solver.restarts = 8;
    cfg.baseline_restarts = 10;

    const auto rows = run_experiment(cfg, 2);
    auto cell = [&](int m, const char* kind, int n) {
        for (const auto& r : rows)
            if (r.m == m && r.kind == kind && r.n == n) return r.median_excess;
        throw Error("missing cell");
    };
    // small sketches: the distortion dominates, cells group by feature kind
    const double max_rff_small = std::max(cell(100, "rff", 100), cell(100, "rff", 10000));
    const double min_q_small =
        std::min(cell(100, "quantized", 100), cell(100, "quantized", 10000));
    // large sketches: the sampling error dominates, cells group by dataset size
    const double min_small_n =
        std::min(cell(5000, "rff", 100), cell(5000, "quantized", 100));
    const double max_large_n =
        std::max(cell(5000, "rff", 10000), cell(5000, "quantized", 10000));

    const bool kind_grouping = min_q_small > max_rff_small;
    const bool n_grouping = min_small_n > max_large_n;
    const double secs = watch.seconds();
    const bool pass = kind_grouping && n_grouping && secs < 1200.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "m=100: min quant %.0f > max rff %.0f; m=5000: min n=100 %.2f > max n=1e4 %.2f",
                  min_q_small, max_rff_small, min_small_n, max_large_n);
    report(8, "experiment two scaled", pass, buf, secs);
    CHECK(kind_grouping);
    CHECK(n_grouping);
    REQUIRE(secs < 1200.0);
}

TEST_CASE("cost gradients against central differences", "[criterion9]") {
    Stopwatch watch;
    auto eng = make_engine(20260815);
    std::uniform_real_distribution<double> uni(0.15, 0.85);
    double worst = 0.0;

    for (int rep = 0; rep < 20; ++rep) {
        const bool kmeans_case = rep % 2 == 0;
        const int d = 2 + (rep % 3);
        const int K = 1 + (rep % 4);
        const int m = 24;
        FeatureMapConfig mc;
        mc.d = d;
        mc.m = m;
        mc.sigma2 = 2.0;
        mc.omega_seed = 7000 + rep;
        mc.dither_seed = 7100 + rep;
        mc.nonlinearity = PeriodicKind::ComplexExponential;
        const FeatureMap map = FeatureMap::create(mc);

        Sketch z;
        z.map_hash = map.hash();
        z.count = 1;
        z.values = VectorXcd::Zero(m);
        for (int j = 0; j < m; ++j)
            z.values[j] = cdouble(0.2 * (uni(eng) - 0.5), 0.2 * (uni(eng) - 0.5));

        VectorXd fd, an;
        const double h = 1e-6;
        if (kmeans_case) {
            DiracMixture mix;
            VectorXd w(K);
            for (int k = 0; k < K; ++k) w[k] = 0.2 + uni(eng);
            mix.weights = w / w.sum();
            mix.centroids =
                MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
            an = cost_gradient(map, z, mix);
            VectorXd p0(parameter_count(mix));
            p0 << mix.weights, Eigen::Map<const VectorXd>(mix.centroids.data(), K * d);
            fd.resize(p0.size());
            for (int i = 0; i < p0.size(); ++i) {
                auto eval_at = [&](double delta) {
                    VectorXd p = p0;
                    p[i] += delta;
                    DiracMixture m2 = mix;
                    m2.weights = p.head(K);
                    m2.centroids = Eigen::Map<const MatrixXd>(p.data() + K, d, K);
                    return cost(map, z, m2);
                };
                fd[i] = (eval_at(h) - eval_at(-h)) / (2.0 * h);
            }
        } else {
            GaussianMixture mix;
            VectorXd w(K);
            for (int k = 0; k < K; ++k) w[k] = 0.2 + uni(eng);
            mix.weights = w / w.sum();
            mix.means =
                MatrixXd::NullaryExpr(d, K, [&](Eigen::Index, Eigen::Index) { return uni(eng); });
            mix.variances = MatrixXd::NullaryExpr(
                d, K, [&](Eigen::Index, Eigen::Index) { return 0.02 + 0.05 * uni(eng); });
            an = cost_gradient(map, z, mix);
            VectorXd p0(parameter_count(mix));
            p0 << mix.weights, Eigen::Map<const VectorXd>(mix.means.data(), K * d),
                Eigen::Map<const VectorXd>(mix.variances.data(), K * d);
            fd.resize(p0.size());
            for (int i = 0; i < p0.size(); ++i) {
                auto eval_at = [&](double delta) {
                    VectorXd p = p0;
                    p[i] += delta;
                    GaussianMixture m2 = mix;
                    m2.weights = p.head(K);
                    m2.means = Eigen::Map<const MatrixXd>(p.data() + K, d, K);
                    m2.variances = Eigen::Map<const MatrixXd>(p.data() + K + K * d, d, K);
                    return cost(map, z, m2);
                };
                fd[i] = (eval_at(h) - eval_at(-h)) / (2.0 * h);
            }
        }
        worst = std::max(worst, (an - fd).norm() / std::max(fd.norm(), 1e-12));
    }
    const double secs = watch.seconds();
    const bool pass = worst <= 1e-5 && secs < 10.0;
    report(9, "solver gradients", pass,
           "worst relative gradient error " + std::to_string(worst) + " over 20 points", secs);
    CHECK(worst <= 1e-5);
    REQUIRE(secs < 10.0);
}

TEST_CASE("plug-in formulas", "[criterion10]") {
    Stopwatch watch;
    const auto q = PeriodicFunction::universal_quantizer();
    const auto m_needed =
        required_sketch_size(q, 1.0, Box::unit(1), 1.0, SketchSizeTask::kmeans());
    const double entropy = entropy_bound(Box::unit(1), 0.5);
    const bool size_ok = m_needed == 413;
    const bool entropy_ok = std::abs(entropy - std::log(3.0)) < 1e-12;
    const double secs = watch.seconds();
    const bool pass = size_ok && entropy_ok && secs < 1.0;
    report(10, "plug-in formulas", pass,
           "required m = " + std::to_string(m_needed) + ", entropy = " + std::to_string(entropy),
           secs);
    CHECK(size_ok);
    CHECK(entropy_ok);
    REQUIRE(secs < 1.0);
}
