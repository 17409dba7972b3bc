// Minimal end-to-end run: plant a Gaussian mixture, sketch the samples with
// one-bit quantized features, learn centroids from the sketch alone, and
// compare against k-means++ on the full data.

#include <cstdio>

#include "acl/acl.hpp"

int main() {
    using namespace acl;

    const int K = 4, d = 2, n = 20000;
    auto [X, truth] = generate_gmm_data(K, d, n, /*separation=*/8.0, /*seed=*/1);
    std::printf("planted %d modes in %d dimensions, %d samples\n", K, d, n);

    // frequencies scaled to the mode size; 2 bits per entry per sample
    FeatureMapConfig cfg;
    cfg.d = d;
    cfg.m = 25 * K * d;
    cfg.law = FrequencyLaw::FoldedGaussian;
    cfg.sigma2 = 1.0 / (10.0 * d) / truth.variances.mean();
    cfg.omega_seed = 2;
    cfg.dither_seed = 3;
    cfg.nonlinearity = PeriodicKind::UniversalQuantizer;
    cfg.renormalize = true;
    const FeatureMap psi = FeatureMap::create(cfg);

    const Sketch z = sketch_dataset(psi, X);
    std::printf("sketched into m = %d entries (%lld bits per contribution)\n", psi.size(),
                static_cast<long long>(contribution_bits(psi, 64)));

    // learning always runs against the plain RFF map with the same draw
    const FeatureMap phi = psi.reference();
    TaskSpec task = TaskSpec::kmeans(K, Box(X.colwise().minCoeff().transpose(),
                                            X.colwise().maxCoeff().transpose()));
    SolverOptions opts;
    opts.seed = 4;
    const DiracMixture learned = clomp_kmeans(z, phi, task, opts);

    const DiracMixture reference = kmeans_baseline(X, K, 10, 5);
    const double sse_learned = sse(learned, X);
    const double sse_reference = sse(reference, X);
    std::printf("SSE from the 2-bit sketch: %.4f\n", sse_learned);
    std::printf("SSE of k-means++ on all data: %.4f (ratio %.3f)\n", sse_reference,
                sse_learned / sse_reference);
    return 0;
}
