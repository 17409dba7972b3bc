// Sketches are mergeable: shards processed independently (as sensor nodes
// would) combine into exactly the sketch of the full dataset.

#include <cstdio>

#include "acl/acl.hpp"

int main() {
    using namespace acl;

    auto [X, truth] = generate_gmm_data(3, 2, 9000, 8.0, 11);

    FeatureMapConfig cfg;
    cfg.d = 2;
    cfg.m = 64;
    cfg.sigma2 = 1.0 / 20.0 / truth.variances.mean();
    cfg.omega_seed = 21;
    cfg.dither_seed = 22;
    cfg.nonlinearity = PeriodicKind::ComplexModulo;
    cfg.renormalize = true;
    const FeatureMap map = FeatureMap::create(cfg);

    // three shards of different sizes, sketched separately
    Sketch combined = Sketch::empty(map.size(), map.hash());
    const int cuts[4] = {0, 2000, 5500, 9000};
    for (int s = 0; s < 3; ++s) {
        const MatrixXd shard = X.middleRows(cuts[s], cuts[s + 1] - cuts[s]);
        const Sketch part = sketch_dataset(map, shard);
        combined = merge(combined, part);
        std::printf("shard %d: %lld rows\n", s, static_cast<long long>(part.count));
    }

    const Sketch full = sketch_dataset(map, X);
    const double rel = (combined.values - full.values).norm() / full.values.norm();
    std::printf("merged %lld rows, relative deviation from the one-shot sketch: %.2e\n",
                static_cast<long long>(combined.count), rel);

    const auto sim = simulate_nodes(map, X, 16, 32);
    std::printf("16-node simulation: %lld total contribution bits\n",
                static_cast<long long>(sim.total_bits));
    return 0;
}
