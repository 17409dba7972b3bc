#ifndef ACL_SKETCH_HPP
#define ACL_SKETCH_HPP

#include <cstdint>
#include <vector>

#include "acl/common.hpp"
#include "acl/features.hpp"

namespace acl {

/// Averaged feature vector of a dataset, plus the sample count and the hash
/// of the map that produced it. Values are the mean (not the sum), so their
/// magnitude stays O(1) no matter how many samples were folded in.
struct Sketch {
    VectorXcd values;
    std::int64_t count = 0;
    std::uint64_t map_hash = 0;

    static Sketch empty(int m, std::uint64_t hash) {
        Sketch s;
        s.values = VectorXcd::Zero(m);
        s.count = 0;
        s.map_hash = hash;
        return s;
    }

    int size() const { return static_cast<int>(values.size()); }
};

namespace detail {

// Pairwise (tree) sum of the rows' feature vectors over [lo, hi); keeps the
// rounding error logarithmic in n. Leaf work is a straight loop.
inline VectorXcd pairwise_feature_sum(const FeatureMap& map, const MatrixXd& X,
                                      Eigen::Index lo, Eigen::Index hi) {
    constexpr Eigen::Index kLeaf = 256;
    const int m = map.size();
    if (hi - lo <= kLeaf) {
        // one matrix product for the whole leaf block
        const MatrixXd T =
            (X.middleRows(lo, hi - lo) * map.omega()).rowwise() + map.dither().transpose();
        const PeriodicFunction& f = map.nonlinearity();
        const double scale = 1.0 / std::sqrt(static_cast<double>(m));
        VectorXcd acc = VectorXcd::Zero(m);
        for (Eigen::Index r = 0; r < T.rows(); ++r)
            for (int j = 0; j < m; ++j) acc[j] += f.eval(T(r, j)) * scale;
        return acc;
    }
    const Eigen::Index mid = lo + (hi - lo) / 2;
    return pairwise_feature_sum(map, X, lo, mid) + pairwise_feature_sum(map, X, mid, hi);
}

}  // namespace detail

/// z = (1/n) sum_i Psi(x_i) over the rows of X.
inline Sketch sketch_dataset(const FeatureMap& map, const MatrixXd& X) {
    if (X.rows() == 0) throw DataError("cannot sketch an empty dataset");
    if (X.cols() != map.dim())
        throw DimensionError("dataset has " + std::to_string(X.cols()) +
                             " columns, feature map expects " + std::to_string(map.dim()));
    Sketch s;
    s.map_hash = map.hash();
    s.count = X.rows();
    s.values = detail::pairwise_feature_sum(map, X, 0, X.rows()) /
               static_cast<double>(X.rows());
    // renormalization commutes with averaging, so apply 1/F_1 once at the end
    if (map.renormalize()) s.values *= map.renorm_factor();
    return s;
}

/// Weighted mean of two sketches; counts add. Sketches must come from the
/// same feature map.
inline Sketch merge(const Sketch& a, const Sketch& b) {
    if (a.map_hash != b.map_hash || a.size() != b.size())
        throw IncompatibleSketchError("sketches come from different feature maps");
    if (a.count == 0) return b;
    if (b.count == 0) return a;
    Sketch out;
    out.map_hash = a.map_hash;
    out.count = a.count + b.count;
    out.values = (static_cast<double>(a.count) * a.values +
                  static_cast<double>(b.count) * b.values) /
                 static_cast<double>(out.count);
    return out;
}

struct NodeSimulation {
    Sketch sketch;
    std::int64_t total_bits = 0;
};

/// Round-robin partition of the rows across `nodes` workers, per-node partial
/// sketches, then a merge chain; also tallies the bits every contribution
/// would cost on the wire.
inline NodeSimulation simulate_nodes(const FeatureMap& map, const MatrixXd& X, int nodes,
                                     int float_bits) {
    if (nodes < 1) throw ArgumentError("nodes must be >= 1");
    if (X.rows() == 0) throw DataError("cannot sketch an empty dataset");
    const Eigen::Index n = X.rows();
    std::vector<Sketch> partials;
    partials.reserve(nodes);
    for (int node = 0; node < nodes; ++node) {
        const Eigen::Index rows = (n - node + nodes - 1) / nodes;
        if (rows == 0) continue;
        MatrixXd part(rows, X.cols());
        Eigen::Index r = 0;
        for (Eigen::Index i = node; i < n; i += nodes) part.row(r++) = X.row(i);
        partials.push_back(sketch_dataset(map, part));
    }
    NodeSimulation result;
    result.sketch = partials.front();
    for (std::size_t i = 1; i < partials.size(); ++i)
        result.sketch = merge(result.sketch, partials[i]);
    result.total_bits = static_cast<std::int64_t>(n) * contribution_bits(map, float_bits);
    return result;
}

}  // namespace acl

#endif  // ACL_SKETCH_HPP
