#pragma once

#include <cstdint>
#include <vector>

#include "cane/graph.hpp"
#include "cane/rng.hpp"

namespace cane::fixtures {

// Six nodes, four attribute categories. Relabeled 0-based: node ids 0..5,
// attribute delta_j has id 6+j. Built so that node 0 has first-order
// neighbors {1,2,3, d0,d1} and second-order neighbors {0,1,3,4,5, d0,d1,d2}.
inline AttributedGraph toy_graph() {
    const std::vector<NodePair> edges = {{0, 1}, {0, 2}, {0, 3}, {1, 3}, {1, 4}, {3, 5}};
    const std::vector<Triplet> feats = {
        {0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {3, 1, 1.0},
        {2, 2, 1.0}, {4, 3, 1.0}, {5, 2, 1.0},
    };
    return make_graph(6, 4, edges, feats);
}

// Two communities with dense intra-block and sparse cross-block edges;
// attributes indicate block membership, so attribute paths carry the
// community signal even when edges are masked.
inline AttributedGraph two_block_graph(std::size_t per_block, double p_in, double p_cross,
                                       std::uint64_t seed) {
    const std::size_t n = 2 * per_block;
    Rng rng(seed_for(seed, SeedStream::Synthetic));
    std::vector<NodePair> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) {
            const bool same_block = (u < per_block) == (v < per_block);
            if (rng.uniform() < (same_block ? p_in : p_cross)) edges.push_back({u, v});
        }
    }
    std::vector<Triplet> feats;
    std::vector<int> labels(n);
    for (std::size_t v = 0; v < n; ++v) {
        const std::size_t block = v < per_block ? 0 : 1;
        feats.push_back({v, block, 1.0});
        labels[v] = static_cast<int>(block);
    }
    return make_graph(n, 2, edges, feats, std::move(labels));
}

// Random attributed graph with signed features, for property tests.
inline AttributedGraph random_graph(Rng& rng, std::size_t max_n, std::size_t max_m,
                                    double edge_density = 0.3, double feat_density = 0.5,
                                    bool nonnegative_features = false) {
    const std::size_t n = 3 + rng.uniform_u64(max_n - 2);
    const std::size_t m = 1 + rng.uniform_u64(max_m);
    std::vector<NodePair> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (rng.uniform() < edge_density) edges.push_back({u, v});
        }
    }
    if (edges.empty()) edges.push_back({0, static_cast<std::uint32_t>(n - 1)});
    std::vector<Triplet> feats;
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t j = 0; j < m; ++j) {
            if (rng.uniform() < feat_density) {
                const double lo = nonnegative_features ? 0.1 : -2.0;
                feats.push_back({v, j, rng.uniform(lo, 2.0)});
            }
        }
    }
    return make_graph(n, m, edges, feats);
}

}  // namespace cane::fixtures
