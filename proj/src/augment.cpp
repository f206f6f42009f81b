#include "cane/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cane/error.hpp"

namespace cane {

CsrMatrix topn_sparsify(const CsrMatrix& features, std::size_t n_keep) {
    if (n_keep == 0) throw ConfigError("top-N sparsification requires N >= 1");

    std::vector<Triplet> kept;
    kept.reserve(features.nnz());
    for (std::size_t r = 0; r < features.rows(); ++r) {
        const auto cols = features.row_indices(r);
        const auto vals = features.row_values(r);
        if (cols.size() <= n_keep) {
            for (std::size_t k = 0; k < cols.size(); ++k) kept.push_back({r, cols[k], vals[k]});
            continue;
        }
        std::vector<std::size_t> order(cols.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (vals[a] != vals[b]) return vals[a] > vals[b];
            return cols[a] < cols[b];
        });
        for (std::size_t k = 0; k < n_keep; ++k) {
            kept.push_back({r, cols[order[k]], vals[order[k]]});
        }
    }
    return CsrMatrix::from_triplets(features.rows(), features.cols(), std::move(kept));
}

CsrMatrix build_augmented(const CsrMatrix& adjacency, const CsrMatrix& features) {
    const std::size_t n = adjacency.rows();
    const std::size_t m = features.cols();
    if (adjacency.cols() != n || features.rows() != n) {
        throw BoundsError("build_augmented: inconsistent dimensions");
    }
    std::vector<Triplet> triplets;
    triplets.reserve(adjacency.nnz() + 2 * features.nnz());
    for (std::size_t u = 0; u < n; ++u) {
        const auto cols = adjacency.row_indices(u);
        const auto vals = adjacency.row_values(u);
        for (std::size_t k = 0; k < cols.size(); ++k) triplets.push_back({u, cols[k], vals[k]});
    }
    for (std::size_t v = 0; v < n; ++v) {
        const auto cols = features.row_indices(v);
        const auto vals = features.row_values(v);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            triplets.push_back({v, n + cols[k], vals[k]});
            triplets.push_back({n + cols[k], v, vals[k]});
        }
    }
    return CsrMatrix::from_triplets(n + m, n + m, std::move(triplets));
}

AugmentedOperator build_transition(const CsrMatrix& adjacency, const CsrMatrix& features,
                                   double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in [0, 1]");
    const std::size_t n = adjacency.rows();
    const std::size_t m = features.cols();
    if (adjacency.cols() != n || features.rows() != n) {
        throw BoundsError("build_transition: inconsistent dimensions");
    }

    std::vector<Triplet> triplets;
    triplets.reserve(adjacency.nnz() + n + 2 * features.nnz() + m);
    for (std::size_t v = 0; v < n; ++v) {
        // (A+I) row of node v has deg(v)+1 unit entries.
        const auto nbrs = adjacency.row_indices(v);
        const double a_norm = 1.0 / static_cast<double>(nbrs.size() + 1);
        if (alpha > 0.0) {
            triplets.push_back({v, v, alpha * a_norm});
            for (const std::uint32_t u : nbrs) triplets.push_back({v, u, alpha * a_norm});
        }

        const auto attrs = features.row_indices(v);
        const auto vals = features.row_values(v);
        double abs_sum = 0.0;
        for (const double x : vals) abs_sum += std::abs(x);
        if (alpha < 1.0 && abs_sum > 0.0) {
            for (std::size_t k = 0; k < attrs.size(); ++k) {
                const double w = (1.0 - alpha) * vals[k] / abs_sum;
                if (w == 0.0) continue;
                triplets.push_back({v, n + attrs[k], w});
                triplets.push_back({n + attrs[k], v, w});
            }
        }
    }
    if (alpha > 0.0) {
        for (std::size_t j = 0; j < m; ++j) triplets.push_back({n + j, n + j, alpha});
    }

    AugmentedOperator op;
    op.n = n;
    op.m = m;
    op.alpha = alpha;
    op.transition = CsrMatrix::from_triplets(n + m, n + m, std::move(triplets));
    op.transition_t = op.transition.transpose();
    return op;
}

BinaryTargets build_binary_targets(const CsrMatrix& adjacency, const CsrMatrix& features) {
    const std::size_t n = adjacency.rows();
    const std::size_t m = features.cols();
    if (adjacency.cols() != n || features.rows() != n) {
        throw BoundsError("build_binary_targets: inconsistent dimensions");
    }
    std::vector<Triplet> triplets;
    triplets.reserve(adjacency.nnz() + 2 * features.nnz());
    for (std::size_t u = 0; u < n; ++u) {
        for (const std::uint32_t v : adjacency.row_indices(u)) triplets.push_back({u, v, 1.0});
    }
    for (std::size_t v = 0; v < n; ++v) {
        const auto cols = features.row_indices(v);
        const auto vals = features.row_values(v);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (vals[k] > 0.0) {
                triplets.push_back({v, n + cols[k], 1.0});
                triplets.push_back({n + cols[k], v, 1.0});
            }
        }
    }
    BinaryTargets targets;
    targets.n = n;
    targets.m = m;
    targets.positives = CsrMatrix::from_triplets(n + m, n + m, std::move(triplets));
    return targets;
}

namespace {

void check_entity(const AttributedGraph& graph, std::uint32_t entity) {
    if (entity >= graph.n + graph.m) {
        throw BoundsError("entity id " + std::to_string(entity) + " out of range");
    }
}

std::vector<std::uint32_t> sorted_unique(std::vector<std::uint32_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

}  // namespace

std::vector<std::uint32_t> neighbors_order1(const AttributedGraph& graph, std::uint32_t entity) {
    check_entity(graph, entity);
    const auto n = static_cast<std::uint32_t>(graph.n);
    std::vector<std::uint32_t> out;
    if (entity < n) {
        for (const std::uint32_t u : graph.adjacency.row_indices(entity)) out.push_back(u);
        for (const std::uint32_t j : graph.features.row_indices(entity)) out.push_back(n + j);
    } else {
        const std::uint32_t j = entity - n;
        for (std::size_t v = 0; v < graph.n; ++v) {
            if (graph.features.at(v, j) != 0.0) out.push_back(static_cast<std::uint32_t>(v));
        }
    }
    return sorted_unique(std::move(out));
}

std::vector<std::uint32_t> neighbors_order2(const AttributedGraph& graph, std::uint32_t entity) {
    check_entity(graph, entity);
    const auto n = static_cast<std::uint32_t>(graph.n);
    const CsrMatrix features_t = graph.features.transpose();

    std::vector<std::uint32_t> out;
    if (entity < n) {
        // Node part: (A^2)_{vu} > 0 or (X X^T)_{vu} > 0.
        std::vector<double> node_score(graph.n, 0.0);
        for (const std::uint32_t w : graph.adjacency.row_indices(entity)) {
            for (const std::uint32_t u : graph.adjacency.row_indices(w)) node_score[u] += 1.0;
        }
        {
            const auto attrs = graph.features.row_indices(entity);
            const auto vals = graph.features.row_values(entity);
            std::vector<double> via_attrs(graph.n, 0.0);
            for (std::size_t k = 0; k < attrs.size(); ++k) {
                const auto owners = features_t.row_indices(attrs[k]);
                const auto weights = features_t.row_values(attrs[k]);
                for (std::size_t t = 0; t < owners.size(); ++t) {
                    via_attrs[owners[t]] += vals[k] * weights[t];
                }
            }
            for (std::size_t u = 0; u < graph.n; ++u) {
                if (via_attrs[u] > 0.0) node_score[u] += 1.0;
            }
        }
        for (std::size_t u = 0; u < graph.n; ++u) {
            if (node_score[u] > 0.0) out.push_back(static_cast<std::uint32_t>(u));
        }
        // Attribute part: (A X)_{vj} > 0.
        std::vector<double> attr_score(graph.m, 0.0);
        for (const std::uint32_t w : graph.adjacency.row_indices(entity)) {
            const auto attrs = graph.features.row_indices(w);
            const auto vals = graph.features.row_values(w);
            for (std::size_t k = 0; k < attrs.size(); ++k) attr_score[attrs[k]] += vals[k];
        }
        for (std::size_t j = 0; j < graph.m; ++j) {
            if (attr_score[j] > 0.0) out.push_back(n + static_cast<std::uint32_t>(j));
        }
    } else {
        const std::uint32_t j = entity - n;
        // Node part: (A X)_{uj} > 0, reached along j -> w -> u.
        std::vector<double> node_score(graph.n, 0.0);
        {
            const auto owners = features_t.row_indices(j);
            const auto weights = features_t.row_values(j);
            for (std::size_t t = 0; t < owners.size(); ++t) {
                for (const std::uint32_t u : graph.adjacency.row_indices(owners[t])) {
                    node_score[u] += weights[t];
                }
            }
        }
        for (std::size_t u = 0; u < graph.n; ++u) {
            if (node_score[u] > 0.0) out.push_back(static_cast<std::uint32_t>(u));
        }
        // Attribute part: (X^T X)_{ji} >= 1, reached along j -> u -> delta_i.
        std::vector<double> attr_score(graph.m, 0.0);
        {
            const auto owners = features_t.row_indices(j);
            const auto weights = features_t.row_values(j);
            for (std::size_t t = 0; t < owners.size(); ++t) {
                const auto attrs = graph.features.row_indices(owners[t]);
                const auto vals = graph.features.row_values(owners[t]);
                for (std::size_t k = 0; k < attrs.size(); ++k) {
                    attr_score[attrs[k]] += weights[t] * vals[k];
                }
            }
        }
        for (std::size_t i = 0; i < graph.m; ++i) {
            if (attr_score[i] >= 1.0) out.push_back(n + static_cast<std::uint32_t>(i));
        }
    }
    return sorted_unique(std::move(out));
}

}  // namespace cane
