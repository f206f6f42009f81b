#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cane/graph.hpp"
#include "cane/matrix.hpp"

namespace cane {

// Entities of the augmented graph share one id space: nodes are 0..n-1,
// attribute category j is n+j.

// Keeps the N largest entries of each feature row by signed value. Ties at
// the cutoff keep the lowest column index. Rows with at most N entries pass
// through unchanged.
CsrMatrix topn_sparsify(const CsrMatrix& features, std::size_t n_keep);

// Weighted augmented adjacency [[A, X], [X^T, 0]] of size (n+m) x (n+m).
CsrMatrix build_augmented(const CsrMatrix& adjacency, const CsrMatrix& features);

// The mixed transition operator
//   [[alpha*At, (1-alpha)*Xt], [(1-alpha)*Xt^T, alpha*I]]
// where At is the l1 row normalization of (A+I) and Xt the l1 row
// normalization of X by sum of absolute values, signs preserved. Attribute
// rows are kept exactly in this form; they are not re-normalized to sum to 1.
struct AugmentedOperator {
    std::size_t n = 0;
    std::size_t m = 0;
    double alpha = 0.0;
    CsrMatrix transition;
    CsrMatrix transition_t;  // cached adjoint for the backward pass

    std::size_t size() const { return n + m; }
};

AugmentedOperator build_transition(const CsrMatrix& adjacency, const CsrMatrix& features,
                                   double alpha);

// Binary reconstruction target [[A, X*], [X*^T, 0]] where X*_{vj} = 1 iff
// X_{vj} > 0 strictly. Symmetric; attribute-attribute block is empty.
struct BinaryTargets {
    std::size_t n = 0;
    std::size_t m = 0;
    CsrMatrix positives;

    std::size_t size() const { return n + m; }
    std::span<const std::uint32_t> neighbors(std::uint32_t entity) const {
        return positives.row_indices(entity);
    }
    bool is_positive(std::uint32_t a, std::uint32_t b) const { return positives.contains(a, b); }
};

BinaryTargets build_binary_targets(const CsrMatrix& adjacency, const CsrMatrix& features);

// First-order neighbors in the augmented graph: for a node, its adjacency
// neighbors plus every attribute with a nonzero feature entry; for an
// attribute, every node with a nonzero entry in its column. Sorted ids.
std::vector<std::uint32_t> neighbors_order1(const AttributedGraph& graph, std::uint32_t entity);

// Second-order neighbors, computed by walking every unweighted two-step path
// and applying the sign rules of the expansion: node-node paths require a
// positive product count, node-attribute paths a positive feature sum.
// Reference implementation for tests and inspection, not used in training.
std::vector<std::uint32_t> neighbors_order2(const AttributedGraph& graph, std::uint32_t entity);

}  // namespace cane
