#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cane/matrix.hpp"

namespace cane {

using NodePair = std::pair<std::uint32_t, std::uint32_t>;

// An undirected attributed network: binary symmetric adjacency over n nodes
// (no stored self-loops) plus a sparse signed feature matrix over m attribute
// categories. Labels are optional, -1 marks an unlabeled node.
struct AttributedGraph {
    std::size_t n = 0;
    std::size_t m = 0;
    CsrMatrix adjacency;
    CsrMatrix features;
    std::vector<int> labels;

    bool has_labels() const;
    bool has_edge(std::uint32_t u, std::uint32_t v) const { return adjacency.contains(u, v); }
    std::size_t edge_count() const { return adjacency.nnz() / 2; }
    // Canonical (min, max) pairs in sorted order.
    std::vector<NodePair> undirected_edges() const;

    // Asserts the structural invariants: symmetry, zero diagonal, unit
    // adjacency values, in-range feature indices.
    void validate() const;
};

// Programmatic constructor used by tests and synthetic benchmarks. Edges are
// symmetrized and deduplicated; self-loops are rejected.
AttributedGraph make_graph(std::size_t n, std::size_t m, const std::vector<NodePair>& edges,
                           const std::vector<Triplet>& feature_entries,
                           std::vector<int> labels = {});

std::size_t degree(const AttributedGraph& graph, std::uint32_t v);

// Edge file: one "src<TAB>dst" pair per line, optional first line
// "#n=<n> m=<m>". Feature file: header line "sparse" (triples) or "dense"
// (CSV rows). Label file: "node<TAB>label".
AttributedGraph load_graph(const std::string& edge_path, const std::string& feature_path,
                           const std::optional<std::string>& label_path = std::nullopt);

struct EdgeSplit {
    AttributedGraph train_graph;
    std::vector<NodePair> val_pos;
    std::vector<NodePair> test_pos;
    std::vector<NodePair> val_neg;
    std::vector<NodePair> test_neg;
};

// Partitions the undirected edge set into train/test/val and samples an equal
// number of evaluation negatives from the non-edges of the full graph.
// Deterministic under a fixed seed.
EdgeSplit split_edges(const AttributedGraph& graph, double train_frac, double test_frac,
                      double val_frac, std::uint64_t seed);

}  // namespace cane
