#include "cane/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cane/error.hpp"
#include "cane/rng.hpp"

namespace cane {

namespace {

CsrMatrix adjacency_from_pairs(std::size_t n, const std::set<NodePair>& canonical) {
    std::vector<Triplet> triplets;
    triplets.reserve(canonical.size() * 2);
    for (const auto& [u, v] : canonical) {
        triplets.push_back({u, v, 1.0});
        triplets.push_back({v, u, 1.0});
    }
    return CsrMatrix::from_triplets(n, n, std::move(triplets));
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line_no,
                             const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": " + what);
}

struct EdgeFileContents {
    std::optional<std::size_t> declared_n;
    std::optional<std::size_t> declared_m;
    std::vector<NodePair> pairs;  // canonical, deduped
    std::size_t max_node = 0;
    bool any = false;
};

EdgeFileContents read_edge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open edge file: " + path);

    EdgeFileContents out;
    std::set<NodePair> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::size_t n = 0, m = 0;
            if (line_no == 1 && std::sscanf(line.c_str(), "#n=%zu m=%zu", &n, &m) == 2) {
                out.declared_n = n;
                out.declared_m = m;
                continue;
            }
            parse_fail(path, line_no, "unexpected comment line");
        }
        std::istringstream ss(line);
        long long a = -1, b = -1;
        std::string extra;
        if (!(ss >> a >> b) || (ss >> extra)) parse_fail(path, line_no, "expected 'src<TAB>dst'");
        if (a < 0 || b < 0) parse_fail(path, line_no, "negative node index");
        if (a == b) parse_fail(path, line_no, "self-loop edge " + std::to_string(a));
        const auto u = static_cast<std::uint32_t>(std::min(a, b));
        const auto v = static_cast<std::uint32_t>(std::max(a, b));
        seen.insert({u, v});
        out.max_node = std::max<std::size_t>(out.max_node, v);
        out.any = true;
    }
    out.pairs.assign(seen.begin(), seen.end());
    return out;
}

struct FeatureFileContents {
    bool dense = false;
    std::vector<Triplet> entries;
    std::size_t max_node = 0;
    std::size_t max_attr = 0;
    std::size_t dense_rows = 0;
    std::size_t dense_cols = 0;
    bool any = false;
};

FeatureFileContents read_feature_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open feature file: " + path);

    std::string header;
    if (!std::getline(in, header)) throw ParseError(path + ":1: empty feature file");
    while (!header.empty() && (header.back() == '\r' || header.back() == ' ')) header.pop_back();

    FeatureFileContents out;
    std::string line;
    std::size_t line_no = 1;
    if (header == "sparse") {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream ss(line);
            long long node = -1, attr = -1;
            double value = 0.0;
            std::string extra;
            if (!(ss >> node >> attr >> value) || (ss >> extra)) {
                parse_fail(path, line_no, "expected 'node<TAB>attr<TAB>value'");
            }
            if (node < 0 || attr < 0) parse_fail(path, line_no, "negative index");
            if (value == 0.0) continue;
            out.entries.push_back({static_cast<std::size_t>(node),
                                   static_cast<std::size_t>(attr), value});
            out.max_node = std::max<std::size_t>(out.max_node, static_cast<std::size_t>(node));
            out.max_attr = std::max<std::size_t>(out.max_attr, static_cast<std::size_t>(attr));
            out.any = true;
        }
    } else if (header == "dense") {
        out.dense = true;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) continue;
            std::istringstream ss(line);
            std::string cell;
            std::size_t col = 0;
            while (std::getline(ss, cell, ',')) {
                double value = 0.0;
                try {
                    std::size_t consumed = 0;
                    value = std::stod(cell, &consumed);
                    while (consumed < cell.size() &&
                           (cell[consumed] == ' ' || cell[consumed] == '\r')) {
                        ++consumed;
                    }
                    if (consumed != cell.size()) throw std::invalid_argument(cell);
                } catch (const std::exception&) {
                    parse_fail(path, line_no, "bad numeric cell '" + cell + "'");
                }
                if (value != 0.0) out.entries.push_back({out.dense_rows, col, value});
                ++col;
            }
            if (col == 0) parse_fail(path, line_no, "empty row");
            if (out.dense_cols == 0) {
                out.dense_cols = col;
            } else if (col != out.dense_cols) {
                parse_fail(path, line_no, "row has " + std::to_string(col) + " columns, expected " +
                                              std::to_string(out.dense_cols));
            }
            ++out.dense_rows;
            out.any = true;
        }
    } else {
        parse_fail(path, 1, "feature header must be 'sparse' or 'dense'");
    }
    return out;
}

std::vector<int> read_label_file(const std::string& path, std::size_t& max_node) {
    std::ifstream in(path);
    if (!in) throw FileError("cannot open label file: " + path);
    std::vector<std::pair<std::size_t, int>> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        long long node = -1, label = 0;
        std::string extra;
        if (!(ss >> node >> label) || (ss >> extra)) {
            parse_fail(path, line_no, "expected 'node<TAB>label'");
        }
        if (node < 0) parse_fail(path, line_no, "negative node index");
        raw.emplace_back(static_cast<std::size_t>(node), static_cast<int>(label));
        max_node = std::max(max_node, static_cast<std::size_t>(node));
    }
    std::vector<int> labels;
    for (const auto& [node, label] : raw) {
        if (labels.size() <= node) labels.resize(node + 1, -1);
        labels[node] = label;
    }
    return labels;
}

}  // namespace

bool AttributedGraph::has_labels() const {
    return std::any_of(labels.begin(), labels.end(), [](int l) { return l >= 0; });
}

std::vector<NodePair> AttributedGraph::undirected_edges() const {
    std::vector<NodePair> out;
    out.reserve(edge_count());
    for (std::size_t u = 0; u < n; ++u) {
        for (const std::uint32_t v : adjacency.row_indices(u)) {
            if (u < v) out.push_back({static_cast<std::uint32_t>(u), v});
        }
    }
    return out;
}

void AttributedGraph::validate() const {
    if (adjacency.rows() != n || adjacency.cols() != n) {
        throw BoundsError("adjacency shape does not match node count");
    }
    if (features.rows() != n || features.cols() != m) {
        throw BoundsError("feature shape does not match declared n x m");
    }
    for (std::size_t u = 0; u < n; ++u) {
        const auto cols = adjacency.row_indices(u);
        const auto vals = adjacency.row_values(u);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] == u) throw BoundsError("self-loop stored at node " + std::to_string(u));
            if (vals[k] != 1.0) throw BoundsError("non-binary adjacency value");
            if (!adjacency.contains(cols[k], u)) {
                throw BoundsError("asymmetric adjacency at (" + std::to_string(u) + ", " +
                                  std::to_string(cols[k]) + ")");
            }
        }
    }
    if (!labels.empty() && labels.size() != n) {
        throw BoundsError("label vector length does not match node count");
    }
}

AttributedGraph make_graph(std::size_t n, std::size_t m, const std::vector<NodePair>& edges,
                           const std::vector<Triplet>& feature_entries,
                           std::vector<int> labels) {
    std::set<NodePair> canonical;
    for (const auto& [a, b] : edges) {
        if (a == b) throw ParseError("self-loop edge " + std::to_string(a));
        if (a >= n || b >= n) throw BoundsError("edge endpoint past node count");
        canonical.insert({std::min(a, b), std::max(a, b)});
    }
    AttributedGraph g;
    g.n = n;
    g.m = m;
    g.adjacency = adjacency_from_pairs(n, canonical);
    g.features = CsrMatrix::from_triplets(n, m, feature_entries);
    g.labels = std::move(labels);
    g.validate();
    return g;
}

std::size_t degree(const AttributedGraph& graph, std::uint32_t v) {
    if (v >= graph.n) {
        throw BoundsError("degree: node " + std::to_string(v) + " out of range");
    }
    return graph.adjacency.row_nnz(v);
}

AttributedGraph load_graph(const std::string& edge_path, const std::string& feature_path,
                           const std::optional<std::string>& label_path) {
    const EdgeFileContents edges = read_edge_file(edge_path);
    const FeatureFileContents feats = read_feature_file(feature_path);

    std::size_t label_max_node = 0;
    std::vector<int> labels;
    if (label_path) labels = read_label_file(*label_path, label_max_node);

    std::size_t n = 0;
    if (edges.declared_n) {
        n = *edges.declared_n;
    } else {
        if (edges.any) n = std::max(n, edges.max_node + 1);
        if (feats.any) n = std::max(n, feats.dense ? feats.dense_rows : feats.max_node + 1);
        if (!labels.empty()) n = std::max(n, label_max_node + 1);
    }
    std::size_t m = 0;
    if (edges.declared_m) {
        m = *edges.declared_m;
    } else if (feats.dense) {
        m = feats.dense_cols;
    } else if (feats.any) {
        m = feats.max_attr + 1;
    }

    if (edges.any && edges.max_node >= n) {
        throw BoundsError(edge_path + ": node index " + std::to_string(edges.max_node) +
                          " >= declared n=" + std::to_string(n));
    }
    if (feats.any) {
        const std::size_t fmax_node = feats.dense ? feats.dense_rows - 1 : feats.max_node;
        const std::size_t fmax_attr = feats.dense ? feats.dense_cols - 1 : feats.max_attr;
        if (fmax_node >= n) {
            throw BoundsError(feature_path + ": node index " + std::to_string(fmax_node) +
                              " >= n=" + std::to_string(n));
        }
        if (fmax_attr >= m) {
            throw BoundsError(feature_path + ": attribute index " + std::to_string(fmax_attr) +
                              " >= m=" + std::to_string(m));
        }
    }
    if (!labels.empty()) {
        if (label_max_node >= n) {
            throw BoundsError(*label_path + ": node index " + std::to_string(label_max_node) +
                              " >= n=" + std::to_string(n));
        }
        labels.resize(n, -1);
    }

    return make_graph(n, m, edges.pairs, feats.entries, std::move(labels));
}

EdgeSplit split_edges(const AttributedGraph& graph, double train_frac, double test_frac,
                      double val_frac, std::uint64_t seed) {
    if (train_frac < 0 || test_frac < 0 || val_frac < 0 ||
        std::abs(train_frac + test_frac + val_frac - 1.0) > 1e-9) {
        throw ConfigError("split fractions must be nonnegative and sum to 1");
    }
    std::vector<NodePair> edges = graph.undirected_edges();
    const std::size_t total = edges.size();
    if (total < 20) {
        throw ConfigError("split_edges requires at least 20 edges, got " + std::to_string(total));
    }

    const auto n_test = static_cast<std::size_t>(test_frac * static_cast<double>(total));
    const auto n_val = static_cast<std::size_t>(val_frac * static_cast<double>(total));
    const std::size_t n_train = total - n_test - n_val;
    if ((test_frac > 0 && n_test == 0) || (val_frac > 0 && n_val == 0) ||
        (train_frac > 0 && n_train == 0)) {
        throw ConfigError("too few edges for a non-empty requested split");
    }

    Rng rng(seed_for(seed, SeedStream::EdgeSplit));
    rng.shuffle(edges);

    EdgeSplit split;
    split.test_pos.assign(edges.begin(), edges.begin() + n_test);
    split.val_pos.assign(edges.begin() + n_test, edges.begin() + n_test + n_val);
    std::vector<NodePair> train_edges(edges.begin() + n_test + n_val, edges.end());

    AttributedGraph train = graph;
    {
        std::set<NodePair> canonical(train_edges.begin(), train_edges.end());
        train.adjacency = adjacency_from_pairs(graph.n, canonical);
    }
    split.train_graph = std::move(train);

    // Evaluation negatives: uniform non-edges of the *full* graph, distinct
    // endpoints, no repeats across val/test.
    const std::size_t want = n_test + n_val;
    const std::size_t possible = graph.n * (graph.n - 1) / 2 - total;
    if (want > possible) {
        throw ConfigError("graph too dense to sample " + std::to_string(want) +
                          " negative pairs");
    }
    std::set<NodePair> chosen;
    std::vector<NodePair> negatives;
    negatives.reserve(want);
    std::size_t attempts = 0;
    const std::size_t attempt_cap = 1000 * (want + 1);
    while (negatives.size() < want) {
        if (++attempts > attempt_cap) {
            throw ConfigError("negative sampling failed to find enough non-edges");
        }
        const auto a = static_cast<std::uint32_t>(rng.uniform_u64(graph.n));
        const auto b = static_cast<std::uint32_t>(rng.uniform_u64(graph.n));
        if (a == b) continue;
        const NodePair p{std::min(a, b), std::max(a, b)};
        if (graph.has_edge(p.first, p.second)) continue;
        if (!chosen.insert(p).second) continue;
        negatives.push_back(p);
    }
    split.test_neg.assign(negatives.begin(), negatives.begin() + n_test);
    split.val_neg.assign(negatives.begin() + n_test, negatives.end());
    return split;
}

}  // namespace cane
