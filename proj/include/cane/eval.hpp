#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cane/graph.hpp"
#include "cane/matrix.hpp"
#include "cane/training.hpp"

namespace cane {

// Mann-Whitney AUC: (#(pos > neg) + 0.5 #(pos = neg)) / (|pos| |neg|),
// computed from average ranks.
double auc_score(std::span<const double> pos_scores, std::span<const double> neg_scores);

// Mean over positives of precision at that positive's rank in the combined
// descending ordering. Ties keep the stable order of a seeded shuffle so the
// result does not depend on input arrangement.
double average_precision(std::span<const double> pos_scores, std::span<const double> neg_scores,
                         std::uint64_t tie_seed = 0x7a43u);

struct ClassifyResult {
    double f1_micro = 0.0;
    double f1_macro = 0.0;
};

// Stratified k-fold one-vs-rest logistic regression (l2-regularized, plain
// gradient descent) over the labeled node embeddings; F1 scores averaged over
// folds. Unlabeled rows (label < 0) are ignored.
ClassifyResult classify(const DenseMatrix& embeddings, const std::vector<int>& labels,
                        std::size_t folds, std::uint64_t seed);

// Removes floor(ratio * |E|) undirected edges uniformly at random. Features
// and labels are untouched.
AttributedGraph perturb_edges(const AttributedGraph& graph, double ratio, std::uint64_t seed);

struct MetricReport {
    std::string task;
    std::string metric;  // auc | ap | f1_micro | f1_macro
    double value = 0.0;
    std::string config_echo;
    std::uint64_t seed = 0;
};

// One sweep configuration evaluated on the fixed test split.
struct SweepPoint {
    double x = 0.0;  // masking ratio or top-N value
    double auc = 0.0;
    double ap = 0.0;
};

// Test AUC/AP of a finished run, scored with lp_pair_score.
SweepPoint evaluate_lp(const TrainResult& result, const TrainConfig& cfg);

// Retrains with an increasing share of training edges masked, evaluating
// each model on the untouched test split of the initial split.
std::vector<SweepPoint> robustness_sweep(const AttributedGraph& graph, const TrainConfig& cfg,
                                         std::span<const double> ratios);

// Retrains with different top-N sparsification levels.
std::vector<SweepPoint> topn_sweep(const AttributedGraph& graph, const TrainConfig& cfg,
                                   std::span<const std::size_t> n_values);

std::vector<MetricReport> sweep_reports(const std::string& task,
                                        std::span<const SweepPoint> points,
                                        const TrainConfig& cfg);

}  // namespace cane
