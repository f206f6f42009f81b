#include "cane/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cane/error.hpp"
#include "cane/rng.hpp"

namespace cane {

double auc_score(std::span<const double> pos_scores, std::span<const double> neg_scores) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw ConfigError("auc requires non-empty positive and negative score lists");
    }
    struct Entry {
        double score;
        bool positive;
    };
    std::vector<Entry> entries;
    entries.reserve(pos_scores.size() + neg_scores.size());
    for (const double s : pos_scores) entries.push_back({s, true});
    for (const double s : neg_scores) entries.push_back({s, false});
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.score < b.score; });

    // Average ranks over tied groups, then the rank-sum U statistic.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < entries.size()) {
        std::size_t j = i;
        while (j < entries.size() && entries[j].score == entries[i].score) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
        for (std::size_t t = i; t < j; ++t) {
            if (entries[t].positive) rank_sum_pos += avg_rank;
        }
        i = j;
    }
    const auto p = static_cast<double>(pos_scores.size());
    const auto q = static_cast<double>(neg_scores.size());
    const double u = rank_sum_pos - p * (p + 1.0) / 2.0;
    return u / (p * q);
}

double average_precision(std::span<const double> pos_scores, std::span<const double> neg_scores,
                         std::uint64_t tie_seed) {
    if (pos_scores.empty() || neg_scores.empty()) {
        throw ConfigError("average precision requires non-empty score lists");
    }
    struct Entry {
        double score;
        bool positive;
    };
    std::vector<Entry> entries;
    entries.reserve(pos_scores.size() + neg_scores.size());
    for (const double s : pos_scores) entries.push_back({s, true});
    for (const double s : neg_scores) entries.push_back({s, false});
    Rng rng(seed_for(tie_seed, SeedStream::RankTieBreak));
    rng.shuffle(entries);
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.score > b.score; });

    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < entries.size(); ++r) {
        if (entries[r].positive) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(r + 1);
        }
    }
    return ap / static_cast<double>(pos_scores.size());
}

namespace {

struct FoldPlan {
    std::vector<std::size_t> assignment;  // labeled-position -> fold id
};

// Stratified assignment: per class, shuffle then deal round-robin.
bool plan_folds(const std::vector<std::uint32_t>& ids, const std::vector<int>& labels,
                std::size_t folds, Rng& rng, FoldPlan& plan, std::size_t n_classes,
                const std::vector<int>& class_of) {
    plan.assignment.assign(ids.size(), 0);
    std::vector<std::vector<std::size_t>> by_class(n_classes);
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        by_class[static_cast<std::size_t>(class_of[labels[ids[pos]]])].push_back(pos);
    }
    std::size_t cursor = 0;
    for (auto& members : by_class) {
        rng.shuffle(members);
        for (const std::size_t pos : members) {
            plan.assignment[pos] = cursor % folds;
            ++cursor;
        }
    }
    // Every fold's training portion (the other folds) must contain every class.
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<bool> seen(n_classes, false);
        for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            if (plan.assignment[pos] != f) {
                seen[static_cast<std::size_t>(class_of[labels[ids[pos]]])] = true;
            }
        }
        if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) return false;
    }
    return true;
}

struct BinaryLogisticModel {
    std::vector<double> w;  // d weights + bias at the back
};

BinaryLogisticModel fit_logistic(const std::vector<std::vector<double>>& rows,
                                 const std::vector<double>& targets, double l2,
                                 std::size_t iterations) {
    const std::size_t dim = rows.front().size();
    BinaryLogisticModel model;
    model.w.assign(dim + 1, 0.0);

    double avg_sq_norm = 0.0;
    for (const auto& row : rows) {
        double s = 1.0;
        for (const double x : row) s += x * x;
        avg_sq_norm += s;
    }
    avg_sq_norm /= static_cast<double>(rows.size());
    const double lr = 4.0 / (1.0 + avg_sq_norm);

    std::vector<double> grad(dim + 1);
    for (std::size_t it = 0; it < iterations; ++it) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            double z = model.w[dim];
            for (std::size_t c = 0; c < dim; ++c) z += model.w[c] * rows[r][c];
            const double y = targets[r];
            const double margin = y * z;
            const double coeff =
                -y * (margin >= 0.0 ? std::exp(-margin) / (1.0 + std::exp(-margin))
                                    : 1.0 / (1.0 + std::exp(margin)));
            for (std::size_t c = 0; c < dim; ++c) grad[c] += coeff * rows[r][c];
            grad[dim] += coeff;
        }
        const double inv_n = 1.0 / static_cast<double>(rows.size());
        for (std::size_t c = 0; c < dim; ++c) {
            grad[c] = grad[c] * inv_n + 2.0 * l2 * model.w[c];
        }
        grad[dim] *= inv_n;
        for (std::size_t c = 0; c <= dim; ++c) model.w[c] -= lr * grad[c];
    }
    return model;
}

double model_score(const BinaryLogisticModel& model, std::span<const double> row) {
    double z = model.w.back();
    for (std::size_t c = 0; c < row.size(); ++c) z += model.w[c] * row[c];
    return z;
}

}  // namespace

ClassifyResult classify(const DenseMatrix& embeddings, const std::vector<int>& labels,
                        std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw ConfigError("classification needs at least 2 folds");
    std::vector<std::uint32_t> ids;
    for (std::size_t v = 0; v < embeddings.rows() && v < labels.size(); ++v) {
        if (labels[v] >= 0) ids.push_back(static_cast<std::uint32_t>(v));
    }
    if (ids.size() < folds) throw ConfigError("fewer labeled nodes than folds");

    std::set<int> label_set;
    for (const std::uint32_t v : ids) label_set.insert(labels[v]);
    if (label_set.size() < 2) throw ConfigError("classification needs at least 2 classes");
    const std::size_t n_classes = label_set.size();
    std::vector<int> class_of(*label_set.rbegin() + 1, -1);
    {
        int next = 0;
        for (const int raw : label_set) class_of[raw] = next++;
    }

    FoldPlan plan;
    bool planned = false;
    for (std::size_t attempt = 0; attempt < 3 && !planned; ++attempt) {
        Rng rng(seed_for(seed, SeedStream::ClassifyFolds, attempt));
        planned = plan_folds(ids, labels, folds, rng, plan, n_classes, class_of);
    }
    if (!planned) {
        throw ConfigError("stratified folding failed: some class never reaches a training fold");
    }

    const std::size_t dim = embeddings.cols();
    double micro_sum = 0.0, macro_sum = 0.0;
    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train_pos, test_pos;
        for (std::size_t pos = 0; pos < ids.size(); ++pos) {
            (plan.assignment[pos] == f ? test_pos : train_pos).push_back(pos);
        }

        // Standardize on the training fold.
        std::vector<double> mean(dim, 0.0), stddev(dim, 0.0);
        for (const std::size_t pos : train_pos) {
            const auto row = embeddings.row(ids[pos]);
            for (std::size_t c = 0; c < dim; ++c) mean[c] += row[c];
        }
        for (double& x : mean) x /= static_cast<double>(train_pos.size());
        for (const std::size_t pos : train_pos) {
            const auto row = embeddings.row(ids[pos]);
            for (std::size_t c = 0; c < dim; ++c) {
                stddev[c] += (row[c] - mean[c]) * (row[c] - mean[c]);
            }
        }
        for (double& x : stddev) {
            x = std::sqrt(x / static_cast<double>(train_pos.size()));
            if (x < 1e-12) x = 1.0;
        }
        const auto standardized = [&](std::uint32_t v) {
            std::vector<double> row(dim);
            const auto raw = embeddings.row(v);
            for (std::size_t c = 0; c < dim; ++c) row[c] = (raw[c] - mean[c]) / stddev[c];
            return row;
        };

        std::vector<std::vector<double>> train_rows;
        train_rows.reserve(train_pos.size());
        for (const std::size_t pos : train_pos) train_rows.push_back(standardized(ids[pos]));

        std::vector<BinaryLogisticModel> models(n_classes);
        std::vector<double> targets(train_pos.size());
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (std::size_t r = 0; r < train_pos.size(); ++r) {
                const int cls = class_of[labels[ids[train_pos[r]]]];
                targets[r] = cls == static_cast<int>(c) ? 1.0 : -1.0;
            }
            models[c] = fit_logistic(train_rows, targets, 1e-3, 500);
        }

        std::vector<std::size_t> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0);
        for (const std::size_t pos : test_pos) {
            const std::vector<double> row = standardized(ids[pos]);
            std::size_t best = 0;
            double best_score = model_score(models[0], row);
            for (std::size_t c = 1; c < n_classes; ++c) {
                const double s = model_score(models[c], row);
                if (s > best_score) {
                    best_score = s;
                    best = c;
                }
            }
            const auto truth = static_cast<std::size_t>(class_of[labels[ids[pos]]]);
            if (best == truth) {
                ++tp[truth];
            } else {
                ++fp[best];
                ++fn[truth];
            }
        }
        std::size_t tp_total = 0, fp_total = 0, fn_total = 0;
        double macro = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c) {
            tp_total += tp[c];
            fp_total += fp[c];
            fn_total += fn[c];
            const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
            macro += denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
        }
        macro_sum += macro / static_cast<double>(n_classes);
        micro_sum += 2.0 * static_cast<double>(tp_total) /
                     static_cast<double>(2 * tp_total + fp_total + fn_total);
    }

    return {micro_sum / static_cast<double>(folds), macro_sum / static_cast<double>(folds)};
}

AttributedGraph perturb_edges(const AttributedGraph& graph, double ratio, std::uint64_t seed) {
    if (ratio < 0.0 || ratio >= 1.0) throw ConfigError("perturbation ratio must lie in [0, 1)");
    std::vector<NodePair> edges = graph.undirected_edges();
    const auto drop = static_cast<std::size_t>(ratio * static_cast<double>(edges.size()));
    Rng rng(seed_for(seed, SeedStream::Perturb));
    rng.shuffle(edges);

    std::vector<Triplet> triplets;
    triplets.reserve(2 * (edges.size() - drop));
    for (std::size_t i = drop; i < edges.size(); ++i) {
        triplets.push_back({edges[i].first, edges[i].second, 1.0});
        triplets.push_back({edges[i].second, edges[i].first, 1.0});
    }
    AttributedGraph out = graph;
    out.adjacency = CsrMatrix::from_triplets(graph.n, graph.n, std::move(triplets));
    return out;
}

SweepPoint evaluate_lp(const TrainResult& result, const TrainConfig& cfg) {
    if (result.split.test_pos.empty()) {
        throw ConfigError("no held-out test edges in this split");
    }
    std::vector<double> pos_scores, neg_scores;
    pos_scores.reserve(result.split.test_pos.size());
    neg_scores.reserve(result.split.test_neg.size());
    for (const auto& [u, v] : result.split.test_pos) {
        pos_scores.push_back(lp_pair_score(result.state, result.stack, u, v, cfg));
    }
    for (const auto& [u, v] : result.split.test_neg) {
        neg_scores.push_back(lp_pair_score(result.state, result.stack, u, v, cfg));
    }
    SweepPoint point;
    point.auc = auc_score(pos_scores, neg_scores);
    point.ap = average_precision(pos_scores, neg_scores);
    return point;
}

std::vector<SweepPoint> robustness_sweep(const AttributedGraph& graph, const TrainConfig& cfg,
                                         std::span<const double> ratios) {
    cfg.validate();
    const EdgeSplit base_split =
        split_edges(graph, cfg.train_frac, cfg.test_frac, cfg.val_frac, cfg.seed);

    std::vector<SweepPoint> points;
    points.reserve(ratios.size());
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        EdgeSplit masked = base_split;
        masked.train_graph = perturb_edges(base_split.train_graph, ratios[i],
                                           seed_for(cfg.seed, SeedStream::Perturb, i));
        const TrainResult result = train_on_split(std::move(masked), cfg);
        SweepPoint point = evaluate_lp(result, cfg);
        point.x = ratios[i];
        points.push_back(point);
    }
    return points;
}

std::vector<SweepPoint> topn_sweep(const AttributedGraph& graph, const TrainConfig& cfg,
                                   std::span<const std::size_t> n_values) {
    cfg.validate();
    std::vector<SweepPoint> points;
    points.reserve(n_values.size());
    for (const std::size_t n_keep : n_values) {
        TrainConfig sweep_cfg = cfg;
        sweep_cfg.topn = n_keep;
        const TrainResult result = train(graph, sweep_cfg);
        SweepPoint point = evaluate_lp(result, sweep_cfg);
        point.x = static_cast<double>(n_keep);
        points.push_back(point);
    }
    return points;
}

std::vector<MetricReport> sweep_reports(const std::string& task,
                                        std::span<const SweepPoint> points,
                                        const TrainConfig& cfg) {
    std::vector<MetricReport> reports;
    reports.reserve(points.size() * 2);
    for (const SweepPoint& p : points) {
        reports.push_back({task, "auc", p.auc, config_summary(cfg), cfg.seed});
        reports.push_back({task, "ap", p.ap, config_summary(cfg), cfg.seed});
    }
    return reports;
}

}  // namespace cane
