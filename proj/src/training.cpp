#include "cane/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "cane/error.hpp"
#include "cane/eval.hpp"

namespace cane {

namespace {

double softplus(double x) {
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

bool involves_attribute(std::uint32_t a, std::uint32_t b, std::size_t n) {
    return a >= n || b >= n;
}

}  // namespace

Variant variant_from_string(const std::string& name) {
    if (name == "full") return Variant::Full;
    if (name == "gcn") return Variant::Gcn;
    if (name == "inner") return Variant::Inner;
    if (name == "ncoll") return Variant::Ncoll;
    throw ConfigError("unknown variant '" + name + "' (expected full|gcn|inner|ncoll)");
}

std::string to_string(Variant variant) {
    switch (variant) {
        case Variant::Full: return "full";
        case Variant::Gcn: return "gcn";
        case Variant::Inner: return "inner";
        case Variant::Ncoll: return "ncoll";
    }
    return "full";
}

std::string config_summary(const TrainConfig& cfg) {
    auto fmt = [](double x) {
        std::string s = std::to_string(x);
        while (s.size() > 1 && s.back() == '0') s.pop_back();
        if (!s.empty() && s.back() == '.') s.pop_back();
        return s;
    };
    return "variant=" + to_string(cfg.variant) + " d=" + std::to_string(cfg.d) +
           " k=" + std::to_string(cfg.k) + " alpha=" + fmt(cfg.alpha) +
           " topn=" + std::to_string(cfg.topn) + " lr=" + fmt(cfg.lr) +
           " epochs=" + std::to_string(cfg.epochs) + " patience=" + std::to_string(cfg.patience) +
           " negatives=" + std::to_string(cfg.negatives_per_positive) +
           " batch=" + std::to_string(cfg.batch_size) + " seed=" + std::to_string(cfg.seed);
}

void TrainConfig::validate() const {
    if (d == 0 || topn == 0 || epochs == 0 || patience == 0 || negatives_per_positive == 0 ||
        batch_size == 0) {
        throw ConfigError("all numeric training fields must be positive");
    }
    if (lr <= 0.0) throw ConfigError("learning rate must be positive");
    if (alpha < 0.0 || alpha > 1.0) throw ConfigError("alpha must lie in [0, 1]");
    if (train_frac < 0 || test_frac < 0 || val_frac <= 0 ||
        std::abs(train_frac + test_frac + val_frac - 1.0) > 1e-9) {
        throw ConfigError("split fractions must sum to 1 with a nonzero validation share");
    }
    if (variant == Variant::Inner && separate_heads) {
        throw ConfigError("separate_heads has no effect for the inner variant");
    }
}

double pair_loss(double pos_logit, std::span<const double> neg_logits, double& dpos,
                 std::vector<double>& dnegs) {
    if (neg_logits.empty()) throw ConfigError("pair_loss requires at least one negative");
    double loss = softplus(-pos_logit);
    dpos = sigmoid(pos_logit) - 1.0;
    dnegs.resize(neg_logits.size());
    for (std::size_t i = 0; i < neg_logits.size(); ++i) {
        loss += softplus(neg_logits[i]);
        dnegs[i] = sigmoid(neg_logits[i]);
    }
    return loss;
}

std::uint32_t sample_negative(std::uint32_t anchor, const BinaryTargets& targets, Rng& rng,
                              std::uint32_t lo, std::uint32_t hi) {
    if (lo >= hi || hi > targets.size()) throw BoundsError("sample_negative: bad range");
    const auto row = targets.neighbors(anchor);
    const auto begin = std::lower_bound(row.begin(), row.end(), lo);
    const auto end = std::lower_bound(row.begin(), row.end(), hi);
    std::size_t blocked = static_cast<std::size_t>(end - begin);
    if (anchor >= lo && anchor < hi) ++blocked;
    if (blocked >= static_cast<std::size_t>(hi - lo)) {
        throw SamplingError("no admissible negative for anchor " + std::to_string(anchor));
    }
    for (;;) {
        const auto candidate = static_cast<std::uint32_t>(lo + rng.uniform_u64(hi - lo));
        if (candidate == anchor) continue;
        if (targets.is_positive(anchor, candidate)) continue;
        return candidate;
    }
}

void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& moments,
               std::uint64_t step, double lr, double beta1, double beta2, double eps,
               const std::string& what) {
    if (param.size() != grad.size()) throw BoundsError("adam_step: shape mismatch for " + what);
    moments.ensure_size(param.size());
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        if (!std::isfinite(g)) {
            throw NumericError("non-finite gradient in " + what + " at index " +
                               std::to_string(i));
        }
        moments.m[i] = beta1 * moments.m[i] + (1.0 - beta1) * g;
        moments.v[i] = beta2 * moments.v[i] + (1.0 - beta2) * g * g;
        const double m_hat = moments.m[i] / c1;
        const double v_hat = moments.v[i] / c2;
        param[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
}

TrainState init_train_state(std::size_t size, const TrainConfig& cfg) {
    TrainState state;
    state.base = init_embeddings(size, cfg.d, seed_for(cfg.seed, SeedStream::BaseInit));
    if (cfg.variant != Variant::Inner) {
        state.scorer = init_scorer(cfg.d, cfg.k, seed_for(cfg.seed, SeedStream::ScorerInit));
        if (cfg.separate_heads) {
            state.scorer_attr =
                init_scorer(cfg.d, cfg.k, seed_for(cfg.seed, SeedStream::ScorerInitAttr));
        }
    }
    return state;
}

namespace {

const ScorerParams& head_for(const TrainState& state, std::uint32_t a, std::uint32_t b,
                             std::size_t n, bool separate) {
    if (separate && involves_attribute(a, b, n) && state.scorer_attr) return *state.scorer_attr;
    return *state.scorer;
}

void apply_adam_scorer(ScorerParams& params, const ScorerGrads& grads, ScorerMoments& moments,
                       std::uint64_t step, double lr, const std::string& prefix) {
    adam_step(params.w1.data(), grads.w1.data(), moments.w1, step, lr, 0.9, 0.999, 1e-8,
              prefix + ".w1");
    adam_step(params.b1, grads.b1, moments.b1, step, lr, 0.9, 0.999, 1e-8, prefix + ".b1");
    adam_step(params.w2.data(), grads.w2.data(), moments.w2, step, lr, 0.9, 0.999, 1e-8,
              prefix + ".w2");
    adam_step(params.b2, grads.b2, moments.b2, step, lr, 0.9, 0.999, 1e-8, prefix + ".b2");
    adam_step(params.w3, grads.w3, moments.w3, step, lr, 0.9, 0.999, 1e-8, prefix + ".w3");
    double b3[1] = {params.b3};
    const double gb3[1] = {grads.b3};
    adam_step(b3, gb3, moments.b3, step, lr, 0.9, 0.999, 1e-8, prefix + ".b3");
    params.b3 = b3[0];
}

// Dot-product gradient for the inner variant; handles anchor == target.
void inner_backward(const LayerStack& stack, std::uint32_t a, std::uint32_t b, double upstream,
                    std::vector<DenseMatrix>& grad_layers) {
    const auto ha = stack.last().row(a);
    const auto hb = stack.last().row(b);
    auto ga = grad_layers[stack.depth].row(a);
    auto gb = grad_layers[stack.depth].row(b);
    for (std::size_t c = 0; c < ha.size(); ++c) {
        const double va = ha[c];
        const double vb = hb[c];
        ga[c] += upstream * vb;
        gb[c] += upstream * va;
    }
}

}  // namespace

EpochStats run_epoch(TrainState& state, const BinaryTargets& targets,
                     const AugmentedOperator& op, const TrainConfig& cfg,
                     std::size_t epoch_index) {
    const std::size_t n = targets.n;
    const bool node_only_pairs = cfg.variant == Variant::Gcn || cfg.variant == Variant::Ncoll;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> positives;
    for (std::uint32_t a = 0; a < targets.size(); ++a) {
        for (const std::uint32_t b : targets.neighbors(a)) {
            if (node_only_pairs && involves_attribute(a, b, n)) continue;
            positives.push_back({a, b});
        }
    }
    EpochStats stats;
    stats.pairs = positives.size();
    if (positives.empty()) return stats;

    Rng shuffle_rng(seed_for(cfg.seed, SeedStream::EpochShuffle, epoch_index));
    shuffle_rng.shuffle(positives);
    Rng neg_rng(seed_for(cfg.seed, SeedStream::Negatives, epoch_index));

    const auto size = static_cast<std::uint32_t>(targets.size());
    const auto n32 = static_cast<std::uint32_t>(n);
    const std::size_t q_negs = cfg.negatives_per_positive;

    double total_loss = 0.0;
    std::vector<double> neg_logits(q_negs);
    std::vector<std::uint32_t> neg_ids(q_negs);
    std::vector<ScorerCache> neg_caches(q_negs);
    std::vector<double> dnegs;
    ScorerCache pos_cache;

    for (std::size_t start = 0; start < positives.size(); start += cfg.batch_size) {
        const std::size_t stop = std::min(start + cfg.batch_size, positives.size());
        const LayerStack stack = propagate_forward(op, state.base, cfg.k);

        std::vector<DenseMatrix> grad_layers(cfg.k + 1, DenseMatrix(targets.size(), cfg.d));
        ScorerGrads shared_grads, attr_grads;
        if (state.scorer) shared_grads = ScorerGrads::zeros_like(*state.scorer);
        if (state.scorer_attr) attr_grads = ScorerGrads::zeros_like(*state.scorer_attr);

        for (std::size_t idx = start; idx < stop; ++idx) {
            const auto [anchor, target] = positives[idx];
            std::uint32_t lo = 0, hi = size;
            if (cfg.variant == Variant::Gcn) {
                hi = n32;  // Eq. 2 reduction contrasts over nodes only
            } else if (cfg.same_type_negatives) {
                if (target < n32) {
                    hi = n32;
                } else {
                    lo = n32;
                }
            }
            for (std::size_t q = 0; q < q_negs; ++q) {
                neg_ids[q] = sample_negative(anchor, targets, neg_rng, lo, hi);
            }

            double pos_logit;
            if (cfg.variant == Variant::Inner) {
                pos_logit = dot(stack.last().row(anchor), stack.last().row(target));
                for (std::size_t q = 0; q < q_negs; ++q) {
                    neg_logits[q] = dot(stack.last().row(anchor), stack.last().row(neg_ids[q]));
                }
            } else {
                const ScorerParams& head_pos =
                    head_for(state, anchor, target, n, cfg.separate_heads);
                pos_logit =
                    score_cached(head_pos, cross_features(stack, anchor, target), pos_cache);
                for (std::size_t q = 0; q < q_negs; ++q) {
                    const ScorerParams& head_neg =
                        head_for(state, anchor, neg_ids[q], n, cfg.separate_heads);
                    neg_logits[q] = score_cached(
                        head_neg, cross_features(stack, anchor, neg_ids[q]), neg_caches[q]);
                }
            }

            double dpos = 0.0;
            const double loss = pair_loss(pos_logit, neg_logits, dpos, dnegs);
            if (!std::isfinite(loss)) {
                throw NumericError("non-finite pair loss at epoch " +
                                   std::to_string(epoch_index));
            }
            total_loss += loss;

            if (cfg.variant == Variant::Inner) {
                inner_backward(stack, anchor, target, dpos, grad_layers);
                for (std::size_t q = 0; q < q_negs; ++q) {
                    inner_backward(stack, anchor, neg_ids[q], dnegs[q], grad_layers);
                }
            } else {
                const ScorerParams& head_pos =
                    head_for(state, anchor, target, n, cfg.separate_heads);
                ScorerGrads& pos_sink =
                    (cfg.separate_heads && involves_attribute(anchor, target, n))
                        ? attr_grads
                        : shared_grads;
                const std::vector<double> dfeat =
                    scorer_backward(head_pos, pos_cache, dpos, pos_sink);
                cross_features_backward(stack, anchor, target, dfeat, grad_layers);
                for (std::size_t q = 0; q < q_negs; ++q) {
                    const ScorerParams& head_neg =
                        head_for(state, anchor, neg_ids[q], n, cfg.separate_heads);
                    ScorerGrads& neg_sink =
                        (cfg.separate_heads && involves_attribute(anchor, neg_ids[q], n))
                            ? attr_grads
                            : shared_grads;
                    const std::vector<double> dfeat_neg =
                        scorer_backward(head_neg, neg_caches[q], dnegs[q], neg_sink);
                    cross_features_backward(stack, anchor, neg_ids[q], dfeat_neg, grad_layers);
                }
            }
        }

        const DenseMatrix base_grad = propagate_backward(op, grad_layers);
        state.step += 1;
        adam_step(state.base.data(), base_grad.data(), state.base_moments, state.step, cfg.lr,
                  0.9, 0.999, 1e-8, "base_embeddings");
        if (state.scorer) {
            apply_adam_scorer(*state.scorer, shared_grads, state.scorer_moments, state.step,
                              cfg.lr, "scorer");
        }
        if (state.scorer_attr) {
            apply_adam_scorer(*state.scorer_attr, attr_grads, state.scorer_attr_moments,
                              state.step, cfg.lr, "scorer_attr");
        }
    }

    stats.mean_loss = total_loss / static_cast<double>(positives.size());
    return stats;
}

double pair_logit(const TrainState& state, const LayerStack& stack, std::uint32_t anchor,
                  std::uint32_t target, std::size_t n, const TrainConfig& cfg) {
    if (cfg.variant == Variant::Inner) {
        return dot(stack.last().row(anchor), stack.last().row(target));
    }
    const ScorerParams& head = head_for(state, anchor, target, n, cfg.separate_heads);
    return score(head, cross_features(stack, anchor, target));
}

double lp_pair_score(const TrainState& state, const LayerStack& stack, std::uint32_t a,
                     std::uint32_t b, const TrainConfig& cfg) {
    if (cfg.variant == Variant::Inner) {
        return dot(stack.last().row(a), stack.last().row(b));
    }
    return score_pair_symmetric(*state.scorer, stack, a, b);
}

TrainResult train_on_split(EdgeSplit split, const TrainConfig& cfg) {
    cfg.validate();
    const AttributedGraph& train_graph = split.train_graph;
    const CsrMatrix features = topn_sparsify(train_graph.features, cfg.topn);
    const double alpha_eff = cfg.variant == Variant::Gcn ? 1.0 : cfg.alpha;

    TrainResult result;
    result.op = build_transition(train_graph.adjacency, features, alpha_eff);
    result.targets = build_binary_targets(train_graph.adjacency, features);
    result.split = std::move(split);

    TrainState state = init_train_state(result.op.size(), cfg);
    TrainState best = state;
    std::vector<EpochMetrics> history;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        const EpochStats stats = run_epoch(state, result.targets, result.op, cfg, epoch);

        const LayerStack stack = propagate_forward(result.op, state.base, cfg.k);
        std::vector<double> pos_scores, neg_scores;
        pos_scores.reserve(result.split.val_pos.size());
        neg_scores.reserve(result.split.val_neg.size());
        for (const auto& [u, v] : result.split.val_pos) {
            pos_scores.push_back(lp_pair_score(state, stack, u, v, cfg));
        }
        for (const auto& [u, v] : result.split.val_neg) {
            neg_scores.push_back(lp_pair_score(state, stack, u, v, cfg));
        }
        const double val_auc = auc_score(pos_scores, neg_scores);
        const double val_ap = average_precision(pos_scores, neg_scores);
        const auto t1 = std::chrono::steady_clock::now();
        const double seconds = std::chrono::duration<double>(t1 - t0).count();
        history.push_back({epoch, stats.mean_loss, val_auc, val_ap, seconds});

        if (val_ap > state.best_val_ap) {
            state.best_val_ap = val_ap;
            state.epochs_since_best = 0;
            best = state;
        } else {
            state.epochs_since_best += 1;
        }
        if (state.epochs_since_best >= cfg.patience) break;
    }

    result.state = std::move(best);
    result.history = std::move(history);
    result.stack = propagate_forward(result.op, result.state.base, cfg.k);
    return result;
}

TrainResult train(const AttributedGraph& graph, const TrainConfig& cfg) {
    cfg.validate();
    EdgeSplit split =
        split_edges(graph, cfg.train_frac, cfg.test_frac, cfg.val_frac, cfg.seed);
    return train_on_split(std::move(split), cfg);
}

}  // namespace cane
