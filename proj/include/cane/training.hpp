#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cane/augment.hpp"
#include "cane/graph.hpp"
#include "cane/propagate.hpp"
#include "cane/rng.hpp"
#include "cane/scorer.hpp"

namespace cane {

enum class Variant { Full, Gcn, Inner, Ncoll };

Variant variant_from_string(const std::string& name);
std::string to_string(Variant variant);

struct TrainConfig;
// One-line "key=value ..." rendering of the resolved configuration.
std::string config_summary(const TrainConfig& cfg);

struct TrainConfig {
    std::size_t d = 128;
    std::size_t k = 2;
    double alpha = 0.8;  // 0.2 is the classification default, 0.8 link prediction
    std::size_t topn = 50;
    double lr = 0.01;
    std::size_t epochs = 100;
    std::size_t patience = 20;
    std::size_t negatives_per_positive = 5;
    std::size_t batch_size = 1024;
    std::uint64_t seed = 1;
    Variant variant = Variant::Full;
    double train_frac = 0.85;
    double test_frac = 0.10;
    double val_frac = 0.05;
    // Restrict sampled negatives to the entity type of the positive target.
    bool same_type_negatives = false;
    // Use one MLP head for node-node pairs and another for pairs touching an
    // attribute, instead of a single shared head.
    bool separate_heads = false;

    void validate() const;
};

// Logistic negative-sampling surrogate of the collaborative softmax:
// loss = -log sigmoid(pos) - sum_i log sigmoid(-neg_i), overflow-safe.
// Fills the analytic derivatives w.r.t. every logit.
double pair_loss(double pos_logit, std::span<const double> neg_logits, double& dpos,
                 std::vector<double>& dnegs);

// Uniform draw from [lo, hi) excluding the anchor and its positive row;
// rejection sampling. Throws SamplingError when no candidate exists.
std::uint32_t sample_negative(std::uint32_t anchor, const BinaryTargets& targets, Rng& rng,
                              std::uint32_t lo, std::uint32_t hi);

struct AdamMoments {
    std::vector<double> m;
    std::vector<double> v;

    void ensure_size(std::size_t size) {
        if (m.size() != size) {
            m.assign(size, 0.0);
            v.assign(size, 0.0);
        }
    }
};

// Standard bias-corrected Adam update, in place. `step` is 1-based. Throws
// NumericError naming `what` if the gradient is not finite.
void adam_step(std::span<double> param, std::span<const double> grad, AdamMoments& moments,
               std::uint64_t step, double lr, double beta1 = 0.9, double beta2 = 0.999,
               double eps = 1e-8, const std::string& what = "parameter");

struct ScorerMoments {
    AdamMoments w1, b1, w2, b2, w3, b3;
};

struct TrainState {
    DenseMatrix base;  // trainable H^(0)
    std::optional<ScorerParams> scorer;       // absent for the inner variant
    std::optional<ScorerParams> scorer_attr;  // present only with separate heads
    AdamMoments base_moments;
    ScorerMoments scorer_moments;
    ScorerMoments scorer_attr_moments;
    std::uint64_t step = 0;
    double best_val_ap = -1.0;
    std::size_t epochs_since_best = 0;
};

TrainState init_train_state(std::size_t size, const TrainConfig& cfg);

struct EpochStats {
    double mean_loss = 0.0;
    std::size_t pairs = 0;
};

// One pass over every positive pair of the targets (shuffled), with one Adam
// step per minibatch on the summed minibatch loss. The gcn and ncoll variants
// keep node-node pairs only; gcn additionally samples negatives from nodes
// only.
EpochStats run_epoch(TrainState& state, const BinaryTargets& targets,
                     const AugmentedOperator& op, const TrainConfig& cfg,
                     std::size_t epoch_index);

// Directed logit for one ordered pair under the current parameters. `n` is
// the node count separating node ids from attribute ids.
double pair_logit(const TrainState& state, const LayerStack& stack, std::uint32_t anchor,
                  std::uint32_t target, std::size_t n, const TrainConfig& cfg);

// Order-free link-prediction score: mean of the two directed logits, or the
// final-layer dot product for the inner variant.
double lp_pair_score(const TrainState& state, const LayerStack& stack, std::uint32_t a,
                     std::uint32_t b, const TrainConfig& cfg);

struct EpochMetrics {
    std::size_t epoch = 0;
    double loss = 0.0;
    double val_auc = 0.0;
    double val_ap = 0.0;
    double seconds = 0.0;
};

struct TrainResult {
    TrainState state;  // parameters of the best validation epoch
    std::vector<EpochMetrics> history;
    EdgeSplit split;
    AugmentedOperator op;
    BinaryTargets targets;
    LayerStack stack;  // forward pass of the returned parameters
};

// Full pipeline: split, sparsify, build operators, loop epochs with early
// stopping on validation AP, return the best snapshot.
TrainResult train(const AttributedGraph& graph, const TrainConfig& cfg);

// Same, but on a caller-provided split (used by the robustness sweep).
TrainResult train_on_split(EdgeSplit split, const TrainConfig& cfg);

}  // namespace cane
