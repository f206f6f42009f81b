#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cane/matrix.hpp"
#include "cane/propagate.hpp"

namespace cane {

// Three-layer MLP over the cross-correlation features of a pair. Hidden
// widths are d; the output is a raw logit.
struct ScorerParams {
    DenseMatrix w1;           // d x (K+1)^2 d
    std::vector<double> b1;   // d
    DenseMatrix w2;           // d x d
    std::vector<double> b2;   // d
    std::vector<double> w3;   // d
    double b3 = 0.0;

    std::size_t input_dim() const { return w1.cols(); }
    std::size_t hidden_dim() const { return w1.rows(); }
};

// Xavier-uniform weights, zero biases.
ScorerParams init_scorer(std::size_t d, std::size_t depth, std::uint64_t seed);

// Concatenated elementwise products h_a^(k) * h_b^(i), blocks ordered (k, i)
// lexicographically; length (K+1)^2 d.
std::vector<double> cross_features(const LayerStack& stack, std::uint32_t a, std::uint32_t b);

double score(const ScorerParams& params, std::span<const double> features);

// Forward pass that keeps the intermediates needed by the backward pass.
struct ScorerCache {
    std::vector<double> input;
    std::vector<double> pre1, act1;
    std::vector<double> pre2, act2;
};

double score_cached(const ScorerParams& params, std::vector<double> features,
                    ScorerCache& cache);

struct ScorerGrads {
    DenseMatrix w1;
    std::vector<double> b1;
    DenseMatrix w2;
    std::vector<double> b2;
    std::vector<double> w3;
    double b3 = 0.0;

    static ScorerGrads zeros_like(const ScorerParams& params);
};

// Accumulates d(logit)/d(params) scaled by `upstream` into `grads` and
// returns the gradient w.r.t. the input features. ReLU subgradient at 0 is 0.
std::vector<double> scorer_backward(const ScorerParams& params, const ScorerCache& cache,
                                    double upstream, ScorerGrads& grads);

// Scatters a cross-feature gradient back into the per-layer entity rows:
// block (k, i) feeds rows a@layer k and b@layer i.
void cross_features_backward(const LayerStack& stack, std::uint32_t a, std::uint32_t b,
                             std::span<const double> dfeatures,
                             std::vector<DenseMatrix>& grad_layers);

// Order-free pair score used by link-prediction evaluation.
double score_pair_symmetric(const ScorerParams& params, const LayerStack& stack,
                            std::uint32_t a, std::uint32_t b);

}  // namespace cane
