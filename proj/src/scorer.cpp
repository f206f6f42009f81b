#include "cane/scorer.hpp"

#include <cmath>

#include "cane/error.hpp"
#include "cane/rng.hpp"

namespace cane {

namespace {

void fill_xavier(DenseMatrix& w, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
    for (double& x : w.data()) x = rng.uniform(-bound, bound);
}

}  // namespace

ScorerParams init_scorer(std::size_t d, std::size_t depth, std::uint64_t seed) {
    if (d == 0) throw ConfigError("scorer dimension must be >= 1");
    const std::size_t width = (depth + 1) * (depth + 1) * d;
    Rng rng(seed);
    ScorerParams p;
    p.w1 = DenseMatrix(d, width);
    fill_xavier(p.w1, rng);
    p.b1.assign(d, 0.0);
    p.w2 = DenseMatrix(d, d);
    fill_xavier(p.w2, rng);
    p.b2.assign(d, 0.0);
    p.w3.assign(d, 0.0);
    {
        const double bound = std::sqrt(6.0 / static_cast<double>(d + 1));
        for (double& x : p.w3) x = rng.uniform(-bound, bound);
    }
    p.b3 = 0.0;
    return p;
}

std::vector<double> cross_features(const LayerStack& stack, std::uint32_t a, std::uint32_t b) {
    const std::size_t rows = stack.layers.front().rows();
    if (a >= rows || b >= rows) throw BoundsError("cross_features: entity id out of range");
    const std::size_t d = stack.d;
    const std::size_t blocks = stack.depth + 1;
    std::vector<double> features(blocks * blocks * d);
    std::size_t offset = 0;
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto ha = stack.layers[k].row(a);
        for (std::size_t i = 0; i < blocks; ++i) {
            const auto hb = stack.layers[i].row(b);
            for (std::size_t c = 0; c < d; ++c) features[offset + c] = ha[c] * hb[c];
            offset += d;
        }
    }
    return features;
}

double score(const ScorerParams& params, std::span<const double> features) {
    ScorerCache scratch;
    return score_cached(params, std::vector<double>(features.begin(), features.end()), scratch);
}

double score_cached(const ScorerParams& params, std::vector<double> features,
                    ScorerCache& cache) {
    if (features.size() != params.input_dim()) {
        throw BoundsError("scorer input width " + std::to_string(features.size()) +
                          " does not match W1 (" + std::to_string(params.input_dim()) + ")");
    }
    const std::size_t d = params.hidden_dim();
    cache.input = std::move(features);
    cache.pre1.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = params.b1[i];
        const auto w_row = params.w1.row(i);
        for (std::size_t j = 0; j < w_row.size(); ++j) acc += w_row[j] * cache.input[j];
        cache.pre1[i] = acc;
    }
    cache.act1.resize(d);
    for (std::size_t i = 0; i < d; ++i) cache.act1[i] = cache.pre1[i] > 0.0 ? cache.pre1[i] : 0.0;

    cache.pre2.assign(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double acc = params.b2[i];
        const auto w_row = params.w2.row(i);
        for (std::size_t j = 0; j < d; ++j) acc += w_row[j] * cache.act1[j];
        cache.pre2[i] = acc;
    }
    cache.act2.resize(d);
    for (std::size_t i = 0; i < d; ++i) cache.act2[i] = cache.pre2[i] > 0.0 ? cache.pre2[i] : 0.0;

    double out = params.b3;
    for (std::size_t i = 0; i < d; ++i) out += params.w3[i] * cache.act2[i];
    return out;
}

ScorerGrads ScorerGrads::zeros_like(const ScorerParams& params) {
    ScorerGrads g;
    g.w1 = DenseMatrix(params.w1.rows(), params.w1.cols());
    g.b1.assign(params.b1.size(), 0.0);
    g.w2 = DenseMatrix(params.w2.rows(), params.w2.cols());
    g.b2.assign(params.b2.size(), 0.0);
    g.w3.assign(params.w3.size(), 0.0);
    g.b3 = 0.0;
    return g;
}

std::vector<double> scorer_backward(const ScorerParams& params, const ScorerCache& cache,
                                    double upstream, ScorerGrads& grads) {
    const std::size_t d = params.hidden_dim();

    std::vector<double> d_act2(d);
    for (std::size_t i = 0; i < d; ++i) {
        grads.w3[i] += upstream * cache.act2[i];
        d_act2[i] = upstream * params.w3[i];
    }
    grads.b3 += upstream;

    std::vector<double> d_pre2(d);
    for (std::size_t i = 0; i < d; ++i) d_pre2[i] = cache.pre2[i] > 0.0 ? d_act2[i] : 0.0;

    std::vector<double> d_act1(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        grads.b2[i] += d_pre2[i];
        auto gw_row = grads.w2.row(i);
        const auto w_row = params.w2.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            gw_row[j] += d_pre2[i] * cache.act1[j];
            d_act1[j] += d_pre2[i] * w_row[j];
        }
    }

    std::vector<double> d_pre1(d);
    for (std::size_t i = 0; i < d; ++i) d_pre1[i] = cache.pre1[i] > 0.0 ? d_act1[i] : 0.0;

    std::vector<double> d_input(params.input_dim(), 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        grads.b1[i] += d_pre1[i];
        auto gw_row = grads.w1.row(i);
        const auto w_row = params.w1.row(i);
        for (std::size_t j = 0; j < w_row.size(); ++j) {
            gw_row[j] += d_pre1[i] * cache.input[j];
            d_input[j] += d_pre1[i] * w_row[j];
        }
    }
    return d_input;
}

void cross_features_backward(const LayerStack& stack, std::uint32_t a, std::uint32_t b,
                             std::span<const double> dfeatures,
                             std::vector<DenseMatrix>& grad_layers) {
    const std::size_t d = stack.d;
    const std::size_t blocks = stack.depth + 1;
    if (dfeatures.size() != blocks * blocks * d) {
        throw BoundsError("cross_features_backward: gradient width mismatch");
    }
    std::size_t offset = 0;
    for (std::size_t k = 0; k < blocks; ++k) {
        const auto ha = stack.layers[k].row(a);
        for (std::size_t i = 0; i < blocks; ++i) {
            const auto hb = stack.layers[i].row(b);
            auto ga = grad_layers[k].row(a);
            auto gb = grad_layers[i].row(b);
            for (std::size_t c = 0; c < d; ++c) {
                const double df = dfeatures[offset + c];
                ga[c] += df * hb[c];
                gb[c] += df * ha[c];
            }
            offset += d;
        }
    }
}

double score_pair_symmetric(const ScorerParams& params, const LayerStack& stack,
                            std::uint32_t a, std::uint32_t b) {
    const double forward = score(params, cross_features(stack, a, b));
    const double reverse = score(params, cross_features(stack, b, a));
    return 0.5 * (forward + reverse);
}

}  // namespace cane
