#pragma once

#include <cstdint>
#include <vector>

#include "cane/augment.hpp"
#include "cane/matrix.hpp"

namespace cane {

// Trainable base embeddings, entries i.i.d. uniform in [-0.5/d, 0.5/d].
DenseMatrix init_embeddings(std::size_t size, std::size_t d, std::uint64_t seed);

// The base matrix plus every propagated layer: layers[k] = P~ * layers[k-1].
struct LayerStack {
    std::size_t d = 0;
    std::size_t depth = 0;  // K; layers has K+1 entries
    std::vector<DenseMatrix> layers;

    const DenseMatrix& layer(std::size_t k) const { return layers[k]; }
    const DenseMatrix& last() const { return layers.back(); }
};

LayerStack propagate_forward(const AugmentedOperator& op, const DenseMatrix& base,
                             std::size_t depth);

// Adjoint of the forward map: given dL/d(layers[k]) for k = 0..K, returns
// dL/d(base) = sum_k (P~^T)^k grad_layers[k], accumulated Horner style.
DenseMatrix propagate_backward(const AugmentedOperator& op,
                               const std::vector<DenseMatrix>& grad_layers);

}  // namespace cane
