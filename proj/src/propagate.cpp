#include "cane/propagate.hpp"

#include "cane/error.hpp"
#include "cane/rng.hpp"

namespace cane {

DenseMatrix init_embeddings(std::size_t size, std::size_t d, std::uint64_t seed) {
    if (d == 0) throw ConfigError("embedding dimension must be >= 1");
    DenseMatrix base(size, d);
    Rng rng(seed);
    const double scale = 0.5 / static_cast<double>(d);
    for (double& x : base.data()) x = rng.uniform(-scale, scale);
    return base;
}

LayerStack propagate_forward(const AugmentedOperator& op, const DenseMatrix& base,
                             std::size_t depth) {
    if (base.rows() != op.size()) {
        throw BoundsError("propagate_forward: base has " + std::to_string(base.rows()) +
                          " rows, operator expects " + std::to_string(op.size()));
    }
    LayerStack stack;
    stack.d = base.cols();
    stack.depth = depth;
    stack.layers.reserve(depth + 1);
    stack.layers.push_back(base);
    for (std::size_t k = 1; k <= depth; ++k) {
        stack.layers.push_back(spmm(op.transition, stack.layers.back()));
    }
    return stack;
}

DenseMatrix propagate_backward(const AugmentedOperator& op,
                               const std::vector<DenseMatrix>& grad_layers) {
    if (grad_layers.empty()) throw BoundsError("propagate_backward: no gradient layers");
    for (const auto& g : grad_layers) {
        if (g.rows() != op.size() || g.cols() != grad_layers.front().cols()) {
            throw BoundsError("propagate_backward: gradient shape mismatch");
        }
    }
    DenseMatrix acc = grad_layers.back();
    for (std::size_t k = grad_layers.size() - 1; k-- > 0;) {
        DenseMatrix pulled = spmm(op.transition_t, acc);
        const auto& g = grad_layers[k];
        for (std::size_t i = 0; i < pulled.size(); ++i) pulled.data()[i] += g.data()[i];
        acc = std::move(pulled);
    }
    return acc;
}

}  // namespace cane
