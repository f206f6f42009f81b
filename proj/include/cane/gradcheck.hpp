#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cane {

struct GradCheckOptions {
    std::size_t instances = 20;
    std::uint64_t seed = 1;
    std::size_t max_n = 12;
    std::size_t max_m = 5;
    std::size_t max_d = 6;
    std::size_t max_k = 2;
    double threshold = 1e-4;
    // Harness self-test: negate the analytic scorer gradients so the check
    // must fail.
    bool negate_scorer_grad = false;
};

struct GradCheckCase {
    std::string name;
    double max_rel_err = 0.0;
    double threshold = 0.0;
    bool pass = true;
};

struct GradCheckReport {
    std::vector<GradCheckCase> cases;

    bool all_pass() const;
    double worst() const;
    // Name of the case with the largest relative error.
    std::string worst_name() const;
};

// Central finite-difference verification of every backward path: the
// propagation adjoint, the scorer, the pair loss, and the composite
// minibatch loss gradient w.r.t. the base embeddings and all MLP tensors.
// Instances are drawn at differentiable points (pre-activations bounded away
// from the ReLU kink) so the finite-difference oracle is valid.
GradCheckReport run_gradcheck(const GradCheckOptions& options);

}  // namespace cane
