#include "cane/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "cane/augment.hpp"
#include "cane/error.hpp"
#include "cane/graph.hpp"
#include "cane/propagate.hpp"
#include "cane/rng.hpp"
#include "cane/scorer.hpp"
#include "cane/training.hpp"

namespace cane {

namespace {

double rel_err(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    return std::abs(analytic - numeric) / denom;
}

struct CaseTracker {
    std::vector<GradCheckCase>* cases;
    double threshold;

    void record(const std::string& name, double err) {
        for (auto& c : *cases) {
            if (c.name == name) {
                c.max_rel_err = std::max(c.max_rel_err, err);
                c.pass = c.max_rel_err < c.threshold;
                return;
            }
        }
        cases->push_back({name, err, threshold, err < threshold});
    }
};

AttributedGraph random_small_graph(Rng& rng, std::size_t max_n, std::size_t max_m) {
    const std::size_t n = 4 + rng.uniform_u64(max_n - 3);
    const std::size_t m = 1 + rng.uniform_u64(max_m);
    std::vector<NodePair> edges;
    for (std::uint32_t u = 0; u < n; ++u) {
        for (std::uint32_t v = u + 1; v < n; ++v) {
            if (rng.uniform() < 0.35) edges.push_back({u, v});
        }
    }
    if (edges.empty()) edges.push_back({0, 1});
    std::vector<Triplet> feats;
    for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t j = 0; j < m; ++j) {
            if (rng.uniform() < 0.6) feats.push_back({v, j, rng.uniform(-1.0, 1.0)});
        }
    }
    return make_graph(n, m, edges, feats);
}

void randomize(DenseMatrix& mat, Rng& rng, double scale) {
    for (double& x : mat.data()) x = rng.uniform(-scale, scale);
}

std::vector<std::pair<std::string, std::span<double>>> scorer_views(ScorerParams& p) {
    return {{"w1", p.w1.data()}, {"b1", p.b1},          {"w2", p.w2.data()},
            {"b2", p.b2},        {"w3", p.w3},          {"b3", {&p.b3, 1}}};
}

std::vector<std::pair<std::string, std::span<const double>>> grad_views(const ScorerGrads& g) {
    return {{"w1", g.w1.data()}, {"b1", g.b1},          {"w2", g.w2.data()},
            {"b2", g.b2},        {"w3", g.w3},          {"b3", {&g.b3, 1}}};
}

// --- Suite 1: propagation adjoint -----------------------------------------

void check_propagate(Rng& rng, const GradCheckOptions& opt, CaseTracker& track) {
    const AttributedGraph g = random_small_graph(rng, opt.max_n, opt.max_m);
    const double alpha = rng.uniform();
    const AugmentedOperator op = build_transition(g.adjacency, g.features, alpha);
    const std::size_t d = 2 + rng.uniform_u64(opt.max_d - 1);
    const std::size_t depth = rng.uniform_u64(opt.max_k + 1);

    DenseMatrix base(op.size(), d);
    randomize(base, rng, 1.0);
    std::vector<DenseMatrix> probes(depth + 1, DenseMatrix(op.size(), d));
    for (auto& p : probes) randomize(p, rng, 1.0);

    const auto objective = [&](const DenseMatrix& h0) {
        const LayerStack stack = propagate_forward(op, h0, depth);
        double acc = 0.0;
        for (std::size_t k = 0; k <= depth; ++k) {
            for (std::size_t i = 0; i < stack.layers[k].size(); ++i) {
                acc += probes[k].data()[i] * stack.layers[k].data()[i];
            }
        }
        return acc;
    };

    const DenseMatrix analytic = propagate_backward(op, probes);
    const double h = 1e-5;
    DenseMatrix shifted = base;
    for (std::size_t i = 0; i < base.size(); ++i) {
        shifted.data()[i] = base.data()[i] + h;
        const double up = objective(shifted);
        shifted.data()[i] = base.data()[i] - h;
        const double down = objective(shifted);
        shifted.data()[i] = base.data()[i];
        track.record("propagate.base", rel_err(analytic.data()[i], (up - down) / (2 * h)));
    }
}

// --- Suite 2: scorer -------------------------------------------------------

void check_scorer(Rng& rng, const GradCheckOptions& opt, CaseTracker& track) {
    const std::size_t d = 2 + rng.uniform_u64(opt.max_d - 1);
    const std::size_t depth = rng.uniform_u64(opt.max_k + 1);
    ScorerParams params = init_scorer(d, depth, rng.next());
    for (double& b : params.b1) b = rng.uniform(-0.2, 0.2);
    for (double& b : params.b2) b = rng.uniform(-0.2, 0.2);
    params.b3 = rng.uniform(-0.2, 0.2);

    std::vector<double> features(params.input_dim());
    ScorerCache cache;
    // Redraw until the instance sits away from every ReLU kink; the
    // finite-difference oracle is only valid at differentiable points.
    for (int attempt = 0;; ++attempt) {
        for (double& f : features) f = rng.uniform(-1.0, 1.0);
        score_cached(params, features, cache);
        double min_pre = std::numeric_limits<double>::infinity();
        for (const double p : cache.pre1) min_pre = std::min(min_pre, std::abs(p));
        for (const double p : cache.pre2) min_pre = std::min(min_pre, std::abs(p));
        if (min_pre > 1e-4 || attempt > 50) break;
    }

    ScorerGrads grads = ScorerGrads::zeros_like(params);
    std::vector<double> dfeat = scorer_backward(params, cache, 1.0, grads);
    if (opt.negate_scorer_grad) {
        for (double& x : grads.w1.data()) x = -x;
        for (double& x : grads.b1) x = -x;
        for (double& x : grads.w2.data()) x = -x;
        for (double& x : grads.b2) x = -x;
        for (double& x : grads.w3) x = -x;
        grads.b3 = -grads.b3;
        for (double& x : dfeat) x = -x;
    }

    const double h = 1e-6;
    const auto views = scorer_views(params);
    const auto gviews = grad_views(grads);
    for (std::size_t t = 0; t < views.size(); ++t) {
        auto span = views[t].second;
        for (std::size_t i = 0; i < span.size(); ++i) {
            const double keep = span[i];
            span[i] = keep + h;
            const double up = score(params, features);
            span[i] = keep - h;
            const double down = score(params, features);
            span[i] = keep;
            track.record("scorer." + views[t].first,
                         rel_err(gviews[t].second[i], (up - down) / (2 * h)));
        }
    }
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double keep = features[i];
        features[i] = keep + h;
        const double up = score(params, features);
        features[i] = keep - h;
        const double down = score(params, features);
        features[i] = keep;
        track.record("scorer.features", rel_err(dfeat[i], (up - down) / (2 * h)));
    }
}

// --- Suite 3: pair loss ----------------------------------------------------

void check_pair_loss(Rng& rng, CaseTracker& track) {
    const std::size_t q = 1 + rng.uniform_u64(5);
    double pos = rng.uniform(-3.0, 3.0);
    std::vector<double> negs(q);
    for (double& x : negs) x = rng.uniform(-3.0, 3.0);

    double dpos = 0.0;
    std::vector<double> dnegs;
    pair_loss(pos, negs, dpos, dnegs);

    const double h = 1e-6;
    double unused;
    std::vector<double> scratch;
    const double up_pos = pair_loss(pos + h, negs, unused, scratch);
    const double down_pos = pair_loss(pos - h, negs, unused, scratch);
    track.record("pair_loss.pos", rel_err(dpos, (up_pos - down_pos) / (2 * h)));
    for (std::size_t i = 0; i < q; ++i) {
        const double keep = negs[i];
        negs[i] = keep + h;
        const double up = pair_loss(pos, negs, unused, scratch);
        negs[i] = keep - h;
        const double down = pair_loss(pos, negs, unused, scratch);
        negs[i] = keep;
        track.record("pair_loss.neg", rel_err(dnegs[i], (up - down) / (2 * h)));
    }
}

// --- Suite 4: composite minibatch loss --------------------------------------

struct CompositeInstance {
    AugmentedOperator op;
    BinaryTargets targets;
    std::size_t depth = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> positives;
    std::vector<std::vector<std::uint32_t>> negatives;  // frozen per positive
};

double composite_loss(const CompositeInstance& inst, const DenseMatrix& base,
                      const ScorerParams& scorer, double* min_preact = nullptr) {
    const LayerStack stack = propagate_forward(inst.op, base, inst.depth);
    double total = 0.0;
    ScorerCache cache;
    std::vector<double> neg_logits;
    std::vector<double> dnegs;
    double dpos;
    for (std::size_t p = 0; p < inst.positives.size(); ++p) {
        const auto [anchor, target] = inst.positives[p];
        const auto note_preacts = [&]() {
            if (!min_preact) return;
            for (const double x : cache.pre1) *min_preact = std::min(*min_preact, std::abs(x));
            for (const double x : cache.pre2) *min_preact = std::min(*min_preact, std::abs(x));
        };
        const double pos_logit =
            score_cached(scorer, cross_features(stack, anchor, target), cache);
        note_preacts();
        neg_logits.clear();
        for (const std::uint32_t neg : inst.negatives[p]) {
            neg_logits.push_back(score_cached(scorer, cross_features(stack, anchor, neg), cache));
            note_preacts();
        }
        total += pair_loss(pos_logit, neg_logits, dpos, dnegs);
    }
    return total;
}

void composite_grads(const CompositeInstance& inst, const DenseMatrix& base,
                     const ScorerParams& scorer, DenseMatrix& dbase, ScorerGrads& dscorer) {
    const LayerStack stack = propagate_forward(inst.op, base, inst.depth);
    std::vector<DenseMatrix> grad_layers(inst.depth + 1,
                                         DenseMatrix(base.rows(), base.cols()));
    dscorer = ScorerGrads::zeros_like(scorer);

    ScorerCache pos_cache;
    std::vector<ScorerCache> neg_caches;
    std::vector<double> neg_logits;
    std::vector<double> dnegs;
    for (std::size_t p = 0; p < inst.positives.size(); ++p) {
        const auto [anchor, target] = inst.positives[p];
        const double pos_logit =
            score_cached(scorer, cross_features(stack, anchor, target), pos_cache);
        const auto& negs = inst.negatives[p];
        neg_caches.resize(negs.size());
        neg_logits.clear();
        for (std::size_t q = 0; q < negs.size(); ++q) {
            neg_logits.push_back(
                score_cached(scorer, cross_features(stack, anchor, negs[q]), neg_caches[q]));
        }
        double dpos = 0.0;
        pair_loss(pos_logit, neg_logits, dpos, dnegs);

        const std::vector<double> dfeat = scorer_backward(scorer, pos_cache, dpos, dscorer);
        cross_features_backward(stack, anchor, target, dfeat, grad_layers);
        for (std::size_t q = 0; q < negs.size(); ++q) {
            const std::vector<double> dfeat_neg =
                scorer_backward(scorer, neg_caches[q], dnegs[q], dscorer);
            cross_features_backward(stack, anchor, negs[q], dfeat_neg, grad_layers);
        }
    }
    dbase = propagate_backward(inst.op, grad_layers);
}

void check_composite(Rng& rng, const GradCheckOptions& opt, CaseTracker& track) {
    const AttributedGraph g = random_small_graph(rng, opt.max_n, opt.max_m);
    const std::size_t d = 2 + rng.uniform_u64(opt.max_d - 1);
    const std::size_t depth = rng.uniform_u64(opt.max_k + 1);

    CompositeInstance inst;
    inst.op = build_transition(g.adjacency, g.features, 0.2 + 0.6 * rng.uniform());
    inst.targets = build_binary_targets(g.adjacency, g.features);
    inst.depth = depth;
    for (std::uint32_t a = 0; a < inst.targets.size(); ++a) {
        for (const std::uint32_t b : inst.targets.neighbors(a)) inst.positives.push_back({a, b});
    }
    rng.shuffle(inst.positives);
    if (inst.positives.size() > 24) inst.positives.resize(24);
    const auto size = static_cast<std::uint32_t>(inst.targets.size());
    for (const auto& [anchor, target] : inst.positives) {
        std::vector<std::uint32_t> negs;
        for (int q = 0; q < 2; ++q) {
            try {
                negs.push_back(sample_negative(anchor, inst.targets, rng, 0, size));
            } catch (const SamplingError&) {
            }
        }
        if (negs.empty()) negs.push_back(anchor == 0 ? size - 1 : 0);
        inst.negatives.push_back(std::move(negs));
    }

    DenseMatrix base(inst.op.size(), d);
    ScorerParams scorer = init_scorer(d, depth, rng.next());
    for (int attempt = 0;; ++attempt) {
        randomize(base, rng, 0.8);
        for (double& b : scorer.b1) b = rng.uniform(-0.1, 0.1);
        for (double& b : scorer.b2) b = rng.uniform(-0.1, 0.1);
        double min_preact = std::numeric_limits<double>::infinity();
        composite_loss(inst, base, scorer, &min_preact);
        if (min_preact > 1e-4 || attempt > 50) break;
    }

    DenseMatrix dbase;
    ScorerGrads dscorer;
    composite_grads(inst, base, scorer, dbase, dscorer);

    const double h = 1e-6;
    DenseMatrix shifted = base;
    for (std::size_t i = 0; i < base.size(); ++i) {
        shifted.data()[i] = base.data()[i] + h;
        const double up = composite_loss(inst, shifted, scorer);
        shifted.data()[i] = base.data()[i] - h;
        const double down = composite_loss(inst, shifted, scorer);
        shifted.data()[i] = base.data()[i];
        track.record("composite.base", rel_err(dbase.data()[i], (up - down) / (2 * h)));
    }
    const auto views = scorer_views(scorer);
    const auto gviews = grad_views(dscorer);
    for (std::size_t t = 0; t < views.size(); ++t) {
        auto span = views[t].second;
        for (std::size_t i = 0; i < span.size(); ++i) {
            const double keep = span[i];
            span[i] = keep + h;
            const double up = composite_loss(inst, base, scorer);
            span[i] = keep - h;
            const double down = composite_loss(inst, base, scorer);
            span[i] = keep;
            track.record("composite." + views[t].first,
                         rel_err(gviews[t].second[i], (up - down) / (2 * h)));
        }
    }
}

}  // namespace

bool GradCheckReport::all_pass() const {
    return std::all_of(cases.begin(), cases.end(), [](const auto& c) { return c.pass; });
}

double GradCheckReport::worst() const {
    double w = 0.0;
    for (const auto& c : cases) w = std::max(w, c.max_rel_err);
    return w;
}

std::string GradCheckReport::worst_name() const {
    std::string name;
    double w = -1.0;
    for (const auto& c : cases) {
        if (c.max_rel_err > w) {
            w = c.max_rel_err;
            name = c.name;
        }
    }
    return name;
}

GradCheckReport run_gradcheck(const GradCheckOptions& options) {
    if (options.instances == 0 || options.max_d < 2 || options.max_n < 4) {
        throw ConfigError("gradcheck needs instances >= 1, max_d >= 2, max_n >= 4");
    }
    GradCheckReport report;
    CaseTracker track{&report.cases, options.threshold};
    for (std::size_t i = 0; i < options.instances; ++i) {
        Rng rng(seed_for(options.seed, SeedStream::GradCheck, i));
        check_propagate(rng, options, track);
        check_scorer(rng, options, track);
        check_pair_loss(rng, track);
        check_composite(rng, options, track);
    }
    return report;
}

}  // namespace cane
