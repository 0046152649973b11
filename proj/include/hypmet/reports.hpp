#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hypmet/boundary.hpp"
#include "hypmet/distortion.hpp"
#include "hypmet/gromov.hpp"
#include "hypmet/metrics.hpp"
#include "hypmet/qh_graph.hpp"
#include "hypmet/sampling.hpp"

namespace hypmet {

struct ReportBudgets {
    std::size_t triples = 20000;
    std::size_t quads = 20000;
    std::size_t tail = 4;
    std::uint64_t seed = 7;
    unsigned threads = 0;
};

/// Four-point constant of a possibly large matrix: exhaustive when feasible,
/// otherwise the max of an exhaustive scan over a deterministic subsample and
/// a seeded sampled scan over the full label set.
inline DeltaReport delta_estimate(const MetricMatrix& m, unsigned threads = 0,
                                  std::uint64_t seed = 11,
                                  std::size_t exhaustive_limit = 90,
                                  std::size_t sample_budget = 400000) {
    std::size_t n = m.size();
    if (n <= exhaustive_limit)
        return delta_hyperbolicity(m, DeltaMode::exhaustive, 0, seed, threads);

    std::size_t stride = (n + exhaustive_limit - 1) / exhaustive_limit;
    MetricMatrix sub;
    sub.kind = m.kind;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < n; i += stride) keep.push_back(i);
    sub.values = SquareMatrix(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        sub.labels.push_back(m.labels[keep[i]]);
        for (std::size_t j = 0; j < keep.size(); ++j)
            sub.values(i, j) = m.values(keep[i], keep[j]);
    }
    DeltaReport a = delta_hyperbolicity(sub, DeltaMode::exhaustive, 0, seed, threads);
    DeltaReport b = delta_hyperbolicity(m, DeltaMode::sampled, sample_budget, seed);
    DeltaReport out = a.delta >= b.delta ? a : b;
    out.mode = DeltaMode::sampled;  // an estimate, not a certified exhaustive scan
    out.quadruples_checked = a.quadruples_checked + b.quadruples_checked;
    return out;
}

/// Anchor scaffolding of a fixture as sequences over the working metric.
inline std::vector<AnchorSequence> proxy_sequences(const BoundaryFixture& fx) {
    std::vector<AnchorSequence> out;
    for (std::size_t j = 0; j < fx.proxy_chains.size(); ++j) {
        AnchorSequence seq;
        seq.kind = AnchorSequence::Kind::boundary_proxy;
        seq.points = fx.proxy_chains[j];
        seq.target = fx.boundary_labels[j];
        out.push_back(std::move(seq));
    }
    return out;
}

inline AnchorSequence infinity_anchor(const BoundaryFixture& fx) {
    AnchorSequence xi;
    xi.kind = AnchorSequence::Kind::infinity;
    xi.points = fx.anchor_nodes;
    return xi;
}

struct HamenstadtResult {
    BoundaryMetric bm;
    BusemannField field;
};

inline HamenstadtResult build_hamenstadt(const MetricMatrix& m, const BoundaryFixture& fx,
                                         double epsilon, double delta, std::size_t tail,
                                         double gap_tol = 0.06) {
    HamenstadtResult out{{}, busemann(m, infinity_anchor(fx), fx.w_index, gap_tol)};
    out.bm = make_boundary_metric(m, fx.boundary_labels, proxy_sequences(fx), out.field,
                                  fx.w_index, epsilon, delta, tail);
    return out;
}

inline BoundaryMetric build_visual(const MetricMatrix& m, const BoundaryFixture& fx,
                                   double epsilon, double delta, std::size_t tail) {
    return make_boundary_metric(m, fx.boundary_labels, proxy_sequences(fx), std::nullopt,
                                fx.w_index, epsilon, delta, tail);
}

/// Mb with its rows/columns permuted while keeping the label list: a shuffled
/// boundary correspondence for negative controls.
inline MetricMatrix shuffled_correspondence(const MetricMatrix& m, std::uint64_t seed) {
    std::size_t n = m.size();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    SplitMix64 rng(seed);
    for (std::size_t i = n; i > 1; --i)
        std::swap(perm[i - 1], perm[rng.next_below(i)]);
    MetricMatrix out = m;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out.values(i, j) = m.values(perm[i], perm[j]);
    return out;
}

/// The largest Hamenstadt parameter the quasimetric bound allows, with a
/// safety margin for the finite-tail slack.
inline double hamenstadt_epsilon_bound(double delta) {
    return delta > 0.0 ? std::log(2.0) / (22.0 * delta) : 1.0;
}

// ---- theorem / corollary pipelines ----

struct Theorem1Report {
    double epsilon = 0.0;
    double delta_used = 0.0;
    double expected_alpha = 0.0;  // 1/epsilon for the hamenstadt -> d direction
    DistortionReport qs;
    bool frink_ok = false;
    double busemann_gap = 0.0;
    DistortionReport negative_control;
    bool negative_control_rejected = false;
    bool pass = false;
    std::string direction = "Ma=hamenstadt(h), Mb=d(boundary)";
};

inline Theorem1Report theorem1_report(const BoundaryFixture& fx, double epsilon,
                                      const ReportBudgets& budgets = {},
                                      double exponent_tol = 0.25,
                                      double correlation_gate = 0.5) {
    if (!fx.space.is_unbounded)
        throw Error("parameter", "the hyperbolization boundary comparison needs an "
                                 "unbounded space");
    Theorem1Report rep;
    rep.delta_used = std::log(4.0);  // (X,h) is log4-hyperbolic for any base space
    rep.epsilon = std::min(epsilon, 0.999 * hamenstadt_epsilon_bound(rep.delta_used));
    MetricMatrix h = h_metric(fx.space);
    HamenstadtResult ham = build_hamenstadt(h, fx, rep.epsilon, rep.delta_used, budgets.tail);
    rep.busemann_gap = ham.field.stabilization_gap;
    rep.frink_ok = frink_bound_check(ham.bm).ok;

    MetricMatrix ma = ham.bm.chain_matrix();
    MetricMatrix mb = fx.space.boundary_metric_d();
    rep.qs = qs_distortion(ma, mb, budgets.triples, budgets.seed);
    rep.qs.metadata = rep.direction;
    rep.expected_alpha = 1.0 / rep.epsilon;

    rep.negative_control = qs_distortion(ma, shuffled_correspondence(mb, budgets.seed + 1),
                                         budgets.triples, budgets.seed);
    rep.negative_control_rejected = rep.negative_control.correlation < correlation_gate;

    bool exponent_ok =
        std::abs(rep.qs.fit.alpha - rep.expected_alpha) <= exponent_tol * rep.expected_alpha;
    rep.pass = exponent_ok && rep.frink_ok && rep.qs.correlation >= correlation_gate &&
               std::isfinite(rep.qs.fit.C) && rep.negative_control_rejected;
    return rep;
}

struct Corollary1Report {
    RoughSimilarityReport rough;       // jtilde vs h with lambda = 2
    double mu_bound = 2.0 * std::log(2.0);
    double epsilon = 0.0, epsilon_prime = 0.0;
    double delta_h = 0.0, delta_jtilde = 0.0;
    double expected_alpha = 0.0;       // lambda * eps' / eps with lambda = 2
    DistortionReport qs;               // jtilde-hamenstadt -> h-hamenstadt
    bool pass = false;
};

inline Corollary1Report corollary1_report(const BoundaryFixture& fx, double epsilon,
                                          double epsilon_prime,
                                          const ReportBudgets& budgets = {},
                                          double exponent_tol = 0.25) {
    Corollary1Report rep;
    MetricMatrix h = h_metric(fx.space);
    MetricMatrix jt = jtilde_metric(fx.space);
    rep.rough = rough_similarity_check(jt, h, 2.0);

    rep.delta_h = std::log(4.0);
    rep.delta_jtilde = delta_estimate(jt, budgets.threads, budgets.seed).delta;
    rep.epsilon = std::min(epsilon, 0.999 * hamenstadt_epsilon_bound(rep.delta_jtilde));
    rep.epsilon_prime =
        std::min(epsilon_prime, 0.999 * hamenstadt_epsilon_bound(rep.delta_h));

    HamenstadtResult ham_jt =
        build_hamenstadt(jt, fx, rep.epsilon, rep.delta_jtilde, budgets.tail);
    HamenstadtResult ham_h = build_hamenstadt(h, fx, rep.epsilon_prime, rep.delta_h,
                                              budgets.tail);
    rep.qs = qs_distortion(ham_jt.bm.chain_matrix(), ham_h.bm.chain_matrix(), budgets.triples,
                           budgets.seed);
    rep.qs.metadata = "Ma=hamenstadt(jtilde), Mb=hamenstadt(h)";
    rep.expected_alpha = 2.0 * rep.epsilon_prime / rep.epsilon;
    bool exponent_ok =
        std::abs(rep.qs.fit.alpha - rep.expected_alpha) <= exponent_tol * rep.expected_alpha;
    rep.pass = rep.rough.passes(rep.mu_bound + 1e-9) && exponent_ok;
    return rep;
}

struct Theorem2Report {
    double sigma = 0.0;
    double epsilon = 0.0;
    double delta_used = 0.0;
    double a_hat = 1.0;
    EnvelopeFit fit_lt1, fit_ge1;  // t < 1 and t >= 1 branches, Ma = d side
    DistortionReport qs;           // all samples, for scatter export
    bool uniformity_warning = false;
    bool case2_ok = false;  // t<1 exponent tracks epsilon
    bool case1_ok = false;  // t>=1 slope within the 4 A^2 envelope
    bool pass = false;
};

inline Theorem2Report theorem2_report(const BoundaryFixture& fx, const QHGraph& graph,
                                      const UniformityEstimate& uniformity,
                                      std::optional<double> epsilon = {},
                                      const ReportBudgets& budgets = {},
                                      double exponent_tol = 0.25,
                                      bool uniformity_warning = false) {
    Theorem2Report rep;
    rep.sigma = graph.sigma;
    rep.a_hat = uniformity.A_hat;
    rep.uniformity_warning = uniformity_warning;
    MetricMatrix khat = graph.khat();
    rep.delta_used = delta_estimate(khat, budgets.threads, budgets.seed).delta;
    double bound = hamenstadt_epsilon_bound(rep.delta_used);
    rep.epsilon = epsilon ? std::min(*epsilon, 0.999 * bound) : 0.9 * bound;

    HamenstadtResult ham = build_hamenstadt(khat, fx, rep.epsilon, rep.delta_used,
                                            budgets.tail);
    MetricMatrix ma = fx.space.boundary_metric_d();
    rep.qs = qs_distortion(ma, ham.bm.chain_matrix(), budgets.triples, budgets.seed);
    rep.qs.metadata = "Ma=d(boundary), Mb=hamenstadt(k_graph)";

    std::vector<DistortionSample> lt1, ge1;
    for (const auto& s : rep.qs.samples) (s.t < 1.0 ? lt1 : ge1).push_back(s);
    rep.fit_lt1 = fit_envelope(lt1);
    rep.fit_ge1 = fit_envelope(ge1);

    rep.case2_ok = std::abs(rep.fit_lt1.alpha - rep.epsilon) <= exponent_tol * rep.epsilon;
    rep.case1_ok =
        rep.fit_ge1.alpha <= 4.0 * rep.a_hat * rep.a_hat * rep.fit_lt1.alpha * 1.25;
    rep.pass = rep.case2_ok && rep.case1_ok && !rep.uniformity_warning;
    return rep;
}

/// A-hat stability across a refinement: doubling the resolution of a uniform
/// space leaves the estimate roughly in place; a cusp drives it up.
inline bool uniformity_diverges(double a_coarse, double a_fine, double growth_gate = 1.5) {
    return a_fine > growth_gate * a_coarse;
}

struct Corollary2Report {
    double eps_visual = 0.0;
    double eps_hamenstadt = 0.0;
    double delta_used = 0.0;
    double expected_alpha = 0.0;  // eps_hamenstadt / eps_visual
    DistortionReport qm;
    bool pass = false;
};

inline Corollary2Report corollary2_check(const BoundaryFixture& fx, const QHGraph& graph,
                                         double eps_visual, double eps_hamenstadt,
                                         const ReportBudgets& budgets = {},
                                         double exponent_tol = 0.25) {
    Corollary2Report rep;
    MetricMatrix khat = graph.khat();
    rep.delta_used = delta_estimate(khat, budgets.threads, budgets.seed).delta;
    rep.eps_visual = eps_visual;
    rep.eps_hamenstadt = eps_hamenstadt;

    BoundaryMetric vis = build_visual(khat, fx, eps_visual, rep.delta_used, budgets.tail);
    HamenstadtResult ham =
        build_hamenstadt(khat, fx, eps_hamenstadt, rep.delta_used, budgets.tail);
    rep.qm = qm_distortion(vis.chain_matrix(), ham.bm.chain_matrix(), budgets.quads,
                           budgets.seed);
    rep.qm.metadata = "Ma=visual(k_graph), Mb=hamenstadt(k_graph)";
    rep.expected_alpha = eps_hamenstadt / eps_visual;
    rep.pass =
        std::abs(rep.qm.fit.alpha - rep.expected_alpha) <= exponent_tol * rep.expected_alpha;
    return rep;
}

/// Max deviation of the renormalization identity
/// (x|y)_b = (x|y)_w - (xi|x)_w - (xi|y)_w over sampled interior pairs.
inline double busemann_identity_deviation(const MetricMatrix& m, const BoundaryFixture& fx,
                                          const BusemannField& field, std::size_t tail,
                                          std::size_t n_pairs, std::uint64_t seed) {
    AnchorSequence xi = infinity_anchor(fx);
    SplitMix64 rng(seed);
    std::size_t n = m.size();
    std::vector<bool> on_run(n, false);
    for (std::size_t u : xi.points) on_run[u] = true;
    double worst = 0.0;
    for (std::size_t it = 0; it < n_pairs; ++it) {
        std::size_t x = rng.next_below(n), y = rng.next_below(n);
        if (on_run[x] || on_run[y]) continue;  // no Busemann limit on the escape run
        double lhs = busemann_gromov_product(m, field, x, y);
        double rhs = gromov_product(m, x, y, fx.w_index) -
                     boundary_gromov_product(m, x, xi, fx.w_index, tail).mid() -
                     boundary_gromov_product(m, y, xi, fx.w_index, tail).mid();
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

/// Worst violation of the quasimetric relation
/// rho(x1,x2) <= K max{rho(x1,x3), rho(x3,x2)} with K = e^{22 eps delta},
/// returned as the max of rho(x1,x2) / (K max{...}) over all triples.
inline double quasimetric_factor_worst(const BoundaryMetric& bm) {
    double kfac = std::exp(22.0 * bm.epsilon * bm.delta_used);
    std::size_t n = bm.rho.size();
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                double cap = kfac * std::max(bm.rho(a, c), bm.rho(c, b));
                if (cap > 0.0) worst = std::max(worst, bm.rho(a, b) / cap);
            }
        }
    return worst;
}

}  // namespace hypmet
