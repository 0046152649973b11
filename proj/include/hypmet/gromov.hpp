#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hypmet/core.hpp"
#include "hypmet/metrics.hpp"
#include "hypmet/qh_graph.hpp"

namespace hypmet {

/// (x|y)_w = (1/2)[d(x,w) + d(y,w) - d(x,y)]
inline double gromov_product(const MetricMatrix& m, std::size_t x, std::size_t y,
                             std::size_t w) {
    return 0.5 * (m.values(x, w) + m.values(y, w) - m.values(x, y));
}

inline double gromov_product(const MetricMatrix& m, const std::string& x, const std::string& y,
                             const std::string& w) {
    return gromov_product(m, m.index_of(x), m.index_of(y), m.index_of(w));
}

enum class DeltaMode { exhaustive, sampled };

struct DeltaReport {
    double delta = 0.0;
    std::array<std::size_t, 4> witness{};  // (x, y, z, w)
    DeltaMode mode = DeltaMode::exhaustive;
    std::size_t quadruples_checked = 0;
    std::uint64_t seed = 0;

    /// Re-evaluates the witness quadruple; equals delta when delta > 0.
    double witness_value(const MetricMatrix& m) const {
        auto [x, y, z, w] = witness;
        double v = std::min(gromov_product(m, x, z, w), gromov_product(m, z, y, w)) -
                   gromov_product(m, x, y, w);
        return std::max(0.0, v);
    }
};

namespace detail {

inline double quadruple_defect(const MetricMatrix& m, std::size_t x, std::size_t y,
                               std::size_t z, std::size_t w) {
    return std::min(gromov_product(m, x, z, w), gromov_product(m, z, y, w)) -
           gromov_product(m, x, y, w);
}

}  // namespace detail

/// Four-point hyperbolicity constant: the max over ordered quadruples of
/// min{(x|z)_w, (z|y)_w} - (x|y)_w, clamped below at 0. Exhaustive mode scans
/// all n^4 configurations, data parallel over base points with a
/// deterministic max reduction; sampled mode draws a seeded quadruple stream.
inline DeltaReport delta_hyperbolicity(const MetricMatrix& m,
                                       DeltaMode mode = DeltaMode::exhaustive,
                                       std::size_t sample_budget = 0, std::uint64_t seed = 1,
                                       unsigned threads = 0) {
    std::size_t n = m.size();
    if (n == 0) throw Error("malformed-input", "empty matrix");
    DeltaReport rep;
    rep.mode = mode;
    rep.seed = seed;

    if (mode == DeltaMode::sampled) {
        if (sample_budget == 0) throw Error("empty-budget", "sampled mode needs a budget");
        SplitMix64 rng(seed);
        for (std::size_t it = 0; it < sample_budget; ++it) {
            std::size_t x = rng.next_below(n), y = rng.next_below(n);
            std::size_t z = rng.next_below(n), w = rng.next_below(n);
            double v = detail::quadruple_defect(m, x, y, z, w);
            if (v > rep.delta) {
                rep.delta = v;
                rep.witness = {x, y, z, w};
            }
        }
        rep.quadruples_checked = sample_budget;
        return rep;
    }

    std::vector<DeltaReport> partial(n);
    parallel_chunks(n, threads, [&](std::size_t b, std::size_t e, unsigned) {
        std::vector<double> prod(n * n);
        for (std::size_t w = b; w < e; ++w) {
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y)
                    prod[x * n + y] = gromov_product(m, x, y, w);
            DeltaReport& best = partial[w];
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    double pxy = prod[x * n + y];
                    const double* px = &prod[x * n];
                    const double* py = &prod[y * n];
                    for (std::size_t z = 0; z < n; ++z) {
                        double v = std::min(px[z], py[z]) - pxy;  // (z|y) = (y|z)
                        if (v > best.delta) {
                            best.delta = v;
                            best.witness = {x, y, z, w};
                        }
                    }
                }
        }
    });
    for (const DeltaReport& p : partial)
        if (p.delta > rep.delta) {
            rep.delta = p.delta;
            rep.witness = p.witness;
        }
    rep.quadruples_checked = n * n * n * n;
    return rep;
}

/// Closed form of the Gromov product of the hyperbolization metric h:
/// (x|y)_w = log{ [d(w,x)+max{d(w),d(x)}][d(w,y)+max{d(w),d(y)}]
///               / (d(w)[d(x,y)+max{d(x),d(y)}]) }.
inline double h_gromov_product_closed_form(const SampledSpace& s, const std::string& x,
                                           const std::string& y, const std::string& w) {
    detail::require_positive_bdist(s);
    std::size_t ix = s.index_of(x), iy = s.index_of(y), iw = s.index_of(w);
    if (ix >= s.n_interior || iy >= s.n_interior || iw >= s.n_interior)
        throw Error("lookup", "closed form needs interior labels");
    double dx = s.bdist[ix], dy = s.bdist[iy], dw = s.bdist[iw];
    double num = (s.dist(iw, ix) + std::max(dw, dx)) * (s.dist(iw, iy) + std::max(dw, dy));
    double den = dw * (s.dist(ix, iy) + std::max(dx, dy));
    return std::log(num / den);
}

struct StandardEstimateResult {
    bool ok = false;
    double product = 0.0;      // (x|y)_p in k-hat
    double k_p_alpha = 0.0;    // min over path nodes of k-hat(p, node)
    double lower_slack = 0.0;  // (x|y)_p - (k(p,a) - 2 delta - eps)
    double upper_slack = 0.0;  // k(p,a) + eps/2 - (x|y)_p
};

/// Checks k(p,alpha) - 2 delta - eps <= (x|y)_p <= k(p,alpha) + eps/2 for an
/// eps-short path alpha from x to y. `upper_extra` absorbs the discretization
/// slack of the graph (3 sigma in the acceptance runs).
inline StandardEstimateResult standard_estimate_check(const QHGraph& g,
                                                      const std::vector<std::size_t>& path,
                                                      std::size_t p, double delta, double eps,
                                                      double upper_extra = 0.0) {
    auto short_res = epsilon_short_check(path, g, eps);
    if (!short_res.ok)
        throw Error("invalid-path", "curve is not epsilon-short for the given epsilon");
    std::size_t x = path.front(), y = path.back();
    StandardEstimateResult res;
    res.product = 0.5 * (g.apsp(x, p) + g.apsp(y, p) - g.apsp(x, y));
    res.k_p_alpha = std::numeric_limits<double>::infinity();
    for (std::size_t node : path) res.k_p_alpha = std::min(res.k_p_alpha, g.apsp(p, node));
    res.lower_slack = res.product - (res.k_p_alpha - 2.0 * delta - eps);
    res.upper_slack = res.k_p_alpha + 0.5 * eps + upper_extra - res.product;
    res.ok = res.lower_slack >= -1e-12 && res.upper_slack >= -1e-12;
    return res;
}

struct RoughSimilarityReport {
    double lambda = 1.0;
    double mu = 0.0;            // measured: max |M2 - lambda * M1|
    double max_residual = 0.0;  // == mu for the identity correspondence
    double cobounded_gap = 0.0; // identity map is onto, gap 0

    bool passes(double mu_bound) const { return max_residual <= mu_bound; }
};

/// Fits lambda d(x,y) - mu <= d'(x,y) <= lambda d(x,y) + mu for the identity
/// correspondence of labels. lambda is least squares through the origin
/// unless a hint is supplied.
inline RoughSimilarityReport rough_similarity_check(const MetricMatrix& m1,
                                                    const MetricMatrix& m2,
                                                    std::optional<double> lambda_hint = {}) {
    if (m1.labels != m2.labels)
        throw Error("label-mismatch", "matrices cover different label sets");
    std::size_t n = m1.size();
    RoughSimilarityReport rep;
    if (lambda_hint) {
        rep.lambda = *lambda_hint;
    } else {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                num += m1.values(i, j) * m2.values(i, j);
                den += m1.values(i, j) * m1.values(i, j);
            }
        if (den <= 0.0) throw Error("malformed-input", "degenerate source matrix");
        rep.lambda = num / den;
    }
    if (!(rep.lambda > 0.0)) throw Error("malformed-input", "fitted lambda not positive");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            rep.max_residual = std::max(
                rep.max_residual, std::abs(m2.values(i, j) - rep.lambda * m1.values(i, j)));
    rep.mu = rep.max_residual;
    return rep;
}

}  // namespace hypmet
