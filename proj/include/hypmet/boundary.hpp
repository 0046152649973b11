#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hypmet/core.hpp"
#include "hypmet/gromov.hpp"

namespace hypmet {

/// Finite stand-in for a point of the boundary at infinity: an ordered run of
/// interior labels marching toward a metric boundary point (boundary_proxy)
/// or away from everything (infinity). Indices refer to the working metric
/// matrix.
struct AnchorSequence {
    enum class Kind { boundary_proxy, infinity };

    std::vector<std::size_t> points;
    Kind kind = Kind::boundary_proxy;
    std::optional<std::string> target;  // boundary label for proxies

    std::size_t length() const { return points.size(); }
};

/// Checks the monotone approach invariants of a sequence against the base
/// distances of the sampled space. Proxies must d-approach their target,
/// infinity anchors must d-escape the reference point.
inline void validate_anchor(const SampledSpace& s, const AnchorSequence& seq,
                            std::size_t reference = 0) {
    if (seq.points.size() < 2) throw Error("parameter", "anchor sequence too short");
    if (seq.kind == AnchorSequence::Kind::boundary_proxy) {
        if (!seq.target) throw Error("parameter", "boundary proxy needs a target label");
        std::size_t t = s.index_of(*seq.target);
        for (std::size_t i = 1; i < seq.points.size(); ++i)
            if (s.dist(seq.points[i], t) >= s.dist(seq.points[i - 1], t))
                throw Error("parameter", "proxy distances to target are not strictly decreasing");
    } else {
        for (std::size_t i = 1; i < seq.points.size(); ++i)
            if (s.dist(seq.points[i], reference) <= s.dist(seq.points[i - 1], reference))
                throw Error("parameter", "anchor distances are not strictly increasing");
    }
}

struct ProductInterval {
    double lo = 0.0, hi = 0.0;
    bool diverged = false;

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

/// [min, max] of (a_i|b_i)_w over the last `tail` paired indices. The true
/// boundary product lies within [lo - 2 delta, hi]. `diverge_threshold`
/// flags pairs of sequences that represent the same boundary point.
inline ProductInterval boundary_gromov_product(const MetricMatrix& m, const AnchorSequence& a,
                                               const AnchorSequence& b, std::size_t w,
                                               std::size_t tail,
                                               double diverge_threshold =
                                                   std::numeric_limits<double>::infinity()) {
    std::size_t len = std::min(a.length(), b.length());
    if (tail == 0 || tail > len)
        throw Error("parameter", "tail window exceeds sequence length");
    ProductInterval out;
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = len - tail; i < len; ++i) {
        double p = gromov_product(m, a.points[i], b.points[i], w);
        out.lo = std::min(out.lo, p);
        out.hi = std::max(out.hi, p);
    }
    out.diverged = out.lo > diverge_threshold;
    return out;
}

/// (z|eta)_w for an interior point z against a sequence.
inline ProductInterval boundary_gromov_product(const MetricMatrix& m, std::size_t z,
                                               const AnchorSequence& b, std::size_t w,
                                               std::size_t tail) {
    std::size_t len = b.length();
    if (tail == 0 || tail > len)
        throw Error("parameter", "tail window exceeds sequence length");
    ProductInterval out;
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = len - tail; i < len; ++i) {
        double p = gromov_product(m, z, b.points[i], w);
        out.lo = std::min(out.lo, p);
        out.hi = std::max(out.hi, p);
    }
    return out;
}

/// Busemann function b(x) = (xi|w)_x - (xi|x)_w evaluated along the anchor
/// tail. b(w) = 0 holds exactly by the formula.
struct BusemannField {
    std::size_t w = 0;
    std::vector<double> values;       // per label of the working matrix
    double stabilization_gap = 0.0;   // max over labels of the last-two-iterate change

    double at(std::size_t i) const { return values[i]; }
};

inline BusemannField busemann(const MetricMatrix& m, const AnchorSequence& xi, std::size_t w,
                              double gap_tol = 0.05) {
    if (xi.kind != AnchorSequence::Kind::infinity)
        throw Error("parameter", "Busemann base must be an infinity anchor");
    if (xi.length() < 2) throw Error("parameter", "anchor sequence too short");
    std::size_t n = m.size();
    BusemannField field;
    field.w = w;
    field.values.resize(n);
    auto iterate = [&](std::size_t u, std::size_t x) {
        return gromov_product(m, u, w, x) - gromov_product(m, u, x, w);
    };
    std::size_t u_last = xi.points[xi.length() - 1];
    std::size_t u_prev = xi.points[xi.length() - 2];
    // the escape run itself has no Busemann limit, so it cannot witness
    // non-convergence; its (finite) values are stored but never meaningful
    std::vector<bool> on_run(n, false);
    for (std::size_t u : xi.points) on_run[u] = true;
    for (std::size_t x = 0; x < n; ++x) {
        double last = iterate(u_last, x);
        double prev = iterate(u_prev, x);
        field.values[x] = last;
        if (!on_run[x])
            field.stabilization_gap = std::max(field.stabilization_gap, std::abs(last - prev));
    }
    field.values[w] = 0.0;
    if (field.stabilization_gap > gap_tol)
        throw Error("non-convergence",
                    "Busemann tail gap " + std::to_string(field.stabilization_gap) +
                        " exceeds tolerance " + std::to_string(gap_tol));
    return field;
}

/// (x|y)_b = (1/2)(b(x) + b(y) - d(x,y)). May be negative.
inline double busemann_gromov_product(const MetricMatrix& m, const BusemannField& b,
                                      std::size_t x, std::size_t y) {
    if (x >= b.values.size() || y >= b.values.size())
        throw Error("lookup", "label not covered by the Busemann field");
    return 0.5 * (b.at(x) + b.at(y) - m.values(x, y));
}

/// Tail interval of (x_i|y_i)_b for two proxy sequences.
inline ProductInterval boundary_busemann_product(const MetricMatrix& m, const BusemannField& b,
                                                 const AnchorSequence& p,
                                                 const AnchorSequence& q, std::size_t tail) {
    std::size_t len = std::min(p.length(), q.length());
    if (tail == 0 || tail > len)
        throw Error("parameter", "tail window exceeds sequence length");
    ProductInterval out;
    out.lo = std::numeric_limits<double>::infinity();
    out.hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = len - tail; i < len; ++i) {
        double v = busemann_gromov_product(m, b, p.points[i], q.points[i]);
        out.lo = std::min(out.lo, v);
        out.hi = std::max(out.hi, v);
    }
    return out;
}

enum class BoundaryBase { visual_at_w, hamenstadt_at_b };

/// Quasimetric rho plus its Frink chain metrization on a finite boundary
/// label set.
struct BoundaryMetric {
    std::vector<std::string> labels;
    SquareMatrix rho;
    SquareMatrix dmat;
    BoundaryBase base_kind = BoundaryBase::visual_at_w;
    double epsilon = 0.0;
    double delta_used = 0.0;
    double max_interval_width = 0.0;  // worst tail-window width among the products

    MetricMatrix chain_matrix() const { return MetricMatrix{labels, dmat, MetricKind::d}; }
};

inline void check_visual_epsilon(double epsilon, double delta) {
    double bound = delta > 0.0 ? std::min(1.0, 1.0 / (5.0 * delta)) : 1.0;
    if (!(epsilon > 0.0) || epsilon >= bound)
        throw Error("parameter", "visual metric needs 0 < epsilon < min{1, 1/(5 delta)} = " +
                                     std::to_string(bound));
}

inline void check_hamenstadt_epsilon(double epsilon, double delta) {
    if (!(epsilon > 0.0) || std::exp(22.0 * epsilon * delta) > 2.0 + 1e-12)
        throw Error("parameter",
                    "Hamenstadt metric needs exp(22 epsilon delta) <= 2, i.e. epsilon <= " +
                        std::to_string(std::log(2.0) / (22.0 * std::max(delta, 1e-300))));
}

/// rho(xi, zeta) = e^{-epsilon (xi|zeta)}, products taken as tail midpoints of
/// the proxy sequences; diagonal 0 by the convention e^{-inf} = 0.
inline SquareMatrix quasimetric_rho(const MetricMatrix& m,
                                    const std::vector<AnchorSequence>& proxies,
                                    const std::optional<BusemannField>& base_b,
                                    std::size_t base_w, double epsilon, double delta,
                                    std::size_t tail, double* max_width = nullptr) {
    if (base_b)
        check_hamenstadt_epsilon(epsilon, delta);
    else
        check_visual_epsilon(epsilon, delta);
    std::size_t nb = proxies.size();
    SquareMatrix rho(nb, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = i + 1; j < nb; ++j) {
            ProductInterval iv = base_b
                ? boundary_busemann_product(m, *base_b, proxies[i], proxies[j], tail)
                : boundary_gromov_product(m, proxies[i], proxies[j], base_w, tail);
            worst = std::max(worst, iv.width());
            double v = std::exp(-epsilon * iv.mid());
            rho(i, j) = v;
            rho(j, i) = v;
        }
    if (max_width) *max_width = worst;
    return rho;
}

/// Frink chain metrization: shortest chain weight through the finite label
/// set. Exact on finite sets since weights are nonnegative and revisiting a
/// label never shortens a chain; Floyd-Warshall over the complete graph.
inline SquareMatrix chain_metrize(const SquareMatrix& rho, double tol = 1e-12) {
    std::size_t n = rho.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(rho(i, i)) > tol) throw Error("malformed-input", "rho diagonal not zero");
        for (std::size_t j = 0; j < n; ++j) {
            if (rho(i, j) < 0.0) throw Error("malformed-input", "negative rho entry");
            if (std::abs(rho(i, j) - rho(j, i)) > tol)
                throw Error("malformed-input", "rho is not symmetric");
        }
    }
    SquareMatrix d = rho;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
    return d;
}

struct FrinkCheck {
    bool ok = false;
    double worst_ratio = 1.0;  // min over pairs of dmat/rho; must stay >= 1/2
};

inline FrinkCheck frink_bound_check(const BoundaryMetric& bm) {
    FrinkCheck res;
    res.ok = true;
    std::size_t n = bm.rho.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (bm.rho(i, j) <= 0.0) continue;
            double r = bm.dmat(i, j) / bm.rho(i, j);
            res.worst_ratio = std::min(res.worst_ratio, r);
            if (r < 0.5 - 1e-12 || r > 1.0 + 1e-12) res.ok = false;
        }
    return res;
}

/// Convenience constructor running rho + chain metrization.
inline BoundaryMetric make_boundary_metric(const MetricMatrix& m,
                                           const std::vector<std::string>& boundary_labels,
                                           const std::vector<AnchorSequence>& proxies,
                                           const std::optional<BusemannField>& base_b,
                                           std::size_t base_w, double epsilon, double delta,
                                           std::size_t tail) {
    BoundaryMetric bm;
    bm.labels = boundary_labels;
    bm.base_kind = base_b ? BoundaryBase::hamenstadt_at_b : BoundaryBase::visual_at_w;
    bm.epsilon = epsilon;
    bm.delta_used = delta;
    bm.rho = quasimetric_rho(m, proxies, base_b, base_w, epsilon, delta, tail,
                             &bm.max_interval_width);
    bm.dmat = chain_metrize(bm.rho);
    return bm;
}

}  // namespace hypmet
