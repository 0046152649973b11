#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "hypmet/common.hpp"

namespace hypmet {

enum class MetricKind { d, h, jtilde, j, k_graph };

inline const char* to_string(MetricKind k) {
    switch (k) {
        case MetricKind::d: return "d";
        case MetricKind::h: return "h";
        case MetricKind::jtilde: return "jtilde";
        case MetricKind::j: return "j";
        case MetricKind::k_graph: return "k_graph";
    }
    return "?";
}

inline MetricKind metric_kind_from_string(const std::string& s) {
    if (s == "d") return MetricKind::d;
    if (s == "h") return MetricKind::h;
    if (s == "jtilde") return MetricKind::jtilde;
    if (s == "j") return MetricKind::j;
    if (s == "k_graph") return MetricKind::k_graph;
    throw Error("malformed-input", "unknown metric kind '" + s + "'");
}

/// Symbolic label for the point at infinity in cross ratios. Never a row of
/// any matrix; boundary_infinity represents it by anchor sequences.
inline const std::string infinity_label = "inf";

/// Pairwise distance table under a named metric. Immutable after
/// construction by convention; all operations on it are pure.
struct MetricMatrix {
    std::vector<std::string> labels;
    SquareMatrix values;
    MetricKind kind = MetricKind::d;

    std::size_t size() const { return labels.size(); }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw Error("lookup", "unknown label '" + label + "'");
    }

    double at(const std::string& x, const std::string& y) const {
        return values(index_of(x), index_of(y));
    }

    MetricMatrix scaled(double lambda) const {
        MetricMatrix out = *this;
        for (double& v : out.values.data()) v *= lambda;
        return out;
    }
};

/// Finite interior sample of a noncomplete metric space. Interior labels come
/// first, then boundary labels; `dist` covers interior ∪ boundary.
struct SampledSpace {
    std::vector<std::string> labels;              // interior then boundary
    std::vector<std::vector<double>> coords;      // empty per point for opaque labels
    std::size_t n_interior = 0;
    SquareMatrix dist;                            // over all labels
    std::vector<double> bdist;                    // d(x), per interior point
    bool is_unbounded = false;

    std::size_t n_boundary() const { return labels.size() - n_interior; }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw Error("lookup", "unknown label '" + label + "'");
    }

    /// Interior-only distance table under the base metric d.
    MetricMatrix interior_metric() const {
        MetricMatrix m;
        m.kind = MetricKind::d;
        m.labels.assign(labels.begin(), labels.begin() + std::ptrdiff_t(n_interior));
        m.values = SquareMatrix(n_interior);
        for (std::size_t i = 0; i < n_interior; ++i)
            for (std::size_t j = 0; j < n_interior; ++j) m.values(i, j) = dist(i, j);
        return m;
    }

    /// Distance table restricted to the boundary labels.
    MetricMatrix boundary_metric_d() const {
        MetricMatrix m;
        m.kind = MetricKind::d;
        std::size_t nb = n_boundary();
        m.labels.assign(labels.begin() + std::ptrdiff_t(n_interior), labels.end());
        m.values = SquareMatrix(nb);
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = 0; j < nb; ++j)
                m.values(i, j) = dist(n_interior + i, n_interior + j);
        return m;
    }
};

struct AxiomViolation {
    std::string axiom;  // "symmetry" | "zero-diagonal" | "nonnegative" | "triangle"
    std::size_t i = 0, j = 0, k = 0;
    double excess = 0.0;
};

struct ValidationReport {
    std::vector<AxiomViolation> violations;
    bool ok() const { return violations.empty(); }
};

/// Checks symmetry, zero diagonal, nonnegativity and the triangle inequality.
/// Entries are rescaled so the max entry is 1 before applying the absolute
/// tolerance, so the slack tracks the scale of the data.
inline ValidationReport validate_metric(const MetricMatrix& m, double tol = 1e-9) {
    std::size_t n = m.values.size();
    if (n != m.labels.size())
        throw Error("malformed-input", "label count does not match matrix size");
    for (double v : m.values.data())
        if (!std::isfinite(v)) throw Error("malformed-input", "non-finite matrix entry");

    ValidationReport rep;
    double scale = m.values.max_entry();
    if (scale <= 0.0) scale = 1.0;
    double abs_tol = tol * scale;

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(m.values(i, i)) > abs_tol)
            rep.violations.push_back({"zero-diagonal", i, i, i, std::abs(m.values(i, i))});
        for (std::size_t j = i + 1; j < n; ++j) {
            if (m.values(i, j) < -abs_tol)
                rep.violations.push_back({"nonnegative", i, j, j, -m.values(i, j)});
            double asym = std::abs(m.values(i, j) - m.values(j, i));
            if (asym > abs_tol) rep.violations.push_back({"symmetry", i, j, j, asym});
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                double excess = m.values(i, j) - m.values(i, k) - m.values(k, j);
                if (excess > abs_tol) {
                    rep.violations.push_back({"triangle", i, j, k, excess});
                    goto next_pair;  // one witness per pair is enough
                }
            }
        next_pair:;
        }
    return rep;
}

/// d(x) = min over boundary samples. Errors if the boundary set is empty or
/// an interior point coincides with a boundary sample.
inline std::vector<double> boundary_distance(const SampledSpace& s) {
    std::size_t nb = s.n_boundary();
    if (nb == 0) throw Error("no-boundary", "space has no boundary samples");
    std::vector<double> out(s.n_interior);
    for (std::size_t i = 0; i < s.n_interior; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < nb; ++b)
            best = std::min(best, s.dist(i, s.n_interior + b));
        if (best <= 0.0)
            throw Error("interior-touches-boundary",
                        "interior point '" + s.labels[i] + "' has zero boundary distance");
        out[i] = best;
    }
    return out;
}

/// |x,y,z,w| = d(x,z)d(y,w) / (d(x,y)d(z,w)). With allow_infinity set and
/// w == infinity_label this degenerates to d(x,z)/d(x,y).
inline double cross_ratio(const MetricMatrix& m, const std::string& x, const std::string& y,
                          const std::string& z, const std::string& w,
                          bool allow_infinity = false) {
    bool w_inf = allow_infinity && w == infinity_label;
    if (x == y || x == z || y == z || (!w_inf && (w == x || w == y || w == z)))
        throw Error("degenerate-quadruple", "cross ratio needs four distinct points");
    std::size_t ix = m.index_of(x), iy = m.index_of(y), iz = m.index_of(z);
    if (w_inf) {
        double den = m.values(ix, iy);
        if (den <= 0.0) throw Error("degenerate-quadruple", "zero denominator d(x,y)");
        return m.values(ix, iz) / den;
    }
    std::size_t iw = m.index_of(w);
    double den = m.values(ix, iy) * m.values(iz, iw);
    if (den <= 0.0) throw Error("degenerate-quadruple", "zero denominator d(x,y)d(z,w)");
    return m.values(ix, iz) * m.values(iy, iw) / den;
}

}  // namespace hypmet
