#pragma once

#include <cmath>

#include "hypmet/core.hpp"

namespace hypmet {

namespace detail {

inline void require_positive_bdist(const SampledSpace& s) {
    for (std::size_t i = 0; i < s.n_interior; ++i)
        if (!(s.bdist[i] > 0.0))
            throw Error("division-by-zero",
                        "boundary distance of '" + s.labels[i] + "' is not positive");
}

template <class F>
MetricMatrix closed_form_metric(const SampledSpace& s, MetricKind kind, F&& entry) {
    require_positive_bdist(s);
    MetricMatrix m;
    m.kind = kind;
    m.labels.assign(s.labels.begin(), s.labels.begin() + std::ptrdiff_t(s.n_interior));
    m.values = SquareMatrix(s.n_interior);
    for (std::size_t i = 0; i < s.n_interior; ++i)
        for (std::size_t j = i + 1; j < s.n_interior; ++j) {
            double v = entry(s.dist(i, j), s.bdist[i], s.bdist[j]);
            m.values(i, j) = v;
            m.values(j, i) = v;
        }
    return m;
}

}  // namespace detail

/// Hyperbolization metric h(x,y) = 2 log[(d(x,y) + max{d(x),d(y)}) / sqrt(d(x)d(y))].
inline MetricMatrix h_metric(const SampledSpace& s) {
    return detail::closed_form_metric(s, MetricKind::h, [](double dxy, double dx, double dy) {
        return 2.0 * std::log((dxy + std::max(dx, dy)) / std::sqrt(dx * dy));
    });
}

/// jtilde(x,y) = (1/2) log[(1 + d(x,y)/d(x)) (1 + d(x,y)/d(y))].
inline MetricMatrix jtilde_metric(const SampledSpace& s) {
    return detail::closed_form_metric(s, MetricKind::jtilde, [](double dxy, double dx, double dy) {
        return 0.5 * std::log((1.0 + dxy / dx) * (1.0 + dxy / dy));
    });
}

/// Distance ratio metric j(x,y) = log(1 + d(x,y)/min{d(x),d(y)}).
inline MetricMatrix j_metric(const SampledSpace& s) {
    return detail::closed_form_metric(s, MetricKind::j, [](double dxy, double dx, double dy) {
        return std::log1p(dxy / std::min(dx, dy));
    });
}

}  // namespace hypmet
