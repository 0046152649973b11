#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "hypmet/core.hpp"

namespace hypmet {

enum class Family {
    half_plane,
    punctured_plane,
    exterior_disk,
    slit_plane,
    cusp_domain,
    custom_cloud
};

enum class Grading { uniform, boundary_graded };

inline const char* to_string(Family f) {
    switch (f) {
        case Family::half_plane: return "half_plane";
        case Family::punctured_plane: return "punctured_plane";
        case Family::exterior_disk: return "exterior_disk";
        case Family::slit_plane: return "slit_plane";
        case Family::cusp_domain: return "cusp_domain";
        case Family::custom_cloud: return "custom_cloud";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "half_plane") return Family::half_plane;
    if (s == "punctured_plane") return Family::punctured_plane;
    if (s == "exterior_disk") return Family::exterior_disk;
    if (s == "slit_plane") return Family::slit_plane;
    if (s == "cusp_domain") return Family::cusp_domain;
    if (s == "custom_cloud") return Family::custom_cloud;
    throw Error("malformed-input", "unknown family '" + s + "'");
}

struct SamplerSpec {
    Family family = Family::half_plane;
    std::size_t n_interior = 100;
    std::size_t n_boundary = 16;
    double extent = 4.0;
    std::uint64_t seed = 1;
    Grading grading = Grading::uniform;
};

namespace detail {

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace detail

/// Assembles a SampledSpace from coordinates. `analytic_bdist` supplies d(x)
/// when the family admits a closed form; otherwise d(x) falls back to the
/// minimum over the stored boundary samples.
inline SampledSpace make_space(std::vector<std::vector<double>> interior,
                               std::vector<std::vector<double>> boundary, bool unbounded,
                               const std::vector<double>* analytic_bdist = nullptr) {
    SampledSpace s;
    s.n_interior = interior.size();
    s.is_unbounded = unbounded;
    s.coords = std::move(interior);
    for (auto& b : boundary) s.coords.push_back(std::move(b));
    for (std::size_t i = 0; i < s.coords.size(); ++i)
        s.labels.push_back((i < s.n_interior ? "p" : "b") +
                           std::to_string(i < s.n_interior ? i : i - s.n_interior));
    std::size_t n = s.coords.size();
    s.dist = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = detail::euclid(s.coords[i], s.coords[j]);
            s.dist(i, j) = d;
            s.dist(j, i) = d;
        }
    if (analytic_bdist) {
        s.bdist = *analytic_bdist;
    } else {
        s.bdist.resize(s.n_interior);
        for (std::size_t i = 0; i < s.n_interior; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < s.n_boundary(); ++b)
                best = std::min(best, s.dist(i, s.n_interior + b));
            s.bdist[i] = best;
        }
    }
    for (std::size_t i = 0; i < s.n_interior; ++i)
        if (!(s.bdist[i] > 0.0))
            throw Error("interior-touches-boundary",
                        "generated interior point touches the boundary");
    return s;
}

namespace detail {

/// Log-spaced boundary positions on the real line, symmetric about 0:
/// 0, +-extent, +-extent*r, ... down to about extent * 2^-7.
inline std::vector<double> log_spaced_line(std::size_t count, double extent) {
    std::vector<double> pos{0.0};
    std::size_t per_side = count / 2;
    double r = per_side > 1 ? std::pow(2.0, -7.0 / double(per_side - 1)) : 1.0;
    double v = extent;
    for (std::size_t i = 0; i < per_side; ++i) {
        pos.push_back(v);
        pos.push_back(-v);
        v *= r;
    }
    std::sort(pos.begin(), pos.end());
    while (pos.size() > count) pos.erase(pos.begin());
    return pos;
}

inline std::vector<double> cusp_boundary_samples_x(std::size_t count) {
    // dense along the parabola arc, graded toward the tip
    std::vector<double> xs;
    for (std::size_t i = 0; i < count; ++i) {
        double u = double(i + 1) / double(count);
        xs.push_back(u * u);  // quadratic grading toward x = 0
    }
    return xs;
}

}  // namespace detail

/// Deterministic sampler for the standard unbounded model families. The seed
/// drives a splitmix64 stream; identical specs reproduce identical spaces.
/// boundary_graded scatters interior depth log-uniformly (density ~ 1/d) and
/// pins one point at depth extent * 2^-9.
inline SampledSpace sample(const SamplerSpec& spec) {
    if (spec.n_interior < 4) throw Error("parameter", "n_interior must be at least 4");
    if (spec.extent <= 0.0) throw Error("parameter", "extent must be positive");
    SplitMix64 rng(spec.seed);
    std::vector<std::vector<double>> interior, boundary;
    std::vector<double> bdist;
    bool graded = spec.grading == Grading::boundary_graded;
    double dmin = spec.extent * std::pow(2.0, -9.0);

    auto depth = [&](std::size_t i) {
        // log-uniform depth in graded mode, uniform otherwise; index 0 pinned deep
        if (graded) {
            if (i == 0) return dmin;
            double u = rng.next_double();
            return dmin * std::pow(spec.extent / dmin, u);
        }
        return spec.extent * (rng.next_double() * 0.999 + 0.001);
    };

    switch (spec.family) {
        case Family::half_plane: {
            for (std::size_t i = 0; i < spec.n_interior; ++i) {
                double y = depth(i);
                double x = (2.0 * rng.next_double() - 1.0) * spec.extent;
                interior.push_back({x, y});
                bdist.push_back(y);
            }
            for (double p : detail::log_spaced_line(spec.n_boundary, spec.extent))
                boundary.push_back({p, 0.0});
            return make_space(std::move(interior), std::move(boundary), true, &bdist);
        }
        case Family::punctured_plane: {
            for (std::size_t i = 0; i < spec.n_interior; ++i) {
                double r = depth(i);
                double a = rng.next_double() * 2.0 * M_PI;
                interior.push_back({r * std::cos(a), r * std::sin(a)});
                bdist.push_back(r);
            }
            boundary.push_back({0.0, 0.0});
            return make_space(std::move(interior), std::move(boundary), true, &bdist);
        }
        case Family::exterior_disk: {
            for (std::size_t i = 0; i < spec.n_interior; ++i) {
                double r = 1.0 + depth(i);
                double a = rng.next_double() * 2.0 * M_PI;
                interior.push_back({r * std::cos(a), r * std::sin(a)});
                bdist.push_back(r - 1.0);
            }
            std::size_t nb = std::max<std::size_t>(spec.n_boundary, 3);
            for (std::size_t i = 0; i < nb; ++i) {
                double a = 2.0 * M_PI * double(i) / double(nb);
                boundary.push_back({std::cos(a), std::sin(a)});
            }
            return make_space(std::move(interior), std::move(boundary), true, &bdist);
        }
        case Family::slit_plane: {
            // slit along the ray {x >= 0, y = 0}; boundary distance from samples
            for (std::size_t i = 0; i < spec.n_interior; ++i) {
                double d = depth(i);
                double along = rng.next_double() * spec.extent;
                bool above = rng.next_u64() & 1;
                interior.push_back({along, above ? d : -d});
            }
            std::size_t nb = std::max<std::size_t>(spec.n_boundary, 8);
            for (std::size_t i = 0; i < nb; ++i)
                boundary.push_back({spec.extent * double(i) / double(nb - 1), 0.0});
            return make_space(std::move(interior), std::move(boundary), true, nullptr);
        }
        case Family::cusp_domain: {
            // {(x, y): 0 < y < x^2, 0 < x < 1}; outward cusp at the origin
            for (std::size_t i = 0; i < spec.n_interior; ++i) {
                double x = 0.05 + 0.95 * rng.next_double();
                double y = x * x * (0.1 + 0.8 * rng.next_double());
                interior.push_back({x, y});
            }
            std::size_t nb = std::max<std::size_t>(spec.n_boundary, 64);
            for (double x : detail::cusp_boundary_samples_x(nb / 2)) {
                boundary.push_back({x, 0.0});
                boundary.push_back({x, x * x});
            }
            return make_space(std::move(interior), std::move(boundary), false, nullptr);
        }
        case Family::custom_cloud:
            throw Error("parameter", "custom_cloud spaces are loaded from files, not sampled");
    }
    throw Error("parameter", "unknown family");
}

/// A sampled space together with the scaffolding the boundary pipelines need:
/// one proxy chain per boundary label (ordered toward the boundary) and an
/// anchor run escaping to infinity. Indices refer to interior points.
struct BoundaryFixture {
    SampledSpace space;
    std::vector<std::string> boundary_labels;
    std::vector<std::vector<std::size_t>> proxy_chains;  // deepest node last
    std::vector<std::size_t> anchor_nodes;               // farthest node last
    std::size_t w_index = 0;
};

/// Fixture for the closed-form hyperbolic metrics (h, jtilde): interior
/// scatter plus geometric proxy schedules r 2^-n toward each boundary label
/// and an anchor schedule R 2^n away from everything. No locality-graph
/// connectivity is required here.
inline BoundaryFixture make_h_fixture(Family family, std::size_t n_scatter,
                                      std::size_t n_boundary, double extent,
                                      std::uint64_t seed, std::size_t levels = 13) {
    if (family != Family::half_plane && family != Family::exterior_disk)
        throw Error("parameter", "h fixtures support half_plane and exterior_disk");
    SplitMix64 rng(seed);
    std::vector<std::vector<double>> interior, boundary;
    std::vector<double> bdist;
    BoundaryFixture fx;

    auto push_interior = [&](std::vector<double> p, double d) {
        interior.push_back(std::move(p));
        bdist.push_back(d);
        return interior.size() - 1;
    };

    if (family == Family::half_plane) {
        std::vector<double> pos = detail::log_spaced_line(n_boundary, extent);
        for (std::size_t i = 0; i < n_scatter; ++i) {
            double y = extent * (rng.next_double() * 0.999 + 0.001);
            double x = (2.0 * rng.next_double() - 1.0) * extent;
            push_interior({x, y}, y);
        }
        for (std::size_t j = 0; j < pos.size(); ++j) {
            double nn = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < pos.size(); ++l)
                if (l != j) nn = std::min(nn, std::abs(pos[l] - pos[j]));
            double start = 0.5 * std::min(nn, extent);
            std::vector<std::size_t> chain;
            for (std::size_t n = 0; n < levels; ++n)
                chain.push_back(push_interior({pos[j], start * std::pow(2.0, -double(n))},
                                              start * std::pow(2.0, -double(n))));
            fx.proxy_chains.push_back(std::move(chain));
            boundary.push_back({pos[j], 0.0});
        }
        for (std::size_t n = 0; n < levels; ++n) {
            double y = extent * std::pow(2.0, double(n));
            fx.anchor_nodes.push_back(push_interior({0.0, y}, y));
        }
    } else {  // exterior_disk
        std::vector<double> angles;
        std::size_t per_side = n_boundary / 2;
        double r = per_side > 1 ? std::pow(2.0, -7.0 / double(per_side - 1)) : 1.0;
        double a = M_PI * 0.95;
        angles.push_back(0.0);
        for (std::size_t i = 0; i + 1 < n_boundary && i < 2 * per_side; i += 2) {
            angles.push_back(a);
            angles.push_back(-a);
            a *= r;
        }
        while (angles.size() > n_boundary) angles.pop_back();
        for (std::size_t i = 0; i < n_scatter; ++i) {
            double rad = 1.0 + extent * (rng.next_double() * 0.999 + 0.001);
            double th = rng.next_double() * 2.0 * M_PI;
            push_interior({rad * std::cos(th), rad * std::sin(th)}, rad - 1.0);
        }
        for (std::size_t j = 0; j < angles.size(); ++j) {
            double nn = std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < angles.size(); ++l)
                if (l != j) {
                    double chord = 2.0 * std::abs(std::sin(0.5 * (angles[l] - angles[j])));
                    nn = std::min(nn, chord);
                }
            double start = 0.5 * std::min(nn, 1.0);
            std::vector<std::size_t> chain;
            for (std::size_t n = 0; n < levels; ++n) {
                double rad = 1.0 + start * std::pow(2.0, -double(n));
                chain.push_back(push_interior(
                    {rad * std::cos(angles[j]), rad * std::sin(angles[j])}, rad - 1.0));
            }
            fx.proxy_chains.push_back(std::move(chain));
            boundary.push_back({std::cos(angles[j]), std::sin(angles[j])});
        }
        for (std::size_t n = 0; n < levels; ++n) {
            double rad = 1.0 + extent * std::pow(2.0, double(n));
            fx.anchor_nodes.push_back(push_interior({rad, 0.0}, rad - 1.0));
        }
    }

    fx.space = make_space(std::move(interior), std::move(boundary), true, &bdist);
    for (std::size_t b = 0; b < fx.space.n_boundary(); ++b)
        fx.boundary_labels.push_back(fx.space.labels[fx.space.n_interior + b]);
    fx.w_index = 0;
    return fx;
}

/// Half-plane wedge-comb mesh for the quasihyperbolic graph. One wedge per
/// boundary position: a vertical chain plus side columns within aperture * y
/// of it, on a shared geometric height ladder dense enough that the
/// sigma-locality rule admits consecutive rungs, row neighbors, and the
/// diagonal hops between rows. Wedges of adjacent positions merge at a height
/// proportional to their gap, so shortest paths between nearby boundary
/// points climb only O(gap) instead of a fixed canopy -- detours stay a
/// uniform additive constant in the quasihyperbolic metric. Above the canopy
/// the center chain continues alone and serves as the infinity anchor.
inline BoundaryFixture make_half_plane_comb(std::size_t n_chains, double extent,
                                            double sigma, double aperture = 0.25,
                                            std::size_t depth_pow = 5,
                                            std::size_t anchor_pow = 6,
                                            std::vector<std::vector<double>> extra = {}) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw Error("parameter", "sigma must lie in (0,1)");
    if (!(aperture > 0.0 && aperture <= 0.6))
        throw Error("parameter", "aperture must lie in (0, 0.6]");
    std::vector<double> pos =
        n_chains <= 1 ? std::vector<double>{0.0} : detail::log_spaced_line(n_chains, extent);

    double gmax = 0.0;
    std::vector<double> nngap(pos.size(), extent);
    for (std::size_t j = 0; j < pos.size(); ++j) {
        for (std::size_t l = 0; l < pos.size(); ++l)
            if (l != j) nngap[j] = std::min(nngap[j], std::abs(pos[l] - pos[j]));
        if (j + 1 < pos.size()) gmax = std::max(gmax, pos[j + 1] - pos[j]);
    }
    // wedges of adjacent positions overlap at gap / (2 aperture); a margin on
    // top of the widest gap makes the canopy row fully connected
    double canopy = pos.size() > 1 ? 1.15 * gmax / (2.0 * aperture) : extent;
    double step = std::log1p(0.8 * sigma);   // rung ratio, safely within admission
    double hspace = 0.65 * sigma;            // row spacing factor (times the height)
    long m_side = long(aperture / hspace);
    double ladder_top = canopy * std::pow(2.0, double(anchor_pow));

    std::vector<std::vector<double>> interior, boundary;
    std::vector<double> bdist;
    BoundaryFixture fx;
    auto push_interior = [&](double x, double y) {
        interior.push_back({x, y});
        bdist.push_back(y);
        return interior.size() - 1;
    };

    std::size_t center = 0;
    for (std::size_t j = 1; j < pos.size(); ++j)
        if (std::abs(pos[j]) < std::abs(pos[center])) center = j;

    std::vector<double> bottom(pos.size());
    double bottom_min = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pos.size(); ++j) {
        bottom[j] = nngap[j] * std::pow(2.0, -double(depth_pow)) * 0.5;
        bottom_min = std::min(bottom_min, bottom[j]);
    }

    fx.proxy_chains.resize(pos.size());
    long rows = long(std::floor(std::log(ladder_top / bottom_min) / step + 1e-9));
    for (long r = 0; r <= rows; ++r) {
        double y = ladder_top * std::exp(-step * double(r));
        if (y > canopy * 1.001) {  // anchor run above the canopy: center chain only
            std::size_t idx = push_interior(pos[center], y);
            fx.proxy_chains[center].push_back(idx);
            fx.anchor_nodes.push_back(idx);
            continue;
        }
        // center columns first (always kept: they are the proxy chains), then
        // side columns deduplicated against everything already in the row
        std::vector<double> kept;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            if (y < bottom[j] * 0.999) continue;
            fx.proxy_chains[j].push_back(push_interior(pos[j], y));
            kept.insert(std::lower_bound(kept.begin(), kept.end(), pos[j]), pos[j]);
        }
        double spacing = hspace * y;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            if (y < bottom[j] * 0.999) continue;
            for (long i = -m_side; i <= m_side; ++i) {
                if (i == 0) continue;
                double x = pos[j] + double(i) * spacing;
                auto it = std::lower_bound(kept.begin(), kept.end(), x);
                bool close = (it != kept.end() && *it - x < 0.45 * spacing) ||
                             (it != kept.begin() && x - *(it - 1) < 0.45 * spacing);
                if (close) continue;
                push_interior(x, y);
                kept.insert(it, x);
            }
        }
        if (std::abs(y - canopy) < std::abs(interior[fx.w_index][1] - canopy))
            fx.w_index = fx.proxy_chains[center].back();  // base near the canopy
    }
    // rows were emitted top-down; the anchor run wants the farthest node last
    std::reverse(fx.anchor_nodes.begin(), fx.anchor_nodes.end());
    for (std::size_t j = 0; j < pos.size(); ++j) {
        if (fx.proxy_chains[j].size() < 2)
            throw Error("parameter", "wedge chain too short; lower depth_pow or sigma");
        boundary.push_back({pos[j], 0.0});
    }
    for (auto& p : extra) {
        if (p.size() != 2 || !(p[1] > 0.0))
            throw Error("parameter", "extra points must be (x, y) with y > 0");
        push_interior(p[0], p[1]);
    }

    fx.space = make_space(std::move(interior), std::move(boundary), true, &bdist);
    for (std::size_t b = 0; b < fx.space.n_boundary(); ++b)
        fx.boundary_labels.push_back(fx.space.labels[fx.space.n_interior + b]);
    return fx;
}

/// Medial-axis chain through the cusp {0 < y < x^2, 0 < x < 1}. The spacing
/// follows sigma * d(z) so the locality graph stays connected; refining
/// x_min drives the measured uniformity constant up without bound.
inline SampledSpace make_cusp_chain(double x_min, double sigma, std::size_t n_boundary = 400) {
    if (!(x_min > 0.0 && x_min < 1.0)) throw Error("parameter", "x_min must lie in (0,1)");
    std::vector<std::vector<double>> interior, boundary;
    for (double x : detail::cusp_boundary_samples_x(n_boundary / 2)) {
        boundary.push_back({x, 0.0});
        boundary.push_back({x, x * x});
    }
    double x = 0.95;
    while (x > x_min) {
        interior.push_back({x, 0.5 * x * x});
        // d(z) ~ x^2 / 2 near the axis; step a fraction of sigma * d
        x -= 0.35 * sigma * 0.5 * x * x / std::sqrt(1.0 + x * x);
    }
    return make_space(std::move(interior), std::move(boundary), false, nullptr);
}

}  // namespace hypmet
