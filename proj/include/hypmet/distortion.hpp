#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hypmet/core.hpp"

namespace hypmet {

struct DistortionSample {
    double t = 0.0;      // source-side ratio (or cross ratio)
    double ratio = 0.0;  // target-side ratio (or cross ratio)
};

struct EnvelopeFit {
    double C = 1.0;
    double alpha = 0.0;
    double residual_rms = 0.0;
};

enum class DistortionRegime { qs, qm };

struct DistortionReport {
    std::vector<DistortionSample> samples;
    EnvelopeFit fit;
    double correlation = 0.0;  // Pearson correlation of (log t, log ratio); fit-quality gate
    DistortionRegime regime = DistortionRegime::qs;
    std::size_t skipped = 0;   // degenerate triples/quadruples dropped
    std::uint64_t seed = 0;
    std::string metadata;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    double pos = q * double(sorted.size() - 1);
    std::size_t lo = std::size_t(pos);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = pos - double(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace detail

/// Upper envelope power law ratio <= C t^alpha, fitted as quantile-level
/// regression in log-log coordinates: equal-count bins over log t, the
/// per-bin `level` quantile of log ratio, least squares through the bin
/// representatives. The quantile keeps finite-sample artifacts near
/// degenerate configurations from dominating the envelope.
inline EnvelopeFit fit_envelope(const std::vector<DistortionSample>& samples,
                                double level = 0.99) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples)
        if (s.t > 0.0 && s.ratio > 0.0) pts.push_back({std::log(s.t), std::log(s.ratio)});
    if (pts.size() < 2) throw Error("degenerate", "not enough usable samples for the envelope");
    std::sort(pts.begin(), pts.end());

    std::size_t nb = std::clamp<std::size_t>(pts.size() / 50, 4, 16);
    if (pts.size() < 2 * nb) nb = 2;
    std::vector<double> bx, by;
    std::size_t chunk = pts.size() / nb;
    for (std::size_t b = 0; b < nb; ++b) {
        std::size_t lo = b * chunk;
        std::size_t hi = (b + 1 == nb) ? pts.size() : lo + chunk;
        // Keep the (x, y) pair realizing the bin's y-quantile, so exact power
        // laws are recovered exactly instead of being smeared to bin centers.
        std::vector<std::pair<double, double>> bin(pts.begin() + std::ptrdiff_t(lo),
                                                   pts.begin() + std::ptrdiff_t(hi));
        std::sort(bin.begin(), bin.end(),
                  [](const auto& a, const auto& c) { return a.second < c.second; });
        std::size_t q = std::min(bin.size() - 1,
                                 std::size_t(std::ceil(level * double(bin.size() - 1))));
        bx.push_back(bin[q].first);
        by.push_back(bin[q].second);
    }

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < bx.size(); ++i) {
        mx += bx[i];
        my += by[i];
    }
    mx /= double(bx.size());
    my /= double(by.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < bx.size(); ++i) {
        sxx += (bx[i] - mx) * (bx[i] - mx);
        sxy += (bx[i] - mx) * (by[i] - my);
    }
    EnvelopeFit fit;
    fit.alpha = sxx > 0.0 ? sxy / sxx : 0.0;
    double logc = my - fit.alpha * mx;
    fit.C = std::exp(logc);
    double ss = 0.0;
    for (std::size_t i = 0; i < bx.size(); ++i) {
        double r = by[i] - (logc + fit.alpha * bx[i]);
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / double(bx.size()));
    return fit;
}

inline double log_correlation(const std::vector<DistortionSample>& samples) {
    double mx = 0.0, my = 0.0;
    std::size_t n = 0;
    for (const auto& s : samples)
        if (s.t > 0.0 && s.ratio > 0.0) {
            mx += std::log(s.t);
            my += std::log(s.ratio);
            ++n;
        }
    if (n < 2) return 0.0;
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const auto& s : samples)
        if (s.t > 0.0 && s.ratio > 0.0) {
            double dx = std::log(s.t) - mx, dy = std::log(s.ratio) - my;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    if (sxx <= 0.0 || syy <= 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

/// Quasisymmetric distortion of the identity correspondence: for seeded
/// triples (x,y,z), t = Ma(x,y)/Ma(x,z) against ratio = Mb(x,y)/Mb(x,z).
inline DistortionReport qs_distortion(const MetricMatrix& ma, const MetricMatrix& mb,
                                      std::size_t triple_budget, std::uint64_t seed,
                                      double quantile_level = 0.99) {
    if (ma.labels != mb.labels)
        throw Error("label-mismatch", "matrices cover different label sets");
    std::size_t n = ma.size();
    if (n < 3) throw Error("parameter", "need at least three labels");
    DistortionReport rep;
    rep.regime = DistortionRegime::qs;
    rep.seed = seed;
    SplitMix64 rng(seed);
    for (std::size_t it = 0; it < triple_budget; ++it) {
        std::size_t x = rng.next_below(n), y = rng.next_below(n), z = rng.next_below(n);
        if (x == y || x == z || y == z) {
            ++rep.skipped;
            continue;
        }
        double axz = ma.values(x, z), bxz = mb.values(x, z);
        if (axz <= 0.0 || bxz <= 0.0 || ma.values(x, y) <= 0.0 || mb.values(x, y) <= 0.0) {
            ++rep.skipped;
            continue;
        }
        rep.samples.push_back({ma.values(x, y) / axz, mb.values(x, y) / bxz});
    }
    if (rep.samples.empty()) throw Error("degenerate", "every sampled triple was degenerate");
    rep.fit = fit_envelope(rep.samples, quantile_level);
    rep.correlation = log_correlation(rep.samples);
    return rep;
}

/// Quasimobius distortion: cross ratios of seeded quadruples in Ma against
/// Mb. `infinity_on` treats one label of Ma as the point at infinity.
inline DistortionReport qm_distortion(const MetricMatrix& ma, const MetricMatrix& mb,
                                      std::size_t quad_budget, std::uint64_t seed,
                                      std::optional<std::string> infinity_on = {},
                                      double quantile_level = 0.99) {
    if (ma.labels != mb.labels)
        throw Error("label-mismatch", "matrices cover different label sets");
    std::size_t n = ma.size();
    if (n < 4) throw Error("parameter", "need at least four labels");
    std::optional<std::size_t> inf_idx;
    if (infinity_on) inf_idx = ma.index_of(*infinity_on);
    DistortionReport rep;
    rep.regime = DistortionRegime::qm;
    rep.seed = seed;
    SplitMix64 rng(seed);
    auto tau = [&](const MetricMatrix& m, std::size_t x, std::size_t y, std::size_t z,
                   std::size_t w, bool w_at_infinity) -> std::optional<double> {
        double num, den;
        if (w_at_infinity) {
            num = m.values(x, z);
            den = m.values(x, y);
        } else {
            num = m.values(x, z) * m.values(y, w);
            den = m.values(x, y) * m.values(z, w);
        }
        if (den <= 0.0 || num <= 0.0) return std::nullopt;
        return num / den;
    };
    for (std::size_t it = 0; it < quad_budget; ++it) {
        std::size_t x = rng.next_below(n), y = rng.next_below(n);
        std::size_t z = rng.next_below(n), w = rng.next_below(n);
        if (x == y || x == z || x == w || y == z || y == w || z == w) {
            ++rep.skipped;
            continue;
        }
        bool winf = inf_idx && *inf_idx == w;
        auto ta = tau(ma, x, y, z, w, winf);
        auto tb = tau(mb, x, y, z, w, false);
        if (!ta || !tb) {
            ++rep.skipped;
            continue;
        }
        rep.samples.push_back({*ta, *tb});
    }
    if (rep.samples.empty()) throw Error("degenerate", "every sampled quadruple was degenerate");
    rep.fit = fit_envelope(rep.samples, quantile_level);
    rep.correlation = log_correlation(rep.samples);
    return rep;
}

}  // namespace hypmet
