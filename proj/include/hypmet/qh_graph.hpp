#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "hypmet/core.hpp"

namespace hypmet {

/// Locality graph discretizing the quasihyperbolic metric. Nodes are the
/// interior sample points; an edge (x,y) is admitted iff
/// d(x,y) <= sigma * min(d(x), d(y)), which keeps the segment inside the
/// ball B(x, d(x)) for sigma < 1. The edge weight 2 d(x,y)/(d(x)+d(y)) is the
/// midpoint rule for the density integral, with O(sigma^2) relative error.
struct QHGraph {
    struct Edge {
        std::size_t to;
        double weight;  // quasihyperbolic length of the segment
        double dlen;    // base-metric length of the segment
    };

    std::vector<std::string> labels;
    std::vector<std::vector<Edge>> adj;
    std::vector<double> node_bdist;  // d(x) per node
    double sigma = 0.0;
    SquareMatrix apsp;  // discrete quasihyperbolic distance k-hat

    std::size_t size() const { return labels.size(); }

    std::size_t index_of(const std::string& label) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == label) return i;
        throw Error("lookup", "unknown node '" + label + "'");
    }

    MetricMatrix khat() const {
        return MetricMatrix{labels, apsp, MetricKind::k_graph};
    }

    /// Single-source shortest paths with parent links.
    void dijkstra(std::size_t src, std::vector<double>& dist,
                  std::vector<std::size_t>& parent) const {
        std::size_t n = size();
        dist.assign(n, std::numeric_limits<double>::infinity());
        parent.assign(n, n);
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[src] = 0.0;
        heap.push({0.0, src});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (const Edge& e : adj[u]) {
                double nd = d + e.weight;
                if (nd < dist[e.to]) {
                    dist[e.to] = nd;
                    parent[e.to] = u;
                    heap.push({nd, e.to});
                }
            }
        }
    }

    /// Shortest path from u to v as a node index sequence.
    std::vector<std::size_t> shortest_path(std::size_t u, std::size_t v) const {
        std::vector<double> dist;
        std::vector<std::size_t> parent;
        dijkstra(u, dist, parent);
        if (!std::isfinite(dist[v]))
            throw Error("insufficient-sampling", "nodes lie in different components");
        std::vector<std::size_t> path{v};
        while (path.back() != u) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());
        return path;
    }

    const Edge& edge_between(std::size_t u, std::size_t v) const {
        for (const Edge& e : adj[u])
            if (e.to == v) return e;
        throw Error("invalid-path", "no edge between '" + labels[u] + "' and '" + labels[v] + "'");
    }
};

/// Builds the locality graph over the interior points of S and computes the
/// all-pairs matrix k-hat. Fails with the component decomposition if the
/// admission rule leaves the graph disconnected.
inline QHGraph build_qh_graph(const SampledSpace& s, double sigma, unsigned threads = 0) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw Error("parameter", "sigma must lie in (0,1)");
    std::size_t n = s.n_interior;
    QHGraph g;
    g.labels.assign(s.labels.begin(), s.labels.begin() + std::ptrdiff_t(n));
    g.node_bdist = s.bdist;
    g.sigma = sigma;
    g.adj.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double dij = s.dist(i, j);
            if (dij <= sigma * std::min(s.bdist[i], s.bdist[j])) {
                double w = 2.0 * dij / (s.bdist[i] + s.bdist[j]);
                g.adj[i].push_back({j, w, dij});
                g.adj[j].push_back({i, w, dij});
            }
        }

    // connectivity via BFS component labelling
    std::vector<std::size_t> comp(n, n);
    std::size_t ncomp = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (comp[i] != n) continue;
        std::vector<std::size_t> stack{i};
        comp[i] = ncomp;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            for (const auto& e : g.adj[u])
                if (comp[e.to] == n) {
                    comp[e.to] = ncomp;
                    stack.push_back(e.to);
                }
        }
        ++ncomp;
    }
    if (ncomp > 1) {
        std::vector<std::size_t> sizes(ncomp, 0);
        for (std::size_t c : comp) ++sizes[c];
        std::string msg = "graph has " + std::to_string(ncomp) + " components of sizes";
        for (std::size_t c = 0; c < ncomp; ++c) msg += " " + std::to_string(sizes[c]);
        throw Error("insufficient-sampling", msg);
    }

    g.apsp = SquareMatrix(n);
    parallel_chunks(n, threads, [&](std::size_t b, std::size_t e, unsigned) {
        std::vector<double> dist;
        std::vector<std::size_t> parent;
        for (std::size_t src = b; src < e; ++src) {
            g.dijkstra(src, dist, parent);
            for (std::size_t j = 0; j < n; ++j) g.apsp(src, j) = dist[j];
        }
    });
    return g;
}

struct ShortCheckResult {
    bool ok = false;
    double path_weight = 0.0;
    // first subpath violating the epsilon-short property, if any
    std::size_t bad_begin = 0, bad_end = 0;
};

/// True iff the path (and by the subcurve property every contiguous subpath)
/// has weight within epsilon of the shortest-path distance of its endpoints.
inline ShortCheckResult epsilon_short_check(const std::vector<std::size_t>& path,
                                            const QHGraph& g, double eps) {
    if (path.size() < 2) throw Error("invalid-path", "path needs at least two nodes");
    std::vector<double> prefix(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i)
        prefix[i] = prefix[i - 1] + g.edge_between(path[i - 1], path[i]).weight;

    ShortCheckResult res;
    res.path_weight = prefix.back();
    for (std::size_t i = 0; i < path.size(); ++i)
        for (std::size_t j = i + 1; j < path.size(); ++j) {
            double w = prefix[j] - prefix[i];
            if (w > g.apsp(path[i], path[j]) + eps + 1e-12) {
                res.ok = false;
                res.bad_begin = i;
                res.bad_end = j;
                return res;
            }
        }
    res.ok = true;
    return res;
}

struct UniformityWitness {
    std::size_t x = 0, y = 0;
    double length_ratio = 0.0;  // ell(gamma) / d(x,y)
    double cigar_ratio = 0.0;   // max over z of min(ell[x,z], ell[z,y]) / d(z)
};

struct UniformityEstimate {
    double A_hat = 1.0;
    std::vector<UniformityWitness> witnesses;
};

/// Estimates the uniformity constant A by measuring shortest k-hat paths as
/// candidate 1-short curves: the max over sampled pairs of the length ratio
/// and the cigar ratio. A lower estimate of the true A.
inline UniformityEstimate uniformity_estimate(const SampledSpace& s, const QHGraph& g,
                                              std::size_t pair_budget,
                                              std::uint64_t seed = 1) {
    std::size_t n = g.size();
    if (n < 2) throw Error("parameter", "need at least two nodes");
    std::size_t avail = n * (n - 1) / 2;
    if (pair_budget > avail) pair_budget = avail;  // clamp, all pairs covered below

    UniformityEstimate est;
    SplitMix64 rng(seed);
    std::vector<double> dist;
    std::vector<std::size_t> parent;
    std::size_t last_src = n;  // cache one Dijkstra tree per source

    for (std::size_t it = 0; it < pair_budget; ++it) {
        std::size_t x, y;
        if (pair_budget == avail) {  // exhaustive small case, deterministic order
            std::size_t r = it, i = 0;
            while (r >= n - 1 - i) { r -= n - 1 - i; ++i; }
            x = i;
            y = i + 1 + r;
        } else {
            x = rng.next_below(n);
            do { y = rng.next_below(n); } while (y == x);
        }
        if (x != last_src) {
            g.dijkstra(x, dist, parent);
            last_src = x;
        }
        std::vector<std::size_t> path{y};
        while (path.back() != x) path.push_back(parent[path.back()]);
        std::reverse(path.begin(), path.end());

        std::vector<double> dprefix(path.size(), 0.0);
        for (std::size_t i = 1; i < path.size(); ++i)
            dprefix[i] = dprefix[i - 1] + g.edge_between(path[i - 1], path[i]).dlen;
        double ell = dprefix.back();
        double dxy = s.dist(x, y);
        UniformityWitness w;
        w.x = x;
        w.y = y;
        w.length_ratio = dxy > 0.0 ? ell / dxy : 1.0;
        for (std::size_t i = 0; i < path.size(); ++i) {
            double cigar = std::min(dprefix[i], ell - dprefix[i]) / g.node_bdist[path[i]];
            w.cigar_ratio = std::max(w.cigar_ratio, cigar);
        }
        est.witnesses.push_back(w);
        est.A_hat = std::max({est.A_hat, w.length_ratio, w.cigar_ratio});
    }
    return est;
}

}  // namespace hypmet
