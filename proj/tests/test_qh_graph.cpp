#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypmet/metrics.hpp"
#include "hypmet/qh_graph.hpp"
#include "hypmet/sampling.hpp"

using namespace hypmet;

namespace {

// Vertical chain in the half-plane at geometric heights: the discrete
// quasihyperbolic distance along it approximates log(y_hi / y_lo), the exact
// value of the continuous metric between vertically aligned points.
SampledSpace vertical_chain(double y_lo, double y_hi, double ratio) {
    std::vector<std::vector<double>> interior;
    std::vector<double> bdist;
    for (double y = y_lo; y <= y_hi * (1.0 + 1e-12); y *= ratio) {
        interior.push_back({0.0, y});
        bdist.push_back(y);
    }
    return make_space(std::move(interior), {{0.0, 0.0}}, true, &bdist);
}

}  // namespace

TEST_CASE("edge admission follows the sigma-locality rule exactly") {
    std::vector<double> bdist = {1.0, 1.0, 1.0};
    auto s = make_space({{0.0, 1.0}, {0.09, 1.0}, {0.25, 1.0}}, {{0.0, 0.0}}, true, &bdist);
    auto g = build_qh_graph(s, 0.2);
    // d(p0,p1)=0.09 <= 0.2, admitted; d(p1,p2)=0.16 <= 0.2, admitted;
    // d(p0,p2)=0.25 > 0.2, rejected
    CHECK(g.adj[0].size() == 1);
    CHECK(g.adj[1].size() == 2);
    CHECK_THROWS_AS(g.edge_between(0, 2), Error);
    // midpoint-rule weight: 2 d / (d(x) + d(y))
    CHECK(g.edge_between(0, 1).weight == doctest::Approx(2.0 * 0.09 / 2.0));
    CHECK(g.edge_between(0, 1).dlen == doctest::Approx(0.09));
}

TEST_CASE("khat along a vertical chain matches the log oracle") {
    auto s = vertical_chain(1.0, std::exp(2.0), std::exp(0.02));
    auto g = build_qh_graph(s, 0.05);
    // endpoints are the first and last interior points
    std::size_t a = 0, b = s.n_interior - 1;
    double expected = std::log(s.coords[b][1] / s.coords[a][1]);
    CHECK(g.apsp(a, b) == doctest::Approx(expected).epsilon(1e-4));
    CHECK(g.khat().kind == MetricKind::k_graph);
}

TEST_CASE("khat dominates j minus the discretization slack") {
    auto fx = make_half_plane_comb(3, 2.0, 0.15, 0.3, 3, 2);
    auto g = build_qh_graph(fx.space, 0.15);
    auto j = j_metric(fx.space);
    for (std::size_t i = 0; i < g.size(); ++i)
        for (std::size_t l = i + 1; l < g.size(); ++l)
            CHECK(g.apsp(i, l) >= j.values(i, l) - 3.0 * 0.15);
}

TEST_CASE("disconnected graphs fail with the component decomposition") {
    // two clusters far apart relative to their boundary distance
    std::vector<double> bdist = {1.0, 1.0, 1.0};
    auto s = make_space({{0.0, 1.0}, {0.05, 1.0}, {10.0, 1.0}}, {{0.0, 0.0}}, true, &bdist);
    try {
        build_qh_graph(s, 0.2);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == "insufficient-sampling");
        CHECK(std::string(e.what()).find("2 components") != std::string::npos);
    }
}

TEST_CASE("sigma outside (0,1) is rejected") {
    auto s = vertical_chain(1.0, 2.0, 1.05);
    CHECK_THROWS_AS(build_qh_graph(s, 0.0), Error);
    CHECK_THROWS_AS(build_qh_graph(s, 1.0), Error);
}

TEST_CASE("shortest_path returns the node run and epsilon_short_check accepts it") {
    auto s = vertical_chain(1.0, 4.0, 1.1);
    auto g = build_qh_graph(s, 0.2);
    auto path = g.shortest_path(0, s.n_interior - 1);
    CHECK(path.front() == 0);
    CHECK(path.back() == s.n_interior - 1);
    auto res = epsilon_short_check(path, g, 1e-9);
    CHECK(res.ok);
    CHECK(res.path_weight == doctest::Approx(g.apsp(0, s.n_interior - 1)));
}

TEST_CASE("epsilon_short_check flags a detour subpath") {
    // triangle where going around is longer than the direct edge
    std::vector<double> bdist = {1.0, 1.0, 1.0};
    auto s = make_space({{0.0, 1.0}, {0.1, 1.0}, {0.05, 1.09}}, {{0.0, 0.0}}, true, &bdist);
    auto g = build_qh_graph(s, 0.2);
    auto res = epsilon_short_check({0, 2, 1}, g, 1e-6);
    CHECK_FALSE(res.ok);
    CHECK(res.bad_begin == 0);
    CHECK(res.bad_end == 2);
    // generous epsilon accepts the same detour
    CHECK(epsilon_short_check({0, 2, 1}, g, 1.0).ok);
}

TEST_CASE("uniformity_estimate is at least 1 and modest on a half-plane wedge") {
    auto fx = make_half_plane_comb(1, 4.0, 0.15, 0.3, 3, 2);
    auto g = build_qh_graph(fx.space, 0.15);
    auto est = uniformity_estimate(fx.space, g, 300, 5);
    CHECK(est.A_hat >= 1.0);
    CHECK(est.A_hat < 6.0);
    CHECK_FALSE(est.witnesses.empty());
}

TEST_CASE("cusp refinement drives the uniformity estimate up") {
    double sigma = 0.2;
    auto coarse = make_cusp_chain(0.4, sigma, 60);
    auto fine = make_cusp_chain(0.1, sigma, 60);
    auto gc = build_qh_graph(coarse, sigma);
    auto gf = build_qh_graph(fine, sigma);
    auto ac = uniformity_estimate(coarse, gc, 400, 5);
    auto af = uniformity_estimate(fine, gf, 400, 5);
    CHECK(af.A_hat > 1.5 * ac.A_hat);
}

TEST_CASE("uniformity_estimate clamps the budget to the available pairs") {
    auto s = vertical_chain(1.0, 2.0, 1.1);
    auto g = build_qh_graph(s, 0.2);
    auto est = uniformity_estimate(s, g, 1000000, 1);
    CHECK(est.witnesses.size() == g.size() * (g.size() - 1) / 2);
}
