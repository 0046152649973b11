#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypmet/metrics.hpp"
#include "hypmet/sampling.hpp"

using namespace hypmet;

namespace {

// Punctured plane with two interior points on the positive axis at radii 1
// and 2 plus one at (-2, 0). All closed forms below were worked out by hand.
SampledSpace punctured_triple() {
    std::vector<double> bdist = {1.0, 2.0, 2.0};
    return make_space({{1.0, 0.0}, {2.0, 0.0}, {-2.0, 0.0}}, {{0.0, 0.0}}, true, &bdist);
}

}  // namespace

TEST_CASE("h on the punctured plane matches hand-computed values") {
    auto s = punctured_triple();
    auto h = h_metric(s);
    // d=1, dx=1, dy=2: 2 log((1+2)/sqrt(2))
    CHECK(h.at("p0", "p1") == doctest::Approx(2.0 * std::log(3.0 / std::sqrt(2.0))));
    // d=3, dx=1, dy=2: 2 log((3+2)/sqrt(2))
    CHECK(h.at("p0", "p2") == doctest::Approx(2.0 * std::log(5.0 / std::sqrt(2.0))));
    // d=4, dx=dy=2: 2 log((4+2)/2) = 2 log 3
    CHECK(h.at("p1", "p2") == doctest::Approx(2.0 * std::log(3.0)));
    CHECK(h.kind == MetricKind::h);
}

TEST_CASE("jtilde on the punctured plane matches hand-computed values") {
    auto s = punctured_triple();
    auto jt = jtilde_metric(s);
    // (1/2) log((1+1)(1+1/2)) = (1/2) log 3
    CHECK(jt.at("p0", "p1") == doctest::Approx(0.5 * std::log(3.0)));
    // (1/2) log((1+4/2)(1+4/2)) = log 3
    CHECK(jt.at("p1", "p2") == doctest::Approx(std::log(3.0)));
}

TEST_CASE("j on the punctured plane matches hand-computed values") {
    auto s = punctured_triple();
    auto j = j_metric(s);
    // log(1 + 1/min(1,2)) = log 2
    CHECK(j.at("p0", "p1") == doctest::Approx(std::log(2.0)));
    // log(1 + 4/2) = log 3
    CHECK(j.at("p1", "p2") == doctest::Approx(std::log(3.0)));
}

TEST_CASE("the three closed forms are genuine metrics on random samples") {
    for (auto family : {Family::half_plane, Family::punctured_plane, Family::exterior_disk}) {
        SamplerSpec spec;
        spec.family = family;
        spec.n_interior = 30;
        spec.seed = 12;
        auto s = sample(spec);
        CHECK(validate_metric(h_metric(s)).ok());
        CHECK(validate_metric(jtilde_metric(s)).ok());
        CHECK(validate_metric(j_metric(s)).ok());
    }
}

TEST_CASE("sandwich bound 2 jtilde <= h <= 2 jtilde + 2 log 2 on every pair") {
    SamplerSpec spec;
    spec.family = Family::exterior_disk;
    spec.n_interior = 60;
    spec.seed = 3;
    auto s = sample(spec);
    auto h = h_metric(s);
    auto jt = jtilde_metric(s);
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = i + 1; j < h.size(); ++j) {
            CHECK(h.values(i, j) >= 2.0 * jt.values(i, j) - 1e-12);
            CHECK(h.values(i, j) <= 2.0 * jt.values(i, j) + 2.0 * std::log(2.0) + 1e-12);
        }
}

TEST_CASE("j and jtilde are comparable: jtilde <= j <= 2 jtilde") {
    SamplerSpec spec;
    spec.family = Family::half_plane;
    spec.n_interior = 50;
    spec.seed = 8;
    auto s = sample(spec);
    auto j = j_metric(s);
    auto jt = jtilde_metric(s);
    for (std::size_t i = 0; i < j.size(); ++i)
        for (std::size_t l = i + 1; l < j.size(); ++l) {
            CHECK(j.values(i, l) >= jt.values(i, l) - 1e-12);
            CHECK(j.values(i, l) <= 2.0 * jt.values(i, l) + 1e-12);
        }
}

TEST_CASE("closed forms reject zero boundary distance") {
    SampledSpace s;
    s.labels = {"p0", "p1", "b0"};
    s.n_interior = 2;
    s.dist = SquareMatrix(3);
    s.dist(0, 1) = s.dist(1, 0) = 1.0;
    s.dist(0, 2) = s.dist(2, 0) = 1.0;
    s.dist(1, 2) = s.dist(2, 1) = 1.0;
    s.bdist = {1.0, 0.0};
    try {
        h_metric(s);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == "division-by-zero");
    }
}

TEST_CASE("metric scaling homogeneity: scaling d scales nothing in h's log arguments") {
    // h depends only on the ratios d(x,y)/d(x); rescaling the whole space is
    // an isometry for h, jtilde and j
    SamplerSpec spec;
    spec.family = Family::punctured_plane;
    spec.n_interior = 20;
    spec.seed = 4;
    auto s = sample(spec);
    auto h1 = h_metric(s);
    SampledSpace scaled = s;
    for (double& v : scaled.dist.data()) v *= 7.0;
    for (double& v : scaled.bdist) v *= 7.0;
    auto h2 = h_metric(scaled);
    for (std::size_t i = 0; i < h1.size(); ++i)
        for (std::size_t j = 0; j < h1.size(); ++j)
            CHECK(h1.values(i, j) == doctest::Approx(h2.values(i, j)));
}
