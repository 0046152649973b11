#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypmet/reports.hpp"

using namespace hypmet;

TEST_CASE("delta_estimate matches the exhaustive scan on small matrices") {
    SamplerSpec spec;
    spec.family = Family::exterior_disk;
    spec.n_interior = 25;
    spec.seed = 44;
    auto h = h_metric(sample(spec));
    auto est = delta_estimate(h);
    auto full = delta_hyperbolicity(h);
    CHECK(est.delta == doctest::Approx(full.delta));
    CHECK(est.mode == DeltaMode::exhaustive);
}

TEST_CASE("delta_estimate on large matrices stays below the true constant's bound") {
    auto fx = make_half_plane_comb(3, 3.0, 0.15, 0.25, 4, 3);
    auto g = build_qh_graph(fx.space, 0.15);
    auto est = delta_estimate(g.khat(), 0, 11, 60, 100000);
    CHECK(est.mode == DeltaMode::sampled);
    CHECK(est.delta > 0.0);
    CHECK(est.delta < 2.0);  // half-plane scale; a gross blowup means a bug
}

TEST_CASE("hamenstadt_epsilon_bound inverts the factor-2 quasimetric condition") {
    double delta = 0.7;
    double eps = hamenstadt_epsilon_bound(delta);
    CHECK(std::exp(22.0 * eps * delta) == doctest::Approx(2.0));
    CHECK_NOTHROW(check_hamenstadt_epsilon(0.999 * eps, delta));
}

TEST_CASE("theorem1 pipeline passes on a half-plane fixture") {
    auto fx = make_h_fixture(Family::half_plane, 40, 15, 4.0, 5);
    auto rep = theorem1_report(fx, 0.02);
    CHECK(rep.pass);
    CHECK(rep.epsilon == 0.02);
    CHECK(rep.expected_alpha == doctest::Approx(50.0));
    CHECK(std::abs(rep.qs.fit.alpha - 50.0) < 12.5);
    CHECK(rep.frink_ok);
    CHECK(rep.negative_control_rejected);
    CHECK(rep.delta_used == doctest::Approx(std::log(4.0)));
}

TEST_CASE("theorem1 clamps epsilon to the Hamenstadt bound") {
    auto fx = make_h_fixture(Family::half_plane, 40, 12, 4.0, 5);
    auto rep = theorem1_report(fx, 10.0);
    CHECK(rep.epsilon < hamenstadt_epsilon_bound(std::log(4.0)));
    CHECK(rep.expected_alpha == doctest::Approx(1.0 / rep.epsilon));
}

TEST_CASE("theorem1 requires an unbounded space") {
    BoundaryFixture fx;
    fx.space = make_cusp_chain(0.4, 0.2, 40);
    CHECK_THROWS_AS(theorem1_report(fx, 0.02), Error);
}

TEST_CASE("corollary1 pipeline: rough similarity within 2 log 2 and exponent near 2") {
    auto fx = make_h_fixture(Family::half_plane, 40, 15, 4.0, 5);
    auto rep = corollary1_report(fx, 0.02, 0.02);
    CHECK(rep.pass);
    CHECK(rep.rough.mu <= rep.mu_bound + 1e-9);
    CHECK(std::abs(rep.qs.fit.alpha - 2.0) < 0.5);
}

TEST_CASE("theorem2 pipeline passes on a wedge comb") {
    double sigma = 0.15;
    auto fx = make_half_plane_comb(5, 3.0, sigma, 0.25, 4, 4);
    auto g = build_qh_graph(fx.space, sigma);
    auto uni = uniformity_estimate(fx.space, g, 400, 2);
    auto rep = theorem2_report(fx, g, uni);
    CHECK(rep.pass);
    CHECK(rep.case2_ok);
    CHECK(rep.case1_ok);
    CHECK(std::abs(rep.fit_lt1.alpha - rep.epsilon) <= 0.25 * rep.epsilon);
    CHECK(rep.a_hat == uni.A_hat);
}

TEST_CASE("theorem2 verdict honors a pre-raised uniformity warning") {
    double sigma = 0.15;
    auto fx = make_half_plane_comb(5, 3.0, sigma, 0.25, 4, 4);
    auto g = build_qh_graph(fx.space, sigma);
    auto uni = uniformity_estimate(fx.space, g, 200, 2);
    auto clean = theorem2_report(fx, g, uni);
    CHECK(clean.pass);
    auto warned = theorem2_report(fx, g, uni, {}, {}, 0.25, true);
    CHECK(warned.uniformity_warning);
    CHECK_FALSE(warned.pass);
    CHECK(warned.case2_ok == clean.case2_ok);  // fits themselves are unaffected
}

TEST_CASE("corollary2 pipeline: exponent tracks the epsilon ratio") {
    double sigma = 0.15;
    auto fx = make_half_plane_comb(5, 3.0, sigma, 0.25, 4, 4);
    auto g = build_qh_graph(fx.space, sigma);
    auto two = corollary2_check(fx, g, 0.01, 0.02);
    CHECK(two.pass);
    CHECK(std::abs(two.qm.fit.alpha - 2.0) < 0.5);
    auto one = corollary2_check(fx, g, 0.015, 0.015);
    CHECK(std::abs(one.qm.fit.alpha - 1.0) < 0.1);
}

TEST_CASE("uniformity divergence gate") {
    CHECK(uniformity_diverges(2.0, 4.0));
    CHECK_FALSE(uniformity_diverges(2.0, 2.2));
}

TEST_CASE("shuffled_correspondence permutes rows and columns consistently") {
    SamplerSpec spec;
    spec.family = Family::punctured_plane;
    spec.n_interior = 12;
    spec.seed = 3;
    auto m = h_metric(sample(spec));
    auto sh = shuffled_correspondence(m, 5);
    CHECK(sh.labels == m.labels);
    CHECK(validate_metric(sh).ok());  // still a metric, just relabeled
    double same = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            same += std::abs(sh.values(i, j) - m.values(i, j));
    CHECK(same > 0.0);
}
