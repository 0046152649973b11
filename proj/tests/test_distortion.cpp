#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hypmet/distortion.hpp"
#include "hypmet/reports.hpp"

using namespace hypmet;

namespace {

// Metric on labels q0..q{n-1} with d(i,j) = |x_i - x_j| for geometric x.
MetricMatrix geometric_line(std::size_t n, double ratio) {
    MetricMatrix m;
    m.values = SquareMatrix(n);
    std::vector<double> xs;
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        m.labels.push_back("q" + std::to_string(i));
        xs.push_back(v);
        v *= ratio;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m.values(i, j) = std::abs(xs[i] - xs[j]);
    return m;
}

MetricMatrix entrywise_power(const MetricMatrix& m, double p) {
    MetricMatrix out = m;
    for (double& v : out.values.data()) v = v > 0.0 ? std::pow(v, p) : 0.0;
    return out;
}

std::vector<DistortionSample> power_law_samples(double C, double alpha, std::size_t n) {
    std::vector<DistortionSample> s;
    SplitMix64 rng(3);
    for (std::size_t i = 0; i < n; ++i) {
        double t = std::exp((rng.next_double() - 0.5) * 8.0);
        s.push_back({t, C * std::pow(t, alpha)});
    }
    return s;
}

}  // namespace

TEST_CASE("fit_envelope recovers an exact power law") {
    auto fit = fit_envelope(power_law_samples(2.5, 1.7, 2000));
    CHECK(fit.alpha == doctest::Approx(1.7).epsilon(1e-9));
    CHECK(fit.C == doctest::Approx(2.5).epsilon(1e-6));
    CHECK(fit.residual_rms < 1e-9);
}

TEST_CASE("fit_envelope tracks the upper envelope, not the bulk") {
    auto samples = power_law_samples(2.0, 0.8, 3000);
    // push most points far below the envelope; the 0.99 quantile should
    // still see the C t^alpha ceiling
    SplitMix64 rng(9);
    for (auto& s : samples)
        if (rng.next_double() < 0.9) s.ratio *= 0.01 + 0.2 * rng.next_double();
    auto fit = fit_envelope(samples);
    CHECK(fit.alpha == doctest::Approx(0.8).epsilon(0.1));
    CHECK(fit.C == doctest::Approx(2.0).epsilon(0.35));
}

TEST_CASE("fit_envelope needs at least two usable samples") {
    CHECK_THROWS_AS(fit_envelope({{1.0, 2.0}}), Error);
    CHECK_THROWS_AS(fit_envelope({{0.0, 2.0}, {1.0, 0.0}}), Error);
}

TEST_CASE("log_correlation is 1 for a power law and near 0 for noise") {
    CHECK(log_correlation(power_law_samples(1.0, 2.0, 500)) == doctest::Approx(1.0));
    std::vector<DistortionSample> noise;
    SplitMix64 rng(4);
    for (int i = 0; i < 4000; ++i)
        noise.push_back({std::exp(rng.next_double() * 4.0 - 2.0),
                         std::exp(rng.next_double() * 4.0 - 2.0)});
    CHECK(std::abs(log_correlation(noise)) < 0.1);
}

TEST_CASE("qs distortion of a similarity has exponent 1") {
    auto ma = geometric_line(24, 1.4);
    auto rep = qs_distortion(ma, ma.scaled(5.0), 20000, 2);
    CHECK(rep.fit.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rep.correlation == doctest::Approx(1.0));
    CHECK(rep.regime == DistortionRegime::qs);
    CHECK_FALSE(rep.samples.empty());
}

TEST_CASE("qs distortion of a snowflake has the snowflake exponent") {
    auto ma = geometric_line(24, 1.4);
    auto rep = qs_distortion(ma, entrywise_power(ma, 0.5), 20000, 2);
    CHECK(rep.fit.alpha == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("qm distortion compares cross ratios; snowflake gives the power") {
    auto ma = geometric_line(20, 1.5);
    auto rep = qm_distortion(ma, entrywise_power(ma, 0.7), 40000, 6);
    CHECK(rep.regime == DistortionRegime::qm);
    CHECK(rep.fit.alpha == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(rep.correlation == doctest::Approx(1.0));
}

TEST_CASE("qm distortion with a label pinned at infinity still fits") {
    auto ma = geometric_line(20, 1.5);
    auto rep = qm_distortion(ma, ma.scaled(2.0), 40000, 6, std::string("q19"));
    CHECK(std::isfinite(rep.fit.alpha));
    CHECK(rep.samples.size() + rep.skipped == 40000);
}

TEST_CASE("distortion inputs are validated") {
    auto ma = geometric_line(10, 1.3);
    auto mb = ma;
    mb.labels[0] = "renamed";
    CHECK_THROWS_AS(qs_distortion(ma, mb, 100, 1), Error);
    CHECK_THROWS_AS(qm_distortion(ma, mb, 100, 1), Error);
    auto tiny = geometric_line(3, 1.3);
    CHECK_THROWS_AS(qm_distortion(tiny, tiny, 100, 1), Error);
}

TEST_CASE("identical seeds reproduce identical reports") {
    auto ma = geometric_line(15, 1.6);
    auto mb = entrywise_power(ma, 0.9);
    auto r1 = qs_distortion(ma, mb, 5000, 42);
    auto r2 = qs_distortion(ma, mb, 5000, 42);
    CHECK(r1.samples.size() == r2.samples.size());
    CHECK(r1.fit.alpha == r2.fit.alpha);
    CHECK(r1.fit.C == r2.fit.C);
}

TEST_CASE("shuffled correspondence destroys the fit quality") {
    auto ma = geometric_line(30, 1.35);
    auto mb = entrywise_power(ma, 1.2);
    double good = qs_distortion(ma, mb, 20000, 3).correlation;
    double bad = qs_distortion(ma, shuffled_correspondence(mb, 8), 20000, 3).correlation;
    CHECK(good > 0.99);
    CHECK(bad < 0.5);
}
