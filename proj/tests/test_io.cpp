#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>

#include "hypmet/io.hpp"
#include "hypmet/metrics.hpp"
#include "hypmet/reports.hpp"

using namespace hypmet;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("/tmp/hypmet_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
};

MetricMatrix small_metric() {
    SamplerSpec spec;
    spec.family = Family::punctured_plane;
    spec.n_interior = 8;
    spec.seed = 19;
    return h_metric(sample(spec));
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    f << text;
}

}  // namespace

TEST_CASE("matrix CSV round trip is bit exact") {
    auto m = small_metric();
    TempFile tmp("matrix.csv");
    save_matrix_csv(m, tmp.path);
    auto back = load_matrix_csv(tmp.path, MetricKind::h);
    CHECK(back.labels == m.labels);
    CHECK(back.kind == MetricKind::h);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j) CHECK(back.values(i, j) == m.values(i, j));
}

TEST_CASE("matrix JSON round trip is bit exact") {
    auto m = small_metric();
    auto back = matrix_from_json(matrix_to_json(m));
    CHECK(back.labels == m.labels);
    CHECK(back.kind == m.kind);
    CHECK(back.values.data() == m.values.data());
}

TEST_CASE("CSV parse errors carry row and column positions") {
    TempFile tmp("bad.csv");
    write_text(tmp.path, "a,b\n0,oops\n1,0\n");
    try {
        load_matrix_csv(tmp.path);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == "parse");
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
}

TEST_CASE("CSV loading rejects wrong shapes and asymmetry") {
    TempFile tmp("shape.csv");
    SUBCASE("missing row") {
        write_text(tmp.path, "a,b\n0,1\n");
        CHECK_THROWS_AS(load_matrix_csv(tmp.path), Error);
    }
    SUBCASE("ragged row") {
        write_text(tmp.path, "a,b\n0,1\n1\n");
        CHECK_THROWS_AS(load_matrix_csv(tmp.path), Error);
    }
    SUBCASE("asymmetric matrix") {
        write_text(tmp.path, "a,b\n0,1\n2,0\n");
        try {
            load_matrix_csv(tmp.path);
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.kind() == "validation");
        }
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_matrix_csv("/tmp/does_not_exist_hypmet.csv"), Error);
    }
}

TEST_CASE("space JSON round trip preserves everything") {
    SamplerSpec spec;
    spec.family = Family::half_plane;
    spec.n_interior = 10;
    spec.seed = 2;
    auto s = sample(spec);
    TempFile tmp("space.json");
    save_space_json(s, tmp.path);
    auto back = load_space_json(tmp.path);
    CHECK(back.labels == s.labels);
    CHECK(back.coords == s.coords);
    CHECK(back.n_interior == s.n_interior);
    CHECK(back.bdist == s.bdist);
    CHECK(back.is_unbounded == s.is_unbounded);
    CHECK(back.dist.data() == s.dist.data());
}

TEST_CASE("point cloud CSV round trip rebuilds the same geometry") {
    SamplerSpec spec;
    spec.family = Family::half_plane;
    spec.n_interior = 10;
    spec.seed = 2;
    auto s = sample(spec);
    TempFile tmp("cloud.csv");
    save_space_csv(s, tmp.path);
    auto back = load_space_csv(tmp.path, true);
    CHECK(back.n_interior == s.n_interior);
    CHECK(back.coords == s.coords);
    // bdist is recomputed from samples here, not analytic: upper bound only
    for (std::size_t i = 0; i < s.n_interior; ++i) CHECK(back.bdist[i] >= s.bdist[i] - 1e-12);
}

TEST_CASE("point cloud CSV validates roles and headers") {
    TempFile tmp("roles.csv");
    SUBCASE("bad role") {
        write_text(tmp.path, "x1,x2,role\n0,1,interior\n0,0,edge\n");
        CHECK_THROWS_AS(load_space_csv(tmp.path), Error);
    }
    SUBCASE("missing role header") {
        write_text(tmp.path, "x1,x2\n0,1\n");
        CHECK_THROWS_AS(load_space_csv(tmp.path), Error);
    }
}

TEST_CASE("report serializers expose the pinned fields") {
    auto m = small_metric();
    auto dr = delta_hyperbolicity(m);
    auto dj = delta_report_to_json(dr);
    CHECK(dj.at("delta").get<double>() == dr.delta);
    CHECK(dj.at("mode") == "exhaustive");

    auto qs = qs_distortion(m, m.scaled(2.0), 2000, 5);
    auto qj = distortion_report_to_json(qs, true);
    CHECK(qj.at("fit_alpha").get<double>() == qs.fit.alpha);
    CHECK(qj.at("samples").size() == qs.samples.size());
    CHECK(qj.at("regime") == "qs");

    auto rj = rough_similarity_to_json(rough_similarity_check(m, m.scaled(2.0)));
    CHECK(rj.at("lambda").get<double>() == doctest::Approx(2.0));
}

TEST_CASE("scatter CSV labels the branches around t = 1") {
    DistortionReport rep;
    rep.samples = {{0.5, 2.0}, {2.0, 3.0}};
    TempFile tmp("scatter.csv");
    save_scatter_csv(rep, tmp.path);
    std::ifstream f(tmp.path);
    std::string line;
    std::getline(f, line);
    CHECK(line == "t,ratio,branch");
    std::getline(f, line);
    CHECK(line.find("lt1") != std::string::npos);
    std::getline(f, line);
    CHECK(line.find("ge1") != std::string::npos);
}
