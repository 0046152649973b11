#pragma once

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypmet/boundary.hpp"
#include "hypmet/core.hpp"
#include "hypmet/distortion.hpp"
#include "hypmet/gromov.hpp"
#include "hypmet/sampling.hpp"

namespace hypmet {

using json = nlohmann::json;

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

inline double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    try {
        std::size_t used = 0;
        double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw Error("parse", "non-numeric cell at row " + std::to_string(row) + ", column " +
                                 std::to_string(col) + ": '" + cell + "'");
    }
}

inline std::string fmt17(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace detail

// ---- matrices ----

inline void save_matrix_csv(const MetricMatrix& m, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < m.labels.size(); ++i)
        f << (i ? "," : "") << m.labels[i];
    f << "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j)
            f << (j ? "," : "") << detail::fmt17(m.values(i, j));
        f << "\n";
    }
}

inline MetricMatrix load_matrix_csv(const std::string& path,
                                    MetricKind kind = MetricKind::d) {
    std::ifstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw Error("parse", "empty file '" + path + "'");
    MetricMatrix m;
    m.kind = kind;
    m.labels = detail::split_csv_line(line);
    std::size_t n = m.labels.size();
    m.values = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(f, line))
            throw Error("parse", "expected " + std::to_string(n) + " rows, got " +
                                     std::to_string(i));
        auto cells = detail::split_csv_line(line);
        if (cells.size() != n)
            throw Error("parse", "row " + std::to_string(i + 2) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(n));
        for (std::size_t j = 0; j < n; ++j)
            m.values(i, j) = detail::parse_cell(cells[j], i + 2, j + 1);
    }
    auto rep = validate_metric(m);
    for (const auto& v : rep.violations)
        if (v.axiom == "symmetry")
            throw Error("validation", "loaded matrix is not symmetric at (" +
                                          std::to_string(v.i) + "," + std::to_string(v.j) + ")");
    return m;
}

inline json matrix_to_json(const MetricMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.size(); ++j) row.push_back(m.values(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"labels", m.labels}, {"matrix", rows}, {"kind", to_string(m.kind)}};
}

inline MetricMatrix matrix_from_json(const json& j) {
    MetricMatrix m;
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.kind = metric_kind_from_string(j.value("kind", "d"));
    std::size_t n = m.labels.size();
    m.values = SquareMatrix(n);
    const auto& rows = j.at("matrix");
    if (rows.size() != n) throw Error("parse", "matrix row count does not match labels");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jx = 0; jx < n; ++jx) m.values(i, jx) = rows[i][jx].get<double>();
    return m;
}

// ---- sampled spaces ----

inline json space_to_json(const SampledSpace& s) {
    json dist = json::array();
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < s.labels.size(); ++j) row.push_back(s.dist(i, j));
        dist.push_back(std::move(row));
    }
    return json{{"labels", s.labels},       {"coords", s.coords},
                {"n_interior", s.n_interior}, {"dist", dist},
                {"bdist", s.bdist},         {"is_unbounded", s.is_unbounded}};
}

inline SampledSpace space_from_json(const json& j) {
    SampledSpace s;
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.coords = j.at("coords").get<std::vector<std::vector<double>>>();
    s.n_interior = j.at("n_interior").get<std::size_t>();
    s.bdist = j.at("bdist").get<std::vector<double>>();
    s.is_unbounded = j.at("is_unbounded").get<bool>();
    std::size_t n = s.labels.size();
    s.dist = SquareMatrix(n);
    const auto& rows = j.at("dist");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t jx = 0; jx < n; ++jx) s.dist(i, jx) = rows[i][jx].get<double>();
    return s;
}

inline void save_space_json(const SampledSpace& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "' for writing");
    f << space_to_json(s).dump(1);
}

inline SampledSpace load_space_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw Error("parse", std::string("bad JSON in '") + path + "': " + e.what());
    }
    return space_from_json(j);
}

/// Point cloud CSV: coordinate columns then a trailing "role" column with
/// values interior|boundary.
inline void save_space_csv(const SampledSpace& s, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "' for writing");
    if (s.coords.empty() || s.coords[0].empty())
        throw Error("io", "space has no coordinates; use the JSON format");
    for (std::size_t c = 0; c < s.coords[0].size(); ++c) f << "x" << c + 1 << ",";
    f << "role\n";
    for (std::size_t i = 0; i < s.coords.size(); ++i) {
        for (double v : s.coords[i]) f << detail::fmt17(v) << ",";
        f << (i < s.n_interior ? "interior" : "boundary") << "\n";
    }
}

inline SampledSpace load_space_csv(const std::string& path, bool unbounded = true) {
    std::ifstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw Error("parse", "empty file '" + path + "'");
    auto header = detail::split_csv_line(line);
    if (header.empty() || header.back() != "role")
        throw Error("parse", "last CSV column must be 'role'");
    std::size_t dim = header.size() - 1;
    std::vector<std::vector<double>> interior, boundary;
    std::size_t row = 1;
    while (std::getline(f, line)) {
        ++row;
        if (line.empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (cells.size() != dim + 1)
            throw Error("parse", "row " + std::to_string(row) + " has " +
                                     std::to_string(cells.size()) + " cells");
        std::vector<double> p(dim);
        for (std::size_t c = 0; c < dim; ++c) p[c] = detail::parse_cell(cells[c], row, c + 1);
        if (cells[dim] == "interior")
            interior.push_back(std::move(p));
        else if (cells[dim] == "boundary")
            boundary.push_back(std::move(p));
        else
            throw Error("parse", "row " + std::to_string(row) + ": role must be "
                                 "interior or boundary, got '" + cells[dim] + "'");
    }
    return make_space(std::move(interior), std::move(boundary), unbounded);
}

// ---- reports ----

inline json delta_report_to_json(const DeltaReport& r) {
    return json{{"delta", r.delta},
                {"witness", r.witness},
                {"mode", r.mode == DeltaMode::exhaustive ? "exhaustive" : "sampled"},
                {"quadruples_checked", r.quadruples_checked},
                {"seed", r.seed}};
}

inline json rough_similarity_to_json(const RoughSimilarityReport& r) {
    return json{{"lambda", r.lambda},
                {"mu", r.mu},
                {"max_residual", r.max_residual},
                {"cobounded_gap", r.cobounded_gap}};
}

inline json distortion_report_to_json(const DistortionReport& r, bool with_samples = false) {
    json out{{"fit_C", r.fit.C},
             {"fit_alpha", r.fit.alpha},
             {"residual_rms", r.fit.residual_rms},
             {"correlation", r.correlation},
             {"regime", r.regime == DistortionRegime::qs ? "qs" : "qm"},
             {"n_samples", r.samples.size()},
             {"skipped", r.skipped},
             {"seed", r.seed},
             {"metadata", r.metadata}};
    if (with_samples) {
        json arr = json::array();
        for (const auto& s : r.samples) arr.push_back({s.t, s.ratio});
        out["samples"] = std::move(arr);
    }
    return out;
}

/// Scatter CSV for external plotting: t, ratio, branch.
inline void save_scatter_csv(const DistortionReport& r, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "' for writing");
    f << "t,ratio,branch\n";
    for (const auto& s : r.samples)
        f << detail::fmt17(s.t) << "," << detail::fmt17(s.ratio) << ","
          << (s.t < 1.0 ? "lt1" : "ge1") << "\n";
}

inline json boundary_metric_to_json(const BoundaryMetric& bm) {
    json rho = json::array(), dmat = json::array();
    for (std::size_t i = 0; i < bm.rho.size(); ++i) {
        json r1 = json::array(), r2 = json::array();
        for (std::size_t j = 0; j < bm.rho.size(); ++j) {
            r1.push_back(bm.rho(i, j));
            r2.push_back(bm.dmat(i, j));
        }
        rho.push_back(std::move(r1));
        dmat.push_back(std::move(r2));
    }
    return json{{"labels", bm.labels},
                {"rho", rho},
                {"dmat", dmat},
                {"base_kind",
                 bm.base_kind == BoundaryBase::visual_at_w ? "visual_at_w" : "hamenstadt_at_b"},
                {"epsilon", bm.epsilon},
                {"delta_used", bm.delta_used},
                {"max_interval_width", bm.max_interval_width}};
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("io", "cannot open '" + path + "' for writing");
    f << j.dump(1) << "\n";
}

}  // namespace hypmet
