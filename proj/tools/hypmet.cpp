// hypmet: command-line front end for the hyperbolic-type metric library.
// Every subcommand writes its artifacts plus a manifest.json into a run
// directory; reports are deterministic given the same inputs and seeds
// (timestamps live only in the manifest).
//
// Exit codes: 0 = pass, 1 = assertion/theorem failure (the failing invariant
// is named on stderr), 2 = input or usage error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypmet/io.hpp"
#include "hypmet/reports.hpp"

using namespace hypmet;
namespace fs = std::filesystem;

namespace {

struct RunContext {
    fs::path dir;
    json manifest;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    explicit RunContext(const std::string& command, const std::string& run_dir) {
        const char* env = std::getenv("HYPMET_RUN_DIR");
        dir = !run_dir.empty() ? fs::path(run_dir) : fs::path(env ? env : "runs");
        dir /= command;
        fs::create_directories(dir);
        manifest["command"] = command;
        manifest["artifacts"] = json::array();
        manifest["parameters"] = json::object();
        manifest["tool_version"] = "1.0.0";
    }

    std::string artifact(const std::string& name) {
        manifest["artifacts"].push_back(name);
        return (dir / name).string();
    }

    void param(const std::string& key, const json& value) {
        manifest["parameters"][key] = value;
    }

    void input(const std::string& key, const std::string& path) {
        manifest["parameters"][key] = path;
        std::ifstream f(path, std::ios::binary);
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        char c;
        while (f.get(c)) h = (h ^ std::uint8_t(c)) * 1099511628211ULL;
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        manifest["input_hashes"][path] = buf;
    }

    void finish() {
        manifest["wall_seconds"] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        save_json(manifest, (dir / "manifest.json").string());
        std::printf("artifacts in %s\n", dir.string().c_str());
    }
};

int fail_invariant(const std::string& name) {
    std::fprintf(stderr, "FAILED invariant: %s\n", name.c_str());
    return 1;
}

MetricMatrix load_matrix_any(const std::string& path, MetricKind kind = MetricKind::d) {
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json")
        return matrix_from_json([&] {
            std::ifstream f(path);
            if (!f) throw Error("io", "cannot open '" + path + "'");
            json j;
            f >> j;
            return j;
        }());
    return load_matrix_csv(path, kind);
}

SampledSpace load_space_any(const std::string& path, bool unbounded) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
        return load_space_csv(path, unbounded);
    return load_space_json(path);
}

json theorem1_to_json(const Theorem1Report& r) {
    return json{{"epsilon", r.epsilon},
                {"delta_used", r.delta_used},
                {"expected_alpha", r.expected_alpha},
                {"qs", distortion_report_to_json(r.qs)},
                {"frink_ok", r.frink_ok},
                {"busemann_gap", r.busemann_gap},
                {"negative_control", distortion_report_to_json(r.negative_control)},
                {"negative_control_rejected", r.negative_control_rejected},
                {"pass", r.pass},
                {"direction", r.direction}};
}

json theorem2_to_json(const Theorem2Report& r) {
    return json{{"sigma", r.sigma},
                {"epsilon", r.epsilon},
                {"delta_used", r.delta_used},
                {"a_hat", r.a_hat},
                {"fit_lt1", {{"C", r.fit_lt1.C}, {"alpha", r.fit_lt1.alpha}}},
                {"fit_ge1", {{"C", r.fit_ge1.C}, {"alpha", r.fit_ge1.alpha}}},
                {"qs", distortion_report_to_json(r.qs)},
                {"uniformity_warning", r.uniformity_warning},
                {"case1_ok", r.case1_ok},
                {"case2_ok", r.case2_ok},
                {"pass", r.pass}};
}

json corollary1_to_json(const Corollary1Report& r) {
    return json{{"rough", rough_similarity_to_json(r.rough)},
                {"mu_bound", r.mu_bound},
                {"epsilon", r.epsilon},
                {"epsilon_prime", r.epsilon_prime},
                {"delta_h", r.delta_h},
                {"delta_jtilde", r.delta_jtilde},
                {"expected_alpha", r.expected_alpha},
                {"qs", distortion_report_to_json(r.qs)},
                {"pass", r.pass}};
}

json corollary2_to_json(const Corollary2Report& r) {
    return json{{"eps_visual", r.eps_visual},
                {"eps_hamenstadt", r.eps_hamenstadt},
                {"delta_used", r.delta_used},
                {"expected_alpha", r.expected_alpha},
                {"qm", distortion_report_to_json(r.qm)},
                {"pass", r.pass}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hyperbolic-type metrics, boundaries at infinity, distortion reports"};
    app.require_subcommand(1);

    std::string run_dir;
    unsigned threads = 0;
    app.add_option("--run-dir", run_dir, "artifact directory (default $HYPMET_RUN_DIR or ./runs)");
    app.add_option("--threads", threads, "worker cap, 0 = hardware");

    // ---- validate ----
    auto* c_validate = app.add_subcommand("validate", "check metric axioms of a matrix");
    std::string in_matrix;
    c_validate->add_option("--input", in_matrix, "matrix CSV or JSON")->required();

    // ---- sample ----
    auto* c_sample = app.add_subcommand("sample", "draw a deterministic family sample");
    SamplerSpec spec;
    std::string family_name = "half_plane", grading_name = "uniform";
    c_sample->add_option("--family", family_name, "half_plane|punctured_plane|exterior_disk|slit_plane|cusp_domain");
    c_sample->add_option("--n", spec.n_interior, "interior points");
    c_sample->add_option("--boundary", spec.n_boundary, "boundary samples");
    c_sample->add_option("--extent", spec.extent, "linear extent");
    c_sample->add_option("--seed", spec.seed, "splitmix64 seed");
    c_sample->add_option("--grading", grading_name, "uniform|boundary_graded");

    // ---- metric ----
    auto* c_metric = app.add_subcommand("metric", "compute h, jtilde, j or graph k");
    std::string in_space, kind_name = "h";
    double sigma = 0.1;
    c_metric->add_option("--space", in_space, "space JSON or point-cloud CSV")->required();
    c_metric->add_option("--kind", kind_name, "h|jtilde|j|k");
    c_metric->add_option("--sigma", sigma, "locality parameter for k");

    // ---- delta ----
    auto* c_delta = app.add_subcommand("delta", "four-point hyperbolicity constant");
    std::string mode_name = "exhaustive";
    std::size_t budget = 100000;
    std::uint64_t seed = 1;
    c_delta->add_option("--matrix", in_matrix, "matrix CSV or JSON")->required();
    c_delta->add_option("--mode", mode_name, "exhaustive|sampled");
    c_delta->add_option("--budget", budget, "sampled quadruples");
    c_delta->add_option("--seed", seed, "stream seed");

    // ---- busemann ----
    auto* c_busemann = app.add_subcommand(
        "busemann", "Busemann field on a half-plane wedge graph, with the analytic check");
    double b_sigma = 0.1, b_extent = 10.0;
    c_busemann->add_option("--sigma", b_sigma, "locality parameter");
    c_busemann->add_option("--extent", b_extent, "wedge extent");

    // ---- boundary ----
    auto* c_boundary = app.add_subcommand("boundary", "boundary metric of an h fixture");
    std::string base_name = "hamenstadt", bfamily_name = "half_plane";
    double epsilon = 0.02;
    std::size_t tail = 4, n_boundary = 24, n_scatter = 60;
    c_boundary->add_option("--family", bfamily_name, "half_plane|exterior_disk");
    c_boundary->add_option("--base", base_name, "visual|hamenstadt");
    c_boundary->add_option("--epsilon", epsilon, "visual parameter");
    c_boundary->add_option("--tail", tail, "tail window");
    c_boundary->add_option("--boundary-labels", n_boundary, "boundary label count");
    c_boundary->add_option("--seed", seed, "scatter seed");

    // ---- qs-report / qm-report ----
    auto* c_qs = app.add_subcommand("qs-report", "quasisymmetric distortion of Ma vs Mb");
    auto* c_qm = app.add_subcommand("qm-report", "quasimobius distortion of Ma vs Mb");
    std::string ma_path, mb_path, infinity_on;
    for (auto* c : {c_qs, c_qm}) {
        c->add_option("--ma", ma_path, "source matrix")->required();
        c->add_option("--mb", mb_path, "target matrix")->required();
        c->add_option("--budget", budget, "sampled configurations");
        c->add_option("--seed", seed, "stream seed");
    }
    c_qm->add_option("--infinity-on", infinity_on, "treat this Ma label as infinity");

    // ---- theorem / corollary pipelines ----
    auto* c_t1 = app.add_subcommand("theorem1", "hamenstadt(h) vs d quasisymmetry");
    c_t1->add_option("--family", bfamily_name, "half_plane|exterior_disk");
    c_t1->add_option("--epsilon", epsilon, "hamenstadt parameter cap");
    c_t1->add_option("--boundary-labels", n_boundary, "boundary label count");
    c_t1->add_option("--scatter", n_scatter, "interior scatter points");
    c_t1->add_option("--seed", seed, "scatter seed");

    auto* c_c1 = app.add_subcommand("corollary1", "jtilde vs h rough similarity + exponent");
    double epsilon_prime = 0.02;
    c_c1->add_option("--epsilon", epsilon, "jtilde-side parameter");
    c_c1->add_option("--epsilon-prime", epsilon_prime, "h-side parameter");
    c_c1->add_option("--seed", seed, "scatter seed");

    auto* c_t2 = app.add_subcommand("theorem2", "d vs hamenstadt(k) two-branch envelope");
    double t2_sigma = 0.1;
    std::size_t chains = 7;
    double extent = 3.0;
    c_t2->add_option("--sigma", t2_sigma, "locality parameter");
    c_t2->add_option("--chains", chains, "boundary positions");
    c_t2->add_option("--extent", extent, "comb extent");

    auto* c_c2 = app.add_subcommand("corollary2", "visual vs hamenstadt quasimobius");
    double eps_vis = 0.02, eps_ham = 0.04;
    c_c2->add_option("--sigma", t2_sigma, "locality parameter");
    c_c2->add_option("--eps-visual", eps_vis, "visual parameter");
    c_c2->add_option("--eps-hamenstadt", eps_ham, "hamenstadt parameter");

    auto* c_all = app.add_subcommand("check-all", "run every pipeline and report verdicts");
    c_all->add_option("--seed", seed, "scatter seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*c_validate) {
            RunContext run("validate", run_dir);
            auto m = load_matrix_any(in_matrix);
            auto rep = validate_metric(m);
            json out{{"ok", rep.ok()}, {"violations", json::array()}};
            for (const auto& v : rep.violations)
                out["violations"].push_back(
                    {{"axiom", v.axiom}, {"i", v.i}, {"j", v.j}, {"k", v.k}, {"excess", v.excess}});
            run.input("input", in_matrix);
            save_json(out, run.artifact("validation.json"));
            run.finish();
            return rep.ok() ? 0 : fail_invariant("metric axioms");
        }

        if (*c_sample) {
            RunContext run("sample", run_dir);
            spec.family = family_from_string(family_name);
            spec.grading = grading_name == "boundary_graded" ? Grading::boundary_graded
                                                             : Grading::uniform;
            auto s = sample(spec);
            run.param("family", family_name);
            run.param("n", spec.n_interior);
            run.param("boundary", spec.n_boundary);
            run.param("extent", spec.extent);
            run.param("seed", spec.seed);
            run.param("grading", grading_name);
            save_space_json(s, run.artifact("space.json"));
            save_space_csv(s, run.artifact("space.csv"));
            run.finish();
            return 0;
        }

        if (*c_metric) {
            RunContext run("metric", run_dir);
            auto s = load_space_any(in_space, true);
            MetricMatrix m;
            if (kind_name == "h") m = h_metric(s);
            else if (kind_name == "jtilde") m = jtilde_metric(s);
            else if (kind_name == "j") m = j_metric(s);
            else if (kind_name == "k" || kind_name == "k_graph")
                m = build_qh_graph(s, sigma, threads).khat();
            else throw Error("parameter", "unknown metric kind '" + kind_name + "'");
            run.input("space", in_space);
            run.param("kind", kind_name);
            run.param("sigma", sigma);
            save_matrix_csv(m, run.artifact("metric.csv"));
            auto rep = validate_metric(m);
            save_json(json{{"kind", to_string(m.kind)}, {"valid", rep.ok()}},
                      run.artifact("metric.json"));
            run.finish();
            return rep.ok() ? 0 : fail_invariant("computed matrix is a metric");
        }

        if (*c_delta) {
            RunContext run("delta", run_dir);
            auto m = load_matrix_any(in_matrix);
            DeltaMode mode = mode_name == "sampled" ? DeltaMode::sampled : DeltaMode::exhaustive;
            if (mode_name != "sampled" && mode_name != "exhaustive")
                throw Error("parameter", "mode must be exhaustive or sampled");
            auto rep = delta_hyperbolicity(m, mode, budget, seed, threads);
            run.input("matrix", in_matrix);
            run.param("mode", mode_name);
            run.param("budget", budget);
            run.param("seed", seed);
            save_json(delta_report_to_json(rep), run.artifact("delta.json"));
            std::printf("delta = %.12f\n", rep.delta);
            run.finish();
            return 0;
        }

        if (*c_busemann) {
            RunContext run("busemann", run_dir);
            auto fx = make_half_plane_comb(1, b_extent, b_sigma, 0.3, 6, 5,
                                           {{0.0, 1.0}, {0.0, 2.0}, {0.0, 4.0}, {0.0, 8.0}});
            auto g = build_qh_graph(fx.space, b_sigma, threads);
            auto khat = g.khat();
            std::size_t w = fx.space.n_interior - 4;
            auto field = busemann(khat, infinity_anchor(fx), w);
            double worst = 0.0;
            json values = json::object();
            for (int i = 0; i < 4; ++i) {
                std::size_t idx = fx.space.n_interior - 4 + std::size_t(i);
                double s = fx.space.coords[idx][1];
                values[fx.space.labels[idx]] = field.at(idx);
                worst = std::max(worst, std::abs(field.at(idx) + std::log(s)));
            }
            run.param("sigma", b_sigma);
            run.param("extent", b_extent);
            save_json(json{{"w", fx.space.labels[w]},
                           {"stabilization_gap", field.stabilization_gap},
                           {"analytic_deviation", worst},
                           {"values_at_heights", values}},
                      run.artifact("busemann.json"));
            run.finish();
            return worst <= 0.02 ? 0 : fail_invariant("b((0,s)) = -log s within 0.02");
        }

        if (*c_boundary) {
            RunContext run("boundary", run_dir);
            auto fx = make_h_fixture(family_from_string(bfamily_name), n_scatter, n_boundary,
                                     4.0, seed);
            auto h = h_metric(fx.space);
            BoundaryMetric bm;
            if (base_name == "visual") {
                bm = build_visual(h, fx, epsilon, std::log(4.0), tail);
            } else if (base_name == "hamenstadt") {
                bm = build_hamenstadt(h, fx, epsilon, std::log(4.0), tail).bm;
            } else {
                throw Error("parameter", "base must be visual or hamenstadt");
            }
            run.param("family", bfamily_name);
            run.param("base", base_name);
            run.param("epsilon", epsilon);
            run.param("tail", tail);
            run.param("seed", seed);
            save_json(boundary_metric_to_json(bm), run.artifact("boundary.json"));
            run.finish();
            return frink_bound_check(bm).ok ? 0 : fail_invariant("Frink bounds rho/2 <= d <= rho");
        }

        if (*c_qs || *c_qm) {
            RunContext run(*c_qs ? "qs-report" : "qm-report", run_dir);
            auto ma = load_matrix_any(ma_path);
            auto mb = load_matrix_any(mb_path);
            DistortionReport rep =
                *c_qs ? qs_distortion(ma, mb, budget, seed)
                      : qm_distortion(ma, mb, budget, seed,
                                      infinity_on.empty() ? std::nullopt
                                                          : std::optional(infinity_on));
            run.input("ma", ma_path);
            run.input("mb", mb_path);
            run.param("budget", budget);
            run.param("seed", seed);
            save_json(distortion_report_to_json(rep), run.artifact("distortion.json"));
            save_scatter_csv(rep, run.artifact("scatter.csv"));
            std::printf("alpha = %.6f, C = %.6g, correlation = %.4f\n", rep.fit.alpha,
                        rep.fit.C, rep.correlation);
            run.finish();
            return 0;
        }

        if (*c_t1) {
            RunContext run("theorem1", run_dir);
            auto fx = make_h_fixture(family_from_string(bfamily_name), n_scatter, n_boundary,
                                     4.0, seed);
            ReportBudgets budgets;
            budgets.threads = threads;
            auto rep = theorem1_report(fx, epsilon, budgets);
            run.param("family", bfamily_name);
            run.param("epsilon", epsilon);
            run.param("boundary_labels", n_boundary);
            run.param("seed", seed);
            save_json(theorem1_to_json(rep), run.artifact("theorem1.json"));
            save_scatter_csv(rep.qs, run.artifact("scatter.csv"));
            run.finish();
            return rep.pass ? 0 : fail_invariant("qs exponent within 25% of 1/epsilon");
        }

        if (*c_c1) {
            RunContext run("corollary1", run_dir);
            auto fx = make_h_fixture(Family::half_plane, n_scatter, n_boundary, 4.0, seed);
            ReportBudgets budgets;
            budgets.threads = threads;
            auto rep = corollary1_report(fx, epsilon, epsilon_prime, budgets);
            run.param("epsilon", epsilon);
            run.param("epsilon_prime", epsilon_prime);
            run.param("seed", seed);
            save_json(corollary1_to_json(rep), run.artifact("corollary1.json"));
            save_scatter_csv(rep.qs, run.artifact("scatter.csv"));
            run.finish();
            return rep.pass ? 0
                            : fail_invariant("rough (2, 2 log 2)-similarity and exponent 2");
        }

        if (*c_t2) {
            RunContext run("theorem2", run_dir);
            auto fx = make_half_plane_comb(chains, extent, t2_sigma);
            auto g = build_qh_graph(fx.space, t2_sigma, threads);
            auto uni = uniformity_estimate(fx.space, g, 500, 2);
            ReportBudgets budgets;
            budgets.threads = threads;
            auto rep = theorem2_report(fx, g, uni, {}, budgets);
            run.param("sigma", t2_sigma);
            run.param("chains", chains);
            run.param("extent", extent);
            save_json(theorem2_to_json(rep), run.artifact("theorem2.json"));
            save_scatter_csv(rep.qs, run.artifact("scatter.csv"));
            run.finish();
            return rep.pass ? 0 : fail_invariant("two-branch envelope exponents");
        }

        if (*c_c2) {
            RunContext run("corollary2", run_dir);
            auto fx = make_half_plane_comb(chains, extent, t2_sigma);
            auto g = build_qh_graph(fx.space, t2_sigma, threads);
            ReportBudgets budgets;
            budgets.threads = threads;
            auto rep = corollary2_check(fx, g, eps_vis, eps_ham, budgets);
            run.param("sigma", t2_sigma);
            run.param("eps_visual", eps_vis);
            run.param("eps_hamenstadt", eps_ham);
            save_json(corollary2_to_json(rep), run.artifact("corollary2.json"));
            save_scatter_csv(rep.qm, run.artifact("scatter.csv"));
            run.finish();
            return rep.pass ? 0
                            : fail_invariant("qm exponent within tolerance of eps/eps'");
        }

        if (*c_all) {
            RunContext run("check-all", run_dir);
            ReportBudgets budgets;
            budgets.threads = threads;
            int bad = 0;
            auto line = [&](const char* name, bool ok) {
                std::printf("%-12s %s\n", name, ok ? "PASS" : "FAIL");
                if (!ok) ++bad;
            };
            auto fx_hp = make_h_fixture(Family::half_plane, 80, 60, 4.0, seed);
            auto fx_ext = make_h_fixture(Family::exterior_disk, 80, 60, 4.0, seed);
            auto t1a = theorem1_report(fx_hp, 0.02, budgets);
            auto t1b = theorem1_report(fx_ext, 0.02, budgets);
            auto c1 = corollary1_report(fx_hp, 0.02, 0.02, budgets);
            auto fx_comb = make_half_plane_comb(7, 3.0, 0.12);
            auto g = build_qh_graph(fx_comb.space, 0.12, threads);
            auto uni = uniformity_estimate(fx_comb.space, g, 500, 2);
            auto cusp_a_hat = [&](double x_min) {
                auto s = make_cusp_chain(x_min, 0.2, 80);
                auto cg = build_qh_graph(s, 0.2, threads);
                return uniformity_estimate(s, cg, 400, 2).A_hat;
            };
            double a_coarse = cusp_a_hat(0.4);
            double a_fine = cusp_a_hat(0.15);
            auto t2 = theorem2_report(fx_comb, g, uni, {}, budgets);
            auto c2 = corollary2_check(fx_comb, g, 0.02, 0.04, budgets);
            line("theorem1", t1a.pass && t1b.pass);
            line("theorem2", t2.pass);
            line("corollary1", c1.pass);
            line("corollary2", c2.pass);
            line("cusp-warn", uniformity_diverges(a_coarse, a_fine));
            save_json(json{{"theorem1_half_plane", theorem1_to_json(t1a)},
                           {"theorem1_exterior_disk", theorem1_to_json(t1b)},
                           {"theorem2", theorem2_to_json(t2)},
                           {"corollary1", corollary1_to_json(c1)},
                           {"corollary2", corollary2_to_json(c2)},
                           {"cusp_a_hat", {{"coarse", a_coarse}, {"fine", a_fine}}}},
                      run.artifact("check_all.json"));
            run.param("seed", seed);
            run.finish();
            return bad == 0 ? 0 : fail_invariant("check-all verdicts");
        }
    } catch (const Error& e) {
        bool input_error = e.kind() == "parse" || e.kind() == "io" ||
                           e.kind() == "parameter" || e.kind() == "malformed-input" ||
                           e.kind() == "lookup";
        std::fprintf(stderr, "error: %s\n", e.what());
        return input_error ? 2 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
