#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pgc/errors.hpp"
#include "pgc/explicit_pairs.hpp"
#include "pgc/json_io.hpp"
#include "pgc/schwarzian.hpp"
#include "pgc/solver.hpp"

namespace fs = std::filesystem;
using namespace pgc;
using std::numbers::pi;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitConstraint = 4;
constexpr int kExitNumerical = 5;

struct CliError {
    int code;
    std::string message;
};

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CliError{kExitInput, "cannot open " + path};
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw CliError{kExitInput, path + ": " + e.what()};
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError{kExitInput, "cannot write " + path.string()};
    out << text;
}

fs::path out_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("PGC_OUT_DIR")) return env;
    return ".";
}

SolverConfig load_config(const std::string& path) {
    SolverConfig cfg;
    if (path.empty()) return cfg;
    const json j = read_json(path);
    cfg.edge_samples = j.value("edge_samples", cfg.edge_samples);
    cfg.max_sweeps = j.value("max_sweeps", cfg.max_sweeps);
    cfg.tol_move = j.value("tol_move", cfg.tol_move);
    cfg.conformal_N = j.value("conformal_N", cfg.conformal_N);
    cfg.damping = j.value("damping", cfg.damping);
    if (cfg.edge_samples == 0 || cfg.max_sweeps == 0 || cfg.tol_move <= 0.0 ||
        cfg.conformal_N == 0 || cfg.damping < 0.0)
        throw CliError{kExitInput, "config values must be positive"};
    return cfg;
}

std::vector<cd> parse_vertices(const std::string& inline_spec, const std::string& file) {
    std::vector<cd> verts;
    if (!file.empty()) {
        for (const json& v : read_json(file)) verts.push_back(complex_from_json(v));
    } else {
        std::stringstream ss(inline_spec);
        std::string part;
        while (std::getline(ss, part, ';')) {
            double x, y;
            char comma;
            std::stringstream ps(part);
            if (!(ps >> x >> comma >> y) || comma != ',')
                throw CliError{kExitInput, "bad vertex token: " + part};
            verts.push_back(cd(x, y));
        }
    }
    if (verts.size() < 3) throw CliError{kExitInput, "at least 3 vertices required"};
    return verts;
}

void write_curve_artifacts(const fs::path& dir, const std::string& stem, const PGCurve& curve) {
    write_text(dir / (stem + ".json"), curve_json(curve).dump(2) + "\n");
    write_text(dir / (stem + ".csv"), curve_csv(curve));
    write_text(dir / (stem + ".svg"), curve_svg(curve));
}

int cmd_pair(double theta, std::size_t samples, const std::string& out) {
    if (!(theta >= -pi / 2 - 1e-12 && theta <= pi / 2 + 1e-12))
        throw CliError{kExitInput, "theta must lie in [-pi/2, pi/2]"};
    const fs::path dir = out_dir(out);
    const PGCurve curve = trace_pair(theta, samples);
    write_curve_artifacts(dir, "pair", curve);

    const PairWelding w = pair_welding(theta);
    json report{{"theta", theta},
                {"A", w.params.A},
                {"B", w.params.B},
                {"C", w.params.C},
                {"D", w.params.D},
                {"shift", w.shift},
                {"degenerate_gap", w.degenerate_gap}};
    if (w.closure) report["welding"] = pwmobius_json(*w.closure);
    write_text(dir / "pair_report.json", report.dump(2) + "\n");
    std::cout << "A=" << w.params.A << " B=" << w.params.B << " C=" << w.params.C
              << " D=" << w.params.D << " shift=" << w.shift << "\n";
    return 0;
}

int cmd_solve(const std::string& verts_inline, const std::string& verts_file,
              const std::string& config, const std::string& out) {
    const std::vector<cd> verts = parse_vertices(verts_inline, verts_file);
    const SolverConfig cfg = load_config(config);
    const fs::path dir = out_dir(out);
    const SolveResult sol = solve_through_vertices(verts, cfg);
    write_curve_artifacts(dir, "solve", sol.curve);
    write_text(dir / "solve_log.csv", sweep_csv(sol.log));
    std::cout << "sweeps=" << sol.log.size() << " converged=" << (sol.converged ? "yes" : "no")
              << "\n";
    return sol.converged ? 0 : kExitNoConvergence;
}

int cmd_weld(const std::string& cx, const std::string& cy, const std::string& norm,
             const std::string& check, const std::string& out) {
    const fs::path dir = out_dir(out);
    if (!check.empty()) {
        const json j = read_json(check);
        const double p = check_product(j.at("x").get<std::vector<double>>(),
                                       j.at("y").get<std::vector<double>>());
        std::cout << "product=" << p << "\n";
        return std::abs(p - 1.0) < 1e-6 ? 0 : kExitConstraint;
    }
    if (!norm.empty()) {
        const NormalizeResult r = normalize(pwmobius_from_json(read_json(norm)));
        json j{{"welding", normalized_welding_json(r.welding)},
               {"map", pwmobius_json(r.welding.map)},
               {"sigma_pre", mobius_json(r.sigma_pre)},
               {"sigma_post", mobius_json(r.sigma_post)}};
        write_text(dir / "welding_normalized.json", j.dump(2) + "\n");
        std::cout << "shift=" << r.welding.shift << "\n";
        return 0;
    }
    const std::vector<double> x = read_json(cx).get<std::vector<double>>();
    const std::vector<double> y = read_json(cy).get<std::vector<double>>();
    std::cout << "product=" << check_product(x, y) << "\n";
    const NormalizedWelding w = construct_welding(x, y);
    json j{{"welding", normalized_welding_json(w)}, {"map", pwmobius_json(w.map)}};
    write_text(dir / "welding.json", j.dump(2) + "\n");
    return 0;
}

int cmd_analyze(const std::string& curve_path, const std::string& config, const std::string& out,
                const std::string& report_name) {
    const PGCurve curve = curve_from_json(read_json(curve_path));
    const SolverConfig cfg = load_config(config);
    const fs::path dir = out_dir(out);

    const CurveAnalysis an = analyze_curve(curve, cfg);
    json report = analysis_json(an);

    const ExtractedWelding w = extract_welding(curve, cfg);
    json edges = json::array();
    for (double r : w.edge_residuals) edges.push_back(r);
    report["welding"] = {{"residual", w.residual}, {"edge_residuals", edges}};
    if (w.map.size() > 0) report["welding"]["map"] = pwmobius_json(w.map);
    if (w.normalized) {
        report["welding"]["normalized"] = normalized_welding_json(w.normalized->welding);
        if (w.normalized->welding.x.size() == 3)
            report["modulus_residual"] = check_modulus(w.normalized->welding);
    }

    if (curve.vertex_indices.size() == 4) {
        // Transport the four vertices to 0, zeta, 1, inf for the symmetry check.
        std::vector<ExtComplex> v;
        for (std::size_t k : curve.vertex_indices) v.push_back(curve.samples[k]);
        const Mobius T =
            Mobius::from_three_points(v[0], v[2], v[3], ExtComplex(cd(0, 0)),
                                      ExtComplex(cd(1, 0)), ExtComplex::infinity());
        const ExtComplex zeta = T.apply(v[1]);
        PGCurve moved = curve;
        for (ExtComplex& z : moved.samples) z = T.apply(z);
        if (zeta.is_finite()) {
            const AutomorphismCheck ac = check_automorphisms(moved, zeta.value);
            report["automorphisms"] = {
                {"zeta", complex_json(zeta.value)},
                {"distance", {ac.distance[0], ac.distance[1], ac.distance[2]}},
                {"swaps_sides", {ac.swaps_sides[0], ac.swaps_sides[1], ac.swaps_sides[2]}}};
        }
    }

    write_text(dir / report_name, report.dump(2) + "\n");
    std::cout << "fit_residual=" << an.fit_residual << " decay=" << an.decay_exponent << "\n";
    return 0;
}

int cmd_render(const std::string& curve_path, const std::string& svg, const RenderOptions& opt) {
    const PGCurve curve = curve_from_json(read_json(curve_path));
    if (curve.finite_samples().size() < 2) throw CliError{kExitInput, "curve has too few samples"};
    write_text(svg, curve_svg(curve, opt));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"piecewise geodesic curves: construct, solve, weld, analyze, render"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out, config;
    app.add_option("--out", out, "output directory (default $PGC_OUT_DIR or .)");
    app.add_option("--config", config, "JSON file overriding solver defaults");

    double theta = 0.0;
    std::size_t samples = 256;
    auto* pair = app.add_subcommand("pair", "trace an explicit geodesic pair");
    pair->fallthrough();
    pair->add_option("--theta", theta, "angle in [-pi/2, pi/2]")->required();
    pair->add_option("--samples", samples, "samples per arm");

    std::string verts_inline, verts_file;
    auto* solve = app.add_subcommand("solve", "piecewise geodesic curve through vertices");
    solve->fallthrough();
    solve->add_option("--vertices", verts_inline, "inline list x,y;x,y;...");
    solve->add_option("--vertices-file", verts_file, "JSON list of [re, im]");

    std::string weld_x, weld_y, weld_norm, weld_check;
    auto* weld = app.add_subcommand("weld", "construct, normalize or check weldings");
    weld->fallthrough();
    weld->add_option("--construct", weld_x, "breakpoint file x.json (with --targets)");
    weld->add_option("--targets", weld_y, "image file y.json");
    weld->add_option("--normalize", weld_norm, "piecewise Moebius JSON to normalize");
    weld->add_option("--check", weld_check, "normalized welding JSON to check");

    std::string curve_path, report_name = "report.json";
    auto* analyze = app.add_subcommand("analyze", "full curve report");
    analyze->fallthrough();
    analyze->add_option("--curve", curve_path, "curve JSON")->required();
    analyze->add_option("--report", report_name, "report file name");

    std::string render_curve, render_svg;
    RenderOptions ropt;
    auto* render = app.add_subcommand("render", "curve to SVG");
    render->fallthrough();
    render->add_option("--curve", render_curve, "curve JSON")->required();
    render->add_option("--svg", render_svg, "output SVG path")->required();
    render->add_option("--size", ropt.size_px, "image size in px");
    render->add_option("--stroke", ropt.stroke, "stroke width");
    render->add_flag("--no-markers{false}", ropt.vertex_markers, "omit vertex markers");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (pair->parsed()) return cmd_pair(theta, samples, out);
        if (solve->parsed()) return cmd_solve(verts_inline, verts_file, config, out);
        if (weld->parsed()) return cmd_weld(weld_x, weld_y, weld_norm, weld_check, out);
        if (analyze->parsed()) return cmd_analyze(curve_path, config, out, report_name);
        if (render->parsed()) return cmd_render(render_curve, render_svg, ropt);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const ConstraintError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConstraint;
    } catch (const NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
