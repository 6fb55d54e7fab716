#include "pgc/json_io.hpp"

#include <cstdio>
#include <stdexcept>

namespace pgc {

namespace {

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v + 0.0);  // normalize -0
    return buf;
}

}  // namespace

json complex_json(cd z) { return json::array({z.real(), z.imag()}); }

cd complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw std::invalid_argument("expected [re, im] pair");
    return cd(j[0].get<double>(), j[1].get<double>());
}

json ext_json(const ExtComplex& z) {
    if (!z.is_finite()) return json("inf");
    return complex_json(z.value);
}

ExtComplex ext_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtComplex::infinity();
        throw std::invalid_argument("expected \"inf\" or [re, im]");
    }
    return ExtComplex(complex_from_json(j));
}

json mobius_json(const Mobius& m) {
    json out = json::array();
    for (cd c : m.coeffs()) out.push_back(complex_json(c));
    return out;
}

Mobius mobius_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("expected four Moebius coefficients");
    return Mobius(complex_from_json(j[0]), complex_from_json(j[1]), complex_from_json(j[2]),
                  complex_from_json(j[3]));
}

json pwmobius_json(const PiecewiseMobius& w) {
    json bps = json::array(), brs = json::array();
    for (const ExtComplex& b : w.breakpoints()) bps.push_back(ext_json(b));
    for (const Mobius& m : w.branches()) brs.push_back(mobius_json(m));
    return json{{"breakpoints", bps}, {"branches", brs}};
}

PiecewiseMobius pwmobius_from_json(const json& j) {
    std::vector<ExtComplex> bps;
    std::vector<Mobius> brs;
    for (const json& b : j.at("breakpoints")) bps.push_back(ext_from_json(b));
    for (const json& m : j.at("branches")) brs.push_back(mobius_from_json(m));
    if (bps.empty() && brs.size() == 1) return PiecewiseMobius::single(brs[0]);
    return PiecewiseMobius(std::move(bps), std::move(brs));
}

json normalized_welding_json(const NormalizedWelding& w) {
    return json{{"x", w.x}, {"y", w.y}, {"shift", w.shift}};
}

json curve_json(const PGCurve& c) {
    json samples = json::array();
    for (const ExtComplex& z : c.samples) samples.push_back(ext_json(z));
    json flags = json::array();
    for (const VertexFlag& f : c.flags)
        flags.push_back(f.c1 ? json{{"kind", "c1"}}
                             : json{{"kind", "spiral"}, {"rate", f.spiral_rate}});
    return json{{"samples", samples},
                {"vertices", c.vertex_indices},
                {"closed", c.closed},
                {"flags", flags}};
}

PGCurve curve_from_json(const json& j) {
    PGCurve c;
    for (const json& z : j.at("samples")) c.samples.push_back(ext_from_json(z));
    c.vertex_indices = j.at("vertices").get<std::vector<std::size_t>>();
    c.closed = j.value("closed", true);
    if (j.contains("flags")) {
        for (const json& f : j["flags"]) {
            VertexFlag vf;
            vf.c1 = f.value("kind", "c1") == std::string("c1");
            vf.spiral_rate = f.value("rate", 0.0);
            c.flags.push_back(vf);
        }
    }
    if (c.flags.size() != c.vertex_indices.size())
        c.flags.assign(c.vertex_indices.size(), VertexFlag{});
    for (std::size_t k : c.vertex_indices)
        if (k >= c.samples.size()) throw std::invalid_argument("vertex index out of range");
    return c;
}

json analysis_json(const CurveAnalysis& an) {
    json poles = json::array(), residues = json::array(), quad = json::array();
    for (const ExtComplex& p : an.model.poles) poles.push_back(ext_json(p));
    for (cd c : an.model.residues) residues.push_back(complex_json(c));
    for (cd q : an.model.quad_coeffs) quad.push_back(complex_json(q));
    json sums = json::array();
    sums.push_back(complex_json(an.constraints.sums[0]));
    sums.push_back(complex_json(an.constraints.sums[1]));
    if (an.constraints.has_third)
        sums.push_back(complex_json(an.constraints.sums[2]));
    else
        sums.push_back("n/a");
    json flags = json::array();
    for (const VertexFlag& f : an.flags)
        flags.push_back(f.c1 ? json{{"kind", "c1"}}
                             : json{{"kind", "spiral"}, {"rate", f.spiral_rate}});
    return json{{"poles", poles},
                {"residues", residues},
                {"quad", quad},
                {"constraint_residuals", sums},
                {"normalized_constraints",
                 {an.normalized_constraints[0], an.normalized_constraints[1],
                  an.normalized_constraints[2]}},
                {"fit_residual", an.fit_residual},
                {"decay_exponent", an.decay_exponent},
                {"welding_residual", an.welding_residual},
                {"vertex_flags", flags},
                {"probes", an.probes}};
}

std::string curve_svg(const PGCurve& c, const RenderOptions& opt) {
    const std::vector<cd> pts = c.finite_samples();
    if (pts.size() < 2) throw std::invalid_argument("curve_svg: too few finite samples");
    double xmin = pts[0].real(), xmax = xmin, ymin = pts[0].imag(), ymax = ymin;
    for (const cd& p : pts) {
        xmin = std::min(xmin, p.real());
        xmax = std::max(xmax, p.real());
        ymin = std::min(ymin, p.imag());
        ymax = std::max(ymax, p.imag());
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double pad = 0.05 * span;
    const double scale = opt.size_px / (span + 2.0 * pad);
    // y flips: svg grows downward
    auto X = [&](cd p) { return (p.real() - xmin + pad) * scale; };
    auto Y = [&](cd p) { return (ymax - p.imag() + pad) * scale; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(opt.size_px, 0) +
           "\" height=\"" + fixed(opt.size_px, 0) + "\" viewBox=\"0 0 " + fixed(opt.size_px, 0) +
           " " + fixed(opt.size_px, 0) + "\">\n";
    out += "<path fill=\"none\" stroke=\"black\" stroke-width=\"" + fixed(opt.stroke, 2) +
           "\" d=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
        out += (k == 0 ? "M" : " L");
        out += fixed(X(pts[k])) + " " + fixed(Y(pts[k]));
    }
    if (c.closed) out += " Z";
    out += "\"/>\n";
    if (opt.vertex_markers) {
        for (std::size_t k : c.vertex_indices) {
            if (!c.samples[k].is_finite()) continue;
            const cd v = c.samples[k].value;
            out += "<circle cx=\"" + fixed(X(v)) + "\" cy=\"" + fixed(Y(v)) + "\" r=\"" +
                   fixed(3.0 * opt.stroke, 2) + "\" fill=\"red\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

std::string curve_csv(const PGCurve& c) {
    std::string out = "t,re,im\n";
    const std::size_t n = c.samples.size();
    for (std::size_t k = 0; k < n; ++k) {
        if (!c.samples[k].is_finite()) continue;
        const cd z = c.samples[k].value;
        out += fixed(double(k) / double(n), 9) + "," + fixed(z.real(), 12) + "," +
               fixed(z.imag(), 12) + "\n";
    }
    return out;
}

std::string sweep_csv(const std::vector<SweepRecord>& log) {
    std::string out = "sweep,max_displacement,rejected\n";
    for (const SweepRecord& r : log)
        out += std::to_string(r.sweep) + "," + fixed(r.max_displacement, 12) + "," +
               std::to_string(r.rejected) + "\n";
    return out;
}

}  // namespace pgc
