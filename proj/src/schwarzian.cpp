#include "pgc/schwarzian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

#include "pgc/confmap.hpp"
#include "pgc/errors.hpp"

namespace pgc {

namespace {

constexpr std::size_t kStencil = 8;

// First three derivatives from function values on a circle of radius h,
// by the discrete Cauchy integral over kStencil roots of unity.
struct Jet {
    cd d1, d2, d3;
};

Jet stencil_jet(const ConformalEvaluator& f, cd z, double h) {
    using std::numbers::pi;
    cd s1 = 0.0, s2 = 0.0, s3 = 0.0;
    for (std::size_t j = 0; j < kStencil; ++j) {
        const double a = 2.0 * pi * double(j) / double(kStencil);
        const cd w = std::polar(1.0, a);
        const cd fj = f(z + h * w);
        if (!std::isfinite(fj.real()) || !std::isfinite(fj.imag()))
            throw NumericalError("schwarzian stencil: non-finite sample");
        s1 += fj * std::conj(w);
        s2 += fj * std::polar(1.0, -2.0 * a);
        s3 += fj * std::polar(1.0, -3.0 * a);
    }
    const double m = double(kStencil);
    return {s1 / (m * h), 2.0 * s2 / (m * h * h), 6.0 * s3 / (m * h * h * h)};
}

cd schwarzian_of_jet(const Jet& j) {
    const double scale = std::abs(j.d1) + std::abs(j.d2) + std::abs(j.d3);
    if (std::abs(j.d1) < 1e-13 * scale || std::abs(j.d1) < 1e-280)
        throw NumericalError("numerical_schwarzian: derivative underflow");
    const cd q = j.d2 / j.d1;
    return j.d3 / j.d1 - 1.5 * q * q;
}

}  // namespace

cd RationalSchwarzian::evaluate(cd z) const {
    cd s = 0.0;
    for (std::size_t j = 0; j < poles.size(); ++j) {
        if (!poles[j].is_finite()) continue;
        const cd d = z - poles[j].value;
        s += quad_coeffs[j] / (d * d) + residues[j] / d;
    }
    return s;
}

bool RationalSchwarzian::has_infinite_pole() const {
    return std::any_of(poles.begin(), poles.end(),
                       [](const ExtComplex& p) { return !p.is_finite(); });
}

cd numerical_schwarzian(const ConformalEvaluator& f, cd z, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("numerical_schwarzian: step must be positive");
    return schwarzian_of_jet(stencil_jet(f, z, h));
}

double verify_composition(const ConformalEvaluator& g, const ConformalEvaluator& h,
                          cd z, double step) {
    const Jet jh = stencil_jet(h, z, step);
    const cd hz = h(z);
    const cd sh = schwarzian_of_jet(jh);
    const cd sgh = numerical_schwarzian([&](cd w) { return g(h(w)); }, z, step);
    const double inner = step * std::clamp(std::abs(jh.d1), 1e-3, 1e3);
    const cd sg = numerical_schwarzian(g, hz, inner);
    return std::abs(sgh - sg * jh.d1 * jh.d1 - sh);
}

RationalFit fit_rational(const std::vector<std::pair<cd, cd>>& samples,
                         const std::vector<ExtComplex>& poles,
                         const std::vector<double>& spiral_rates) {
    if (!spiral_rates.empty() && spiral_rates.size() != poles.size())
        throw std::invalid_argument("fit_rational: one spiral rate per pole expected");

    RationalSchwarzian model;
    model.poles = poles;
    model.residues.assign(poles.size(), 0.0);
    model.quad_coeffs.assign(poles.size(), 0.0);
    std::vector<std::size_t> finite;
    for (std::size_t j = 0; j < poles.size(); ++j) {
        if (!poles[j].is_finite()) continue;
        finite.push_back(j);
        if (!spiral_rates.empty())
            model.quad_coeffs[j] = spiral_pole_coefficient(spiral_rates[j]);
    }
    if (samples.size() < finite.size())
        throw std::invalid_argument("fit_rational: more poles than samples");

    Eigen::MatrixXcd A(samples.size(), finite.size());
    Eigen::VectorXcd b(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        cd rhs = samples[i].second;
        for (std::size_t k = 0; k < finite.size(); ++k) {
            const cd d = samples[i].first - poles[finite[k]].value;
            if (std::abs(d) < 1e-12)
                throw std::invalid_argument("fit_rational: sample on a pole");
            A(i, k) = 1.0 / d;
            rhs -= model.quad_coeffs[finite[k]] / (d * d);
        }
        b(i) = rhs;
    }
    const Eigen::VectorXcd c = A.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < finite.size(); ++k) model.residues[finite[k]] = c(k);

    RationalFit fit;
    fit.model = std::move(model);
    fit.residual = std::sqrt((A * c - b).squaredNorm() / double(samples.size()));
    return fit;
}

ConstraintSums constraint_residuals(const RationalSchwarzian& rs) {
    ConstraintSums out;
    out.has_third = !rs.has_infinite_pole();
    for (std::size_t j = 0; j < rs.poles.size(); ++j) {
        if (!rs.poles[j].is_finite()) continue;
        const cd zj = rs.poles[j].value;
        out.sums[0] += rs.residues[j];
        out.sums[1] += rs.residues[j] * zj;
        out.sums[2] += rs.residues[j] * zj * zj;
    }
    if (!out.has_third) out.sums[2] = 0.0;
    return out;
}

cd vertex_residue_prediction(double theta, cd hprime_at_vertex) {
    return cd(0.0, 4.0 * std::sin(theta)) * hprime_at_vertex;
}

cd vertex_residue_hyperbolic(double s, double t, double rho) {
    return cd(0.0, 4.0 * std::sin(0.5 * (t - s))) * rho * std::polar(1.0, -0.5 * (t + s));
}

cd spiral_pole_coefficient(double R) { return cd(0.5 * R * R, R); }

CurveAnalysis analyze_curve(const PGCurve& gamma, const SolverConfig& cfg) {
    using std::numbers::pi;
    if (!gamma.closed || gamma.vertex_indices.size() < 2)
        throw std::invalid_argument("analyze_curve: closed curve with vertices required");
    const std::vector<cd> pts = gamma.finite_samples();
    if (pts.size() != gamma.samples.size())
        throw std::invalid_argument("analyze_curve: curve must avoid infinity");
    const double diam = polyline_diameter(pts);
    const std::size_t n = gamma.vertex_indices.size();
    std::vector<cd> verts(n);
    for (std::size_t j = 0; j < n; ++j) verts[j] = gamma.samples[gamma.vertex_indices[j]].finite();

    CurveAnalysis out;

    const ExtractedWelding w = extract_welding(gamma, cfg);
    out.welding_residual = w.residual;
    out.flags.assign(n, VertexFlag{});
    std::vector<double> rates(n, 0.0);
    // Derivative jumps inherit the welding fit noise; widen the C1 band
    // accordingly so solver-accuracy curves are not misread as spirals.
    const double cls_tol = std::max(1e-3, 50.0 * w.residual);
    for (std::size_t j = 0; j < n; ++j) {
        try {
            out.flags[j] = classify_vertex(w, j, cls_tol);
        } catch (const std::exception&) {
            out.flags[j] = VertexFlag{};
        }
        if (!out.flags[j].c1) rates[j] = out.flags[j].spiral_rate;
    }

    const HalfPlaneMaps hp = half_plane_maps(gamma);
    const bool plus_bounded = !hp.plus.through_pole;
    auto F = [&](cd z) {
        const bool inside = winding_number(pts, z) != 0;
        return (inside == plus_bounded) ? hp.to_upper(z) : hp.to_lower(z);
    };

    cd centroid = 0.0;
    for (const cd& v : verts) centroid += v;
    centroid /= double(n);

    // Near-tangent probes see the polygonal model error of the maps, which
    // falls off steeply with distance; keep only probes standing well away
    // from the curve relative to their ring radius.
    auto probe_at = [&](cd p, double min_dist, std::vector<std::pair<cd, cd>>& dst) {
        const double d = distance_to_polyline(p, pts, true);
        if (d < std::max(1e-3 * diam, min_dist)) return;
        try {
            dst.push_back({p, numerical_schwarzian(F, p, 0.01 * d)});
        } catch (const std::exception&) {
        }
    };

    std::vector<std::pair<cd, cd>> samples;
    for (std::size_t j = 0; j < n; ++j) {
        double sep = diam;
        for (std::size_t k = 0; k < n; ++k)
            if (k != j) sep = std::min(sep, std::abs(verts[j] - verts[k]));
        // Keep only probes standing nearly normal to the curve: near-tangent
        // ones see the polygonal model error of the maps. Relax the stand-off
        // when a cramped vertex would otherwise lose all its probes.
        std::vector<std::pair<cd, cd>> mine;
        for (double frac : {0.85, 0.6, 0.3}) {
            mine.clear();
            for (double r : {0.1, 0.2, 0.35}) {
                for (std::size_t a = 0; a < 8; ++a)
                    probe_at(
                        verts[j] + r * sep * std::polar(1.0, 0.37 + 2.0 * pi * double(a) / 8.0),
                        frac * r * sep, mine);
            }
            if (mine.size() >= 6) break;
        }
        samples.insert(samples.end(), mine.begin(), mine.end());
    }
    // Far-field probes pin the decay and condition the fit.
    std::vector<std::pair<cd, cd>> far;
    for (double r : {2.5, 4.0, 6.4, 10.2}) {
        for (std::size_t a = 0; a < 6; ++a)
            probe_at(centroid + r * diam * std::polar(1.0, 0.21 + 2.0 * pi * double(a) / 6.0), 0.0,
                     far);
    }
    samples.insert(samples.end(), far.begin(), far.end());
    out.probes = samples.size();

    std::vector<ExtComplex> poles(verts.begin(), verts.end());
    const RationalFit fit = fit_rational(samples, poles, rates);
    out.model = fit.model;
    out.fit_residual = fit.residual;
    out.constraints = constraint_residuals(out.model);

    for (int k = 0; k < 3; ++k) {
        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            denom += std::abs(out.model.residues[j]) * std::pow(std::abs(verts[j]), double(k));
        out.normalized_constraints[k] = std::abs(out.constraints.sums[k]) / std::max(denom, 1e-30);
    }

    // Slope of log|S| against log distance over the far probes; a model below
    // the sampling noise decays at least as fast as the n >= 4 rate.
    std::vector<double> lx, ly;
    for (const auto& [p, s] : far) {
        if (std::abs(s) * diam * diam < 1e-12) continue;
        lx.push_back(std::log(std::abs(p - centroid)));
        ly.push_back(std::log(std::abs(s)));
    }
    if (lx.size() >= 4) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
        mx /= double(lx.size());
        my /= double(lx.size());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            num += (lx[i] - mx) * (ly[i] - my);
            den += (lx[i] - mx) * (lx[i] - mx);
        }
        out.decay_exponent = -num / den;
    } else {
        out.decay_exponent = 4.0;
    }
    return out;
}

}  // namespace pgc
