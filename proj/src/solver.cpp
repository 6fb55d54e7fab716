#include "pgc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pgc/errors.hpp"
#include "pgc/explicit_pairs.hpp"

namespace pgc {

namespace {

constexpr double kPi = std::numbers::pi;

// Fold an angle into (-pi/2, pi/2] modulo pi.
double fold_half_pi(double t) {
    t = std::fmod(t, kPi);
    if (t > kPi / 2) t -= kPi;
    if (t <= -kPi / 2) t += kPi;
    return t;
}

double damping_of(const SolverConfig& cfg, std::size_t n) {
    if (cfg.damping > 0.0) return cfg.damping;
    return n >= 5 ? 0.5 : 1.0;
}

// Resample an open polyline at cosine-spaced arclength fractions, dense near
// both endpoints. The square-root behaviour of the doubling map then turns
// this into roughly uniform spacing along the doubled boundary.
std::vector<cd> resample_cosine(const std::vector<cd>& p, std::size_t n) {
    std::vector<double> cum(p.size(), 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) cum[i] = cum[i - 1] + std::abs(p[i] - p[i - 1]);
    double L = cum.back();
    if (L == 0.0) throw std::invalid_argument("resample_cosine: degenerate polyline");
    std::vector<cd> out(n);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double t = L * 0.5 * (1.0 - std::cos(kPi * double(k) / double(n - 1)));
        while (seg + 2 < p.size() && cum[seg + 1] < t) ++seg;
        double den = cum[seg + 1] - cum[seg];
        double f = den > 0.0 ? (t - cum[seg]) / den : 0.0;
        out[k] = p[seg] + f * (p[seg + 1] - p[seg]);
    }
    out.front() = p.front();
    out.back() = p.back();
    return out;
}

std::vector<cd> finite_of(const PGCurve& g) {
    std::vector<cd> pts;
    pts.reserve(g.samples.size());
    for (const auto& s : g.samples) {
        if (s.at_infinity) throw std::invalid_argument("solver: curve sample at infinity");
        pts.push_back(s.value);
    }
    return pts;
}

}  // namespace

SlitDomainMap::SlitDomainMap(const std::vector<cd>& arc, cd anchor) {
    std::size_t m = arc.size();
    if (m < 3) throw std::invalid_argument("SlitDomainMap: arc needs at least 3 samples");
    A_ = arc.front();
    B_ = arc.back();
    if (std::abs(A_ - B_) == 0.0)
        throw std::invalid_argument("SlitDomainMap: coinciding arc endpoints");

    // Continuous branch of sqrt((z-A)/(z-B)) along the arc, from 0 at the
    // front tip toward infinity at the back tip.
    std::vector<cd> b(m - 1);
    b[0] = cd(0.0, 0.0);
    for (std::size_t i = 1; i + 1 < m; ++i) {
        cd den = arc[i] - B_;
        if (std::abs(den) == 0.0)
            throw std::invalid_argument("SlitDomainMap: repeated arc sample");
        cd r = std::sqrt((arc[i] - A_) / den);
        if ((r * std::conj(b[i - 1])).real() < 0.0) r = -r;
        b[i] = r;
    }

    cd Mden = anchor - B_;
    if (std::abs(anchor - A_) == 0.0 || std::abs(Mden) == 0.0)
        throw std::invalid_argument("SlitDomainMap: anchor on an arc tip");
    c_ = std::sqrt((anchor - A_) / Mden);

    // Fold both square-root lifts through psi(w) = 1/(w + c); the two arc
    // tips appear once each, at indices 0 and m-1.
    polygon_.reserve(2 * m - 2);
    for (std::size_t i = 0; i + 1 < m; ++i) {
        cd den = b[i] + c_;
        if (std::abs(den) < 1e-14)
            throw NumericalError("SlitDomainMap: anchor lift meets the doubled boundary");
        polygon_.push_back(1.0 / den);
    }
    polygon_.push_back(cd(0.0, 0.0));
    for (std::size_t i = m - 2; i >= 1; --i) {
        cd den = -b[i] + c_;
        if (std::abs(den) < 1e-14)
            throw NumericalError("SlitDomainMap: anchor lift meets the doubled boundary");
        polygon_.push_back(1.0 / den);
    }

    dm_ = DiscreteConformalMap::disk_map(polygon_, 1.0 / (2.0 * c_));
    auto tr = dm_.boundary_trace();
    tip_front_ = tr[0].circle;
    tip_back_ = tr[m - 1].circle;
}

cd SlitDomainMap::evaluate(cd z) const {
    cd den = z - B_;
    if (std::abs(den) == 0.0) return dm_.evaluate(polygon_[polygon_.size() / 2]);
    cd r = std::sqrt((z - A_) / den);
    for (cd s : {r, -r}) {
        cd wden = s + c_;
        if (std::abs(wden) < 1e-14) continue;
        cd w = 1.0 / wden;
        if (winding_number(polygon_, w) != 0) return dm_.evaluate(w);
    }
    throw NumericalError("SlitDomainMap: point not resolved to a sheet");
}

cd SlitDomainMap::invert(cd w) const {
    cd u = dm_.invert(w);
    if (std::abs(u) < 1e-280) return B_;
    cd phi = 1.0 / u - c_;
    cd M = phi * phi;
    if (!std::isfinite(M.real()) || !std::isfinite(M.imag())) return B_;
    cd den = 1.0 - M;
    if (std::abs(den) < 1e-280) throw NumericalError("SlitDomainMap: inverse at infinity");
    return (A_ - B_ * M) / den;
}

UpdateResult update_edge_pair(const PGCurve& g, std::size_t j, const SolverConfig& cfg) {
    UpdateResult res;
    res.curve = g;
    std::size_t n = g.vertex_indices.size();
    if (!g.closed || n < 3) throw std::invalid_argument("update_edge_pair: need a closed curve with >= 3 vertices");
    if (j >= n) throw std::invalid_argument("update_edge_pair: vertex index out of range");
    if (cfg.edge_samples < 4) throw std::invalid_argument("update_edge_pair: edge_samples < 4");

    std::vector<cd> pts = finite_of(g);
    std::size_t N = pts.size();
    const auto& vi = g.vertex_indices;
    std::size_t jm = (j + n - 1) % n, jp = (j + 1) % n;
    cd zm = pts[vi[jm]], zj = pts[vi[j]], zp = pts[vi[jp]];

    std::vector<cd> arc;
    for (std::size_t k = vi[jp];; k = (k + 1) % N) {
        arc.push_back(pts[k]);
        if (k == vi[jm]) break;
    }
    std::size_t m = std::max<std::size_t>(cfg.conformal_N / 2, 16);
    arc = resample_cosine(arc, std::max(m, arc.size()));

    double theta;
    bool rev;
    std::vector<cd> path;
    std::size_t mid = 0;
    std::size_t S = std::max<std::size_t>(2 * cfg.edge_samples, 16);
    try {
        SlitDomainMap sm(arc, zj);
        double alpha = std::arg(sm.tip_back());    // prime end of zeta_{j-1}
        double beta = std::arg(sm.tip_front());    // prime end of zeta_{j+1}
        theta = fold_half_pi((alpha - beta + kPi) / 2.0);
        if (kPi / 2 - std::abs(theta) < 1e-3) {
            res.diagnostic = "degenerate vertex angle";
            return res;
        }
        // Rotation aligning the tips with the model pair endpoints
        // e^{i theta} and -e^{-i theta}; the two assignments differ by the
        // reflection swapping the arms.
        cd rho_a = std::polar(1.0, theta - alpha);
        cd rho_b = std::polar(1.0, kPi - theta - alpha);
        double err_a = std::abs(rho_a * sm.tip_front() - std::polar(1.0, kPi - theta));
        double err_b = std::abs(rho_b * sm.tip_front() - std::polar(1.0, theta));
        rev = err_b < err_a;
        cd rho = rev ? rho_b : rho_a;

        // Pull back the model pair e^{i theta} -> 0 -> -e^{-i theta}. Each
        // arm is parametrized by w in (B, inf); the grid starts very close
        // to the tip value B (the arm leaves the circle like sqrt(w - B))
        // and is refined adaptively wherever the pulled-back points leave
        // gaps that the edge resampling could not resolve.
        auto gp = GeodesicPairParams::make(theta);
        const double s0 = 1e-9, wmax = 1e8;
        double sig = std::log1p((wmax - gp.B) / s0);
        auto pull_arm = [&](bool second) {
            std::vector<std::pair<double, cd>> a;
            a.reserve(4 * S);
            for (std::size_t k = 1; k <= S; ++k) {
                double w = gp.B + s0 * std::expm1(sig * double(k) / double(S));
                cd mz = G_inverse(theta, cd(w, 0.0), GMode::HalfDisc);
                if (second) mz = -std::conj(mz);
                a.emplace_back(w, sm.invert(mz * std::conj(rho)));
            }
            double len = 0.0;
            for (std::size_t i = 0; i + 1 < a.size(); ++i)
                len += std::abs(a[i].second - a[i + 1].second);
            double gap_tol = len / double(4 * cfg.edge_samples);
            std::size_t budget = 12 * S;
            for (int pass = 0; pass < 6 && a.size() < budget; ++pass) {
                bool refined = false;
                std::vector<std::pair<double, cd>> b;
                b.reserve(a.size() * 2);
                for (std::size_t i = 0; i < a.size(); ++i) {
                    b.push_back(a[i]);
                    if (i + 1 == a.size() || b.size() >= budget) continue;
                    if (std::abs(a[i].second - a[i + 1].second) <= gap_tol) continue;
                    double w = gp.B + std::sqrt((a[i].first - gp.B) * (a[i + 1].first - gp.B));
                    cd mz = G_inverse(theta, cd(w, 0.0), GMode::HalfDisc);
                    if (second) mz = -std::conj(mz);
                    b.emplace_back(w, sm.invert(mz * std::conj(rho)));
                    refined = true;
                }
                a.swap(b);
                if (!refined) break;
            }
            std::vector<cd> zs;
            zs.reserve(a.size());
            for (auto& e : a) zs.push_back(e.second);
            return zs;
        };
        std::vector<cd> arm1 = pull_arm(false);
        std::vector<cd> arm2 = pull_arm(true);
        path.clear();
        path.push_back(rev ? zp : zm);
        path.insert(path.end(), arm1.begin(), arm1.end());
        mid = path.size();
        path.push_back(zj);
        path.insert(path.end(), arm2.rbegin(), arm2.rend());
        path.push_back(rev ? zm : zp);
        if (rev) {
            std::reverse(path.begin(), path.end());
            mid = path.size() - 1 - mid;
        }
    } catch (const std::exception& e) {
        res.diagnostic = std::string("slit map failed: ") + e.what();
        return res;
    }
    res.theta = theta;

    // Split at the middle vertex and resample each half onto the edge grid.
    std::vector<cd> e1(path.begin(), path.begin() + mid + 1);
    std::vector<cd> e2(path.begin() + mid, path.end());
    std::size_t es = cfg.edge_samples;
    e1 = resample_polyline(e1, es + 1, false);
    e2 = resample_polyline(e2, es + 1, false);

    auto old_edge = [&](std::size_t from, std::size_t to) {
        std::vector<cd> e;
        for (std::size_t k = from;; k = (k + 1) % N) {
            e.push_back(pts[k]);
            if (k == to) break;
        }
        return resample_polyline(e, es + 1, false);
    };
    std::vector<cd> o1 = old_edge(vi[jm], vi[j]);
    std::vector<cd> o2 = old_edge(vi[j], vi[jp]);

    double d = damping_of(cfg, n);
    double disp = 0.0;
    for (std::size_t i = 0; i <= es; ++i) {
        disp = std::max(disp, std::abs(e1[i] - o1[i]));
        disp = std::max(disp, std::abs(e2[i] - o2[i]));
        e1[i] = o1[i] + d * (e1[i] - o1[i]);
        e2[i] = o2[i] + d * (e2[i] - o2[i]);
    }
    e1.front() = zm;
    e1.back() = zj;
    e2.front() = zj;
    e2.back() = zp;
    res.displacement = disp;

    std::vector<cd> ns;
    std::vector<std::size_t> nvi(n);
    for (std::size_t k = 0; k < n; ++k) {
        nvi[k] = ns.size();
        ns.push_back(pts[vi[k]]);
        if (k == jm) {
            ns.insert(ns.end(), e1.begin() + 1, e1.end() - 1);
        } else if (k == j) {
            ns.insert(ns.end(), e2.begin() + 1, e2.end() - 1);
        } else {
            for (std::size_t t = (vi[k] + 1) % N; t != vi[(k + 1) % n]; t = (t + 1) % N)
                ns.push_back(pts[t]);
        }
    }
    if (!is_simple_polyline(ns, true)) {
        res.diagnostic = "updated curve is not simple";
        return res;
    }

    PGCurve out;
    out.samples.reserve(ns.size());
    for (cd z : ns) out.samples.push_back(ExtComplex(z));
    out.vertex_indices = std::move(nvi);
    out.flags = g.flags.size() == n ? g.flags : std::vector<VertexFlag>(n);
    out.closed = true;
    res.curve = std::move(out);
    res.accepted = true;
    return res;
}

namespace {

// Points along the circular arc from b to c on the circle through a, b, c,
// avoiding a; straight segment when the triple is collinear.
std::vector<cd> arc_avoiding(cd a, cd b, cd c, std::size_t npts) {
    std::vector<cd> out(npts);
    cd u = b - a, v = c - b;
    double cross = u.real() * v.imag() - u.imag() * v.real();
    double scale = std::max({std::abs(u), std::abs(v), 1e-300});
    if (std::abs(cross) < 1e-12 * scale * scale) {
        for (std::size_t i = 0; i < npts; ++i)
            out[i] = b + (c - b) * (double(i) / double(npts - 1));
        return out;
    }
    // Circumcenter from the perpendicular bisector equations.
    double x1 = a.real(), y1 = a.imag(), x2 = b.real(), y2 = b.imag(), x3 = c.real(), y3 = c.imag();
    double d = 2.0 * (x1 * (y2 - y3) + x2 * (y3 - y1) + x3 * (y1 - y2));
    double ux = (std::norm(a) * (y2 - y3) + std::norm(b) * (y3 - y1) + std::norm(c) * (y1 - y2)) / d;
    double uy = (std::norm(a) * (x3 - x2) + std::norm(b) * (x1 - x3) + std::norm(c) * (x2 - x1)) / d;
    cd o(ux, uy);
    double R = std::abs(b - o);
    double tb = std::arg(b - o), tc = std::arg(c - o), ta = std::arg(a - o);
    auto mod2pi = [](double t) {
        t = std::fmod(t, 2 * kPi);
        return t < 0 ? t + 2 * kPi : t;
    };
    double dc = mod2pi(tc - tb), da = mod2pi(ta - tb);
    double sweep = (da < dc) ? dc - 2 * kPi : dc;
    for (std::size_t i = 0; i < npts; ++i)
        out[i] = o + std::polar(R, tb + sweep * double(i) / double(npts - 1));
    return out;
}

PGCurve assemble_curve(const std::vector<std::vector<cd>>& edges) {
    PGCurve g;
    std::size_t n = edges.size();
    g.vertex_indices.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        g.vertex_indices[k] = g.samples.size();
        for (std::size_t i = 0; i + 1 < edges[k].size(); ++i)
            g.samples.push_back(ExtComplex(edges[k][i]));
    }
    g.flags.assign(n, VertexFlag{});
    g.closed = true;
    return g;
}

}  // namespace

PGCurve initial_curve(const std::vector<cd>& vertices, std::size_t edge_samples) {
    std::size_t n = vertices.size();
    if (n < 3) throw std::invalid_argument("initial_curve: need at least 3 vertices");
    if (edge_samples < 4) throw std::invalid_argument("initial_curve: edge_samples < 4");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k)
            if (std::abs(vertices[i] - vertices[k]) == 0.0)
                throw std::invalid_argument("initial_curve: repeated vertex");

    std::vector<std::vector<cd>> edges(n);
    for (std::size_t k = 0; k < n; ++k) {
        cd a = vertices[(k + n - 1) % n], b = vertices[k];
        cd c = vertices[(k + 1) % n], d2 = vertices[(k + 2) % n];
        auto arc1 = arc_avoiding(a, b, c, edge_samples + 1);
        auto arc2 = arc_avoiding(d2, c, b, edge_samples + 1);
        std::reverse(arc2.begin(), arc2.end());
        edges[k].resize(edge_samples + 1);
        for (std::size_t i = 0; i <= edge_samples; ++i) {
            double t = double(i) / double(edge_samples);
            edges[k][i] = (1.0 - t) * arc1[i] + t * arc2[i];
        }
        edges[k].front() = b;
        edges[k].back() = c;
    }
    PGCurve g = assemble_curve(edges);
    if (is_simple_polyline(finite_of(g), true)) return g;

    for (std::size_t k = 0; k < n; ++k) {
        cd b = vertices[k], c = vertices[(k + 1) % n];
        for (std::size_t i = 0; i <= edge_samples; ++i)
            edges[k][i] = b + (c - b) * (double(i) / double(edge_samples));
    }
    g = assemble_curve(edges);
    if (!is_simple_polyline(finite_of(g), true))
        throw std::invalid_argument("initial_curve: vertices admit no simple polygon");
    return g;
}

SolveResult solve_through_vertices(const std::vector<cd>& vertices, const SolverConfig& cfg) {
    SolveResult out;
    std::size_t n = vertices.size();
    out.curve = initial_curve(vertices, cfg.edge_samples);
    double d = damping_of(cfg, n);
    for (std::size_t sweep = 1; sweep <= cfg.max_sweeps; ++sweep) {
        double maxd = 0.0;
        std::size_t rejected = 0;
        for (std::size_t j = 0; j < n; ++j) {
            UpdateResult r = update_edge_pair(out.curve, j, cfg);
            if (r.accepted) {
                out.curve = std::move(r.curve);
                maxd = std::max(maxd, d * r.displacement);
            } else {
                rejected++;
            }
        }
        out.log.push_back({sweep, maxd, rejected});
        if (rejected == n) break;
        if (maxd < cfg.tol_move * out.curve.diameter()) {
            out.converged = true;
            break;
        }
    }
    return out;
}

namespace {

ExtComplex project_real(const ExtComplex& w) {
    if (w.at_infinity) return ExtComplex::infinity();
    return ext_real(w.value.real());
}

double bp_key(const ExtComplex& b) {
    return b.at_infinity ? std::numeric_limits<double>::infinity() : b.value.real();
}

}  // namespace

ExtractedWelding extract_welding(const PGCurve& g, const SolverConfig&) {
    HalfPlaneMaps hm = half_plane_maps(g);
    std::size_t N = g.samples.size(), n = g.vertex_indices.size();
    if (n < 2) throw std::invalid_argument("extract_welding: need at least 2 vertices");

    ExtractedWelding out;
    out.x.resize(N);
    out.y.resize(N);
    for (std::size_t i = 0; i < N; ++i) {
        out.x[i] = project_real(hm.trace_plus[i]);
        out.y[i] = project_real(hm.trace_minus[i]);
    }

    const auto& vi = g.vertex_indices;
    std::vector<ExtComplex> bps(n);
    std::vector<Mobius> brs(n);
    out.edge_residuals.resize(n);
    for (std::size_t e = 0; e < n; ++e) {
        std::size_t a = vi[e];
        std::size_t span = (vi[(e + 1) % n] + N - a) % N;
        if (span < 4) throw std::invalid_argument("extract_welding: fewer than 4 samples on an edge");
        std::size_t offs[3] = {span / 4, span / 2, (3 * span) / 4};
        ExtComplex px[3], py[3];
        for (int q = 0; q < 3; ++q) {
            std::size_t off = offs[q];
            while (off + 1 < span &&
                   (out.x[(a + off) % N].at_infinity || out.y[(a + off) % N].at_infinity))
                ++off;
            px[q] = out.x[(a + off) % N];
            py[q] = out.y[(a + off) % N];
        }
        Mobius fit = Mobius::from_three_points(px[0], px[1], px[2], py[0], py[1], py[2]);
        double r = 0.0;
        for (std::size_t t = 0; t <= span; ++t) {
            std::size_t i = (a + t) % N;
            r = std::max(r, chordal(fit.apply(out.x[i]), out.y[i]));
        }
        out.edge_residuals[e] = r;
        bps[e] = out.x[a];
        brs[e] = fit;
    }
    out.vertex_breakpoints = bps;
    out.residual = *std::max_element(out.edge_residuals.begin(), out.edge_residuals.end());

    // The breakpoints run around R-hat monotonically; a clockwise curve
    // traverses them in decreasing order, in which case the arc between
    // consecutive vertices is the edge ending at the later one.
    std::size_t descents = 0;
    for (std::size_t k = 0; k < n; ++k)
        if (bp_key(bps[k]) > bp_key(bps[(k + 1) % n])) descents++;
    std::vector<ExtComplex> cb(n);
    std::vector<Mobius> cr(n);
    if (descents == 1) {
        cb = bps;
        cr = brs;
    } else if (descents == n - 1) {
        for (std::size_t k = 0; k < n; ++k) {
            cb[k] = bps[(n - k) % n];
            cr[k] = brs[(2 * n - k - 1) % n];
        }
    } else {
        throw NumericalError("extract_welding: boundary trace is not monotone");
    }
    // Far from a piecewise geodesic curve the per-edge fits do not meet at
    // the breakpoints; the residuals still quantify the misfit, so leave the
    // assembled map empty in that case instead of failing.
    double ctol = std::min(0.5, std::max(0.01, 50.0 * out.residual));
    try {
        out.map = PiecewiseMobius(std::move(cb), std::move(cr), ctol);
    } catch (const std::exception&) {
        return out;
    }
    // Numerical derivative jumps are unreliable at breakpoints far out on
    // the line, so normalization is not gated on them; the residual already
    // measures how well the map represents a welding.
    try {
        out.normalized = normalize(out.map, 1e9);
    } catch (const std::exception&) {
    }
    return out;
}

bool is_geodesic_edge(const ExtractedWelding& w, std::size_t edge, double tol) {
    if (edge >= w.edge_residuals.size())
        throw std::invalid_argument("is_geodesic_edge: edge index out of range");
    return w.edge_residuals[edge] < tol;
}

bool is_geodesic_edge(const PGCurve& g, std::size_t edge, double tol, const SolverConfig& cfg) {
    return is_geodesic_edge(extract_welding(g, cfg), edge, tol);
}

double check_modulus(const NormalizedWelding& w) {
    if (w.x.size() != 3 || w.y.size() != 3)
        throw std::invalid_argument("check_modulus: need a welding with four breakpoints");
    return std::abs(w.x[1] - w.y[1] / w.y[2]);
}

namespace {

double chordal_hausdorff(const std::vector<ExtComplex>& a, const std::vector<ExtComplex>& b) {
    double h = 0.0;
    auto one_sided = [&](const std::vector<ExtComplex>& p, const std::vector<ExtComplex>& q) {
        for (const auto& z : p) {
            double best = 4.0;
            for (const auto& w : q) best = std::min(best, chordal(z, w));
            h = std::max(h, best);
        }
    };
    one_sided(a, b);
    one_sided(b, a);
    return h;
}

}  // namespace

AutomorphismCheck check_automorphisms(const PGCurve& g, cd zeta) {
    std::size_t N = g.samples.size();
    if (N < 8) throw std::invalid_argument("check_automorphisms: too few samples");
    Mobius taus[3] = {
        Mobius(cd(0), zeta, cd(1), cd(0)),
        Mobius(cd(1), -zeta, cd(1), cd(-1)),
        Mobius(zeta, -zeta, cd(1), -zeta),
    };

    // Reference point just left of the longest finite edge.
    double best_len = -1.0;
    cd ref_p;
    double diam = g.diameter();
    std::vector<cd> fin;
    for (const auto& s : g.samples)
        if (s.is_finite()) fin.push_back(s.value);
    for (std::size_t i = 0; i < N; ++i) {
        const auto& s0 = g.samples[i];
        const auto& s1 = g.samples[(i + 1) % N];
        if (s0.at_infinity || s1.at_infinity) continue;
        cd t = s1.value - s0.value;
        double len = std::abs(t);
        if (len > best_len) {
            best_len = len;
            ref_p = 0.5 * (s0.value + s1.value) + cd(0, 1) * (t / len) * (1e-3 * len);
        }
    }
    if (best_len <= 0.0) throw std::invalid_argument("check_automorphisms: no finite edge");

    // Pole of the auxiliary finite chart, kept away from the curve trace.
    cd centroid = 0.0;
    for (cd z : fin) centroid += z;
    centroid /= double(fin.size());
    cd pole = centroid;
    double best_d = -1.0;
    for (int k = 0; k < 9; ++k) {
        cd cand = k == 0 ? centroid : centroid + std::polar(0.73 * diam, 2 * kPi * k / 8.0);
        double dmin = std::numeric_limits<double>::infinity();
        for (cd z : fin) dmin = std::min(dmin, std::abs(cand - z));
        if (dmin > best_d) {
            best_d = dmin;
            pole = cand;
        }
    }
    if (best_d <= 1e-9 * diam)
        throw NumericalError("check_automorphisms: no usable chart pole");

    auto sigma = [&](const ExtComplex& z) -> cd {
        if (z.at_infinity) return cd(0.0, 0.0);
        return 1.0 / (z.value - pole);
    };
    std::vector<cd> W(N);
    for (std::size_t i = 0; i < N; ++i) W[i] = sigma(g.samples[i]);
    int wp = winding_number(W, sigma(ExtComplex(ref_p)));

    AutomorphismCheck out;
    for (int k = 0; k < 3; ++k) {
        std::vector<ExtComplex> img(N);
        for (std::size_t i = 0; i < N; ++i) img[i] = taus[k].apply(g.samples[i]);
        out.distance[k] = chordal_hausdorff(g.samples, img);
        ExtComplex q = taus[k].apply(ExtComplex(ref_p));
        out.swaps_sides[k] = winding_number(W, sigma(q)) != wp;
    }
    return out;
}

double measure_spiral_rate(const std::vector<cd>& arm, cd zeta) {
    std::size_t m = arm.size();
    if (m < 8) throw std::invalid_argument("measure_spiral_rate: too few samples");
    std::vector<double> th(m), lr(m);
    double prev_raw = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        cd d = arm[i] - zeta;
        double r = std::abs(d);
        if (r == 0.0) throw std::invalid_argument("measure_spiral_rate: sample at the vertex");
        lr[i] = std::log(r);
        double a = std::arg(d);
        if (i == 0) {
            th[0] = a;
        } else {
            double delta = a - prev_raw;
            delta = std::remainder(delta, 2 * kPi);
            th[i] = th[i - 1] + delta;
        }
        prev_raw = a;
    }
    double total = th.back() - th.front();
    if (std::abs(total) < 4 * kPi - 1e-9)
        throw std::invalid_argument("measure_spiral_rate: fewer than two full turns");
    double s = total > 0 ? 1.0 : -1.0;

    std::vector<double> est_r, est_v;
    for (std::size_t i = 0; i < m; ++i) {
        double tau = th[i] - s * 2 * kPi;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            if ((th[k] - tau) * (th[k + 1] - tau) > 0.0) continue;
            double den = th[k + 1] - th[k];
            double f = std::abs(den) < 1e-300 ? 0.0 : (tau - th[k]) / den;
            double L = lr[k] + f * (lr[k + 1] - lr[k]);
            double diff = lr[i] - L;
            if (std::abs(diff) > 1e-300) {
                est_r.push_back(std::exp(lr[i]));
                est_v.push_back(s * 2 * kPi / diff);
            }
            break;
        }
    }
    if (est_v.empty()) throw std::invalid_argument("measure_spiral_rate: no full-turn pairs");
    if (est_v.size() < 3) return est_v.back();

    // Extrapolate the estimates to the vertex by a linear fit in radius.
    double sw = double(est_v.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < est_v.size(); ++i) {
        sx += est_r[i];
        sy += est_v[i];
        sxx += est_r[i] * est_r[i];
        sxy += est_r[i] * est_v[i];
    }
    double det = sw * sxx - sx * sx;
    if (std::abs(det) < 1e-300) return est_v.back();
    return (sy * sxx - sx * sxy) / det;
}

VertexFlag classify_vertex(const ExtractedWelding& w, std::size_t j, double tol) {
    if (j >= w.vertex_breakpoints.size())
        throw std::invalid_argument("classify_vertex: vertex index out of range");
    double jump = w.map.derivative_jump(w.vertex_breakpoints[j]);
    VertexFlag f;
    if (std::abs(jump - 1.0) <= tol) return f;
    f.c1 = false;
    f.spiral_rate = w.map.spiral_rate_from_jump(w.vertex_breakpoints[j]);
    return f;
}

namespace {

// Moebius-equivalence mismatch of two weldings with equal breakpoint counts,
// minimized over the cyclic alignment of the breakpoints.
double welding_mismatch(const PiecewiseMobius& target, const PiecewiseMobius& got) {
    std::size_t k = target.size();
    if (k < 3 || got.size() != k) return 2.0;
    const auto& tb = target.breakpoints();
    const auto& gb = got.breakpoints();
    double best = 2.0;
    for (std::size_t o = 0; o < k; ++o) {
        double err = 0.0;
        try {
            Mobius sig = Mobius::from_three_points(tb[0], tb[1], tb[2], gb[o], gb[(o + 1) % k],
                                                   gb[(o + 2) % k]);
            Mobius tau = Mobius::from_three_points(
                target.evaluate(tb[0]), target.evaluate(tb[1]), target.evaluate(tb[2]),
                got.evaluate(gb[o]), got.evaluate(gb[(o + 1) % k]), got.evaluate(gb[(o + 2) % k]));
            for (std::size_t i = 0; i < k; ++i) {
                ExtComplex xi = tb[i];
                err = std::max(err, chordal(got.evaluate(sig.apply(xi)),
                                            tau.apply(target.evaluate(xi))));
                const ExtComplex& b0 = tb[i];
                const ExtComplex& b1 = tb[(i + 1) % k];
                if (b0.is_finite() && b1.is_finite() && bp_key(b0) < bp_key(b1)) {
                    ExtComplex mid = ext_real(0.5 * (bp_key(b0) + bp_key(b1)));
                    err = std::max(err, chordal(got.evaluate(sig.apply(mid)),
                                                tau.apply(target.evaluate(mid))));
                }
            }
        } catch (const std::exception&) {
            continue;
        }
        best = std::min(best, err);
    }
    return best;
}

// Compact Nelder-Mead over R^dim.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, double step, std::size_t max_iter,
                                double ftol, double* fbest) {
    std::size_t d = x0.size();
    std::vector<std::vector<double>> S(d + 1, x0);
    std::vector<double> F(d + 1);
    for (std::size_t i = 0; i < d; ++i) S[i + 1][i] += step;
    for (std::size_t i = 0; i <= d; ++i) F[i] = f(S[i]);
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<std::size_t> ord(d + 1);
        for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return F[a] < F[b]; });
        if (F[ord[0]] < ftol || F[ord[d]] - F[ord[0]] < 1e-12) break;
        std::vector<double> cen(d, 0.0);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t q = 0; q < d; ++q) cen[q] += S[ord[i]][q] / double(d);
        auto mix = [&](double t) {
            std::vector<double> p(d);
            for (std::size_t q = 0; q < d; ++q) p[q] = cen[q] + t * (S[ord[d]][q] - cen[q]);
            return p;
        };
        auto xr = mix(-1.0);
        double fr = f(xr);
        if (fr < F[ord[0]]) {
            auto xe = mix(-2.0);
            double fe = f(xe);
            if (fe < fr) { S[ord[d]] = xe; F[ord[d]] = fe; }
            else { S[ord[d]] = xr; F[ord[d]] = fr; }
        } else if (fr < F[ord[d - 1]]) {
            S[ord[d]] = xr;
            F[ord[d]] = fr;
        } else {
            auto xc = mix(0.5);
            double fc = f(xc);
            if (fc < F[ord[d]]) {
                S[ord[d]] = xc;
                F[ord[d]] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t q = 0; q < d; ++q)
                        S[ord[i]][q] = 0.5 * (S[ord[i]][q] + S[ord[0]][q]);
                    F[ord[i]] = f(S[ord[i]]);
                }
            }
        }
    }
    std::size_t ib = 0;
    for (std::size_t i = 1; i <= d; ++i)
        if (F[i] < F[ib]) ib = i;
    if (fbest) *fbest = F[ib];
    return S[ib];
}

}  // namespace

CurveFromWeldingResult curve_from_welding(const PiecewiseMobius& omega, const SolverConfig& cfg) {
    CurveFromWeldingResult out;
    std::size_t n = omega.size();
    if (n < 4) {
        // All weldings with up to three breakpoints are Moebius-equivalent;
        // any three vertices carry a round circle through them.
        SolveResult s = solve_through_vertices({cd(1, 0), cd(0, 1), cd(-1, 0)}, cfg);
        out.curve = std::move(s.curve);
        out.converged = s.converged;
        return out;
    }
    // Gauge: three vertices fixed, the remaining ones free.
    std::vector<cd> init(n);
    cd w0 = std::polar(1.0, 0.0), w1 = std::polar(1.0, 2 * kPi / n);
    for (std::size_t k = 0; k < n; ++k)
        init[k] = (std::polar(1.0, 2 * kPi * k / double(n)) - w0) / (w1 - w0);

    auto vertices_of = [&](const std::vector<double>& p) {
        std::vector<cd> vs = init;
        for (std::size_t k = 3; k < n; ++k)
            vs[k] = cd(p[2 * (k - 3)], p[2 * (k - 3) + 1]);
        return vs;
    };
    auto objective = [&](const std::vector<double>& p) -> double {
        try {
            SolveResult s = solve_through_vertices(vertices_of(p), cfg);
            ExtractedWelding w = extract_welding(s.curve, cfg);
            return welding_mismatch(omega, w.map);
        } catch (const std::exception&) {
            return 3.0;
        }
    };

    std::vector<double> p0(2 * (n - 3));
    for (std::size_t k = 3; k < n; ++k) {
        p0[2 * (k - 3)] = init[k].real();
        p0[2 * (k - 3) + 1] = init[k].imag();
    }
    double fb = 0.0;
    std::vector<double> pb =
        nelder_mead(objective, p0, 0.15, 30 * p0.size(), 1e-6, &fb);

    SolveResult s = solve_through_vertices(vertices_of(pb), cfg);
    out.curve = std::move(s.curve);
    out.welding_error = fb;
    out.converged = s.converged && fb < 1e-2;
    return out;
}

}  // namespace pgc
