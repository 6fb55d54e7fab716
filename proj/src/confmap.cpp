#include "pgc/confmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pgc/errors.hpp"

namespace pgc {

namespace {

cd half_plane_sqrt(cd t, double real_sign_hint) {
    cd r = std::sqrt(t);
    if (r.imag() < 0.0)
        r = -r;
    else if (r.imag() == 0.0 && real_sign_hint < 0.0)
        r = -r;
    return r;
}

// One slit-opening stage sigma = z/(1 - z/x_c), w = sqrt(sigma^2 + h^2).
// Points that have drifted off the real axis by rounding are snapped back:
// an unzipped boundary sample must stay exactly real, with the sign of
// Re sigma deciding the side of the slit base.
ExtComplex stage_forward(double inv_xc, double h, const ExtComplex& z) {
    cd s;
    if (z.at_infinity) {
        if (inv_xc == 0.0) return ExtComplex::infinity();
        s = cd(-1.0 / inv_xc, 0);
    } else {
        cd den = 1.0 - z.value * inv_xc;
        if (std::abs(den) == 0.0) return ExtComplex::infinity();
        s = z.value / den;
    }
    if (std::abs(s.imag()) <= 1e-11 * std::max(1.0, std::abs(s.real()))) {
        double x = s.real();
        double r = std::hypot(x, h);
        return ExtComplex(cd(x < 0.0 ? -r : r, 0.0));
    }
    cd r = std::sqrt(s * s + h * h);
    if (r.imag() < 0.0) r = -r;
    return ExtComplex(r);
}

}  // namespace

ExtComplex DiscreteConformalMap::forward_raw(const ExtComplex& z) const {
    // initial opening map i sqrt((z - zb)/(z - za))
    ExtComplex cur;
    if (z.at_infinity) {
        cur = ExtComplex(cd(0, 1));
    } else if (std::abs(z.value - za_) == 0.0) {
        cur = ExtComplex::infinity();
    } else {
        cd ratio = (z.value - zb_) / (z.value - za_);
        cur = ExtComplex(cd(0, 1) * std::sqrt(ratio));
    }

    for (const Stage& s : stages_) cur = stage_forward(s.inv_xc, s.h, cur);

    // closing: nu(z) = z/(1 - z/p0), then +-nu^2
    ExtComplex nu;
    if (cur.at_infinity) {
        nu = inv_p0_ == 0.0 ? ExtComplex::infinity() : ExtComplex(cd(-1.0 / inv_p0_, 0));
    } else {
        cd den = 1.0 - cur.value * inv_p0_;
        if (std::abs(den) == 0.0)
            nu = ExtComplex::infinity();
        else
            nu = ExtComplex(cur.value / den);
    }
    if (nu.at_infinity) return ExtComplex::infinity();
    return ExtComplex(sign_ * nu.value * nu.value);
}

ExtComplex DiscreteConformalMap::evaluate_ext(const ExtComplex& z) const {
    ExtComplex w = forward_raw(z);
    if (w.at_infinity) return ExtComplex(rot_);
    cd den = w.value - std::conj(q_);
    if (std::abs(den) == 0.0) return ExtComplex::infinity();
    return ExtComplex(rot_ * (w.value - q_) / den);
}

cd DiscreteConformalMap::evaluate(cd z) const {
    ExtComplex w = evaluate_ext(ExtComplex(z));
    if (w.at_infinity) throw std::domain_error("DiscreteConformalMap::evaluate: pole hit");
    return w.value;
}

cd DiscreteConformalMap::invert(cd w) const {
    if (std::abs(w) > 1.0 + 1e-9)
        throw std::domain_error("DiscreteConformalMap::invert: w outside the closed disc");
    cd c = w / rot_;
    cd den = 1.0 - c;
    if (std::abs(den) == 0.0)
        throw std::domain_error("DiscreteConformalMap::invert: boundary pole");
    cd cur = (q_ - c * std::conj(q_)) / den;

    // reverse the closing square and pole
    cd u = sign_ * cur;
    cd nu = sign_ * std::sqrt(u);
    cur = nu / (1.0 + nu * inv_p0_);

    for (auto it = stages_.rbegin(); it != stages_.rend(); ++it) {
        cd t = cur * cur - it->h * it->h;
        cd sig = half_plane_sqrt(t, cur.real());
        cur = sig / (1.0 + sig * it->inv_xc);
    }

    cd rr = -cur * cur;
    cd den2 = 1.0 - rr;
    if (std::abs(den2) == 0.0)
        throw std::domain_error("DiscreteConformalMap::invert: initial-map pole");
    return (zb_ - za_ * rr) / den2;
}

std::vector<cd> DiscreteConformalMap::evaluate_batch(const std::vector<cd>& pts,
                                                     bool parallel) const {
    std::vector<cd> out(pts.size());
#ifdef PGC_HAVE_OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)pts.size(); ++i)
            out[(std::size_t)i] = evaluate(pts[(std::size_t)i]);
        return out;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < pts.size(); ++i) out[i] = evaluate(pts[i]);
    return out;
}

std::vector<cd> DiscreteConformalMap::invert_batch(const std::vector<cd>& ws,
                                                   bool parallel) const {
    std::vector<cd> out(ws.size());
#ifdef PGC_HAVE_OPENMP
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (long long i = 0; i < (long long)ws.size(); ++i)
            out[(std::size_t)i] = invert(ws[(std::size_t)i]);
        return out;
    }
#else
    (void)parallel;
#endif
    for (std::size_t i = 0; i < ws.size(); ++i) out[i] = invert(ws[i]);
    return out;
}

std::vector<BoundaryImage> DiscreteConformalMap::boundary_trace() const {
    std::vector<BoundaryImage> out;
    out.reserve(boundary_.size());
    for (std::size_t j = 0; j < boundary_.size(); ++j)
        out.push_back({boundary_[j], trace_[j]});
    return out;
}

DiscreteConformalMap DiscreteConformalMap::disk_map(const std::vector<cd>& boundary,
                                                    cd z0) {
    const std::size_t n = boundary.size();
    if (n < 4) throw std::invalid_argument("disk_map: need at least 4 boundary samples");
    if (!is_simple_polyline(boundary, true))
        throw std::invalid_argument("disk_map: boundary is self-intersecting");
    if (winding_number(boundary, z0) == 0)
        throw std::invalid_argument("disk_map: z0 is not an interior point");

    DiscreteConformalMap m;
    m.boundary_ = boundary;
    m.zint_ = z0;
    m.za_ = boundary[0];
    m.zb_ = boundary[1];
    double diam = polyline_diameter(boundary);

    // Track the running images of the untreated boundary samples, of the
    // first sample (closing pole) and of the anchor.
    auto initial = [&](const ExtComplex& z) {
        if (z.at_infinity) return ExtComplex(cd(0, 1));
        if (std::abs(z.value - m.za_) == 0.0) return ExtComplex::infinity();
        return ExtComplex(cd(0, 1) * std::sqrt((z.value - m.zb_) / (z.value - m.za_)));
    };
    std::vector<ExtComplex> img(n);
    for (std::size_t j = 0; j < n; ++j) img[j] = initial(ExtComplex(boundary[j]));
    ExtComplex aimg = initial(ExtComplex(z0));

    auto apply = [](const Stage& s, const ExtComplex& z) {
        return stage_forward(s.inv_xc, s.h, z);
    };

    m.stages_.reserve(n - 2);
    for (std::size_t k = 2; k < n; ++k) {
        if (img[k].at_infinity)
            throw NumericalError("disk_map: boundary image escaped to infinity");
        cd zeta = img[k].value;
        double b = zeta.imag();
        double mag = std::abs(zeta);
        // skip samples already unzipped onto the real line
        if (b <= 1e-13 * std::max(1.0, mag) || mag < 1e-13) continue;
        Stage s;
        s.inv_xc = zeta.real() / std::norm(zeta);
        s.h = std::norm(zeta) / b;
        m.stages_.push_back(s);
        img[0] = apply(s, img[0]);
        for (std::size_t j = k + 1; j < n; ++j) img[j] = apply(s, img[j]);
        aimg = apply(s, aimg);
    }

    if (img[0].at_infinity || aimg.at_infinity)
        throw NumericalError("disk_map: degenerate closing configuration");
    double p0 = img[0].value.real();
    m.inv_p0_ = std::abs(p0) < 1e-280 ? 0.0 : 1.0 / p0;

    cd den = 1.0 - aimg.value * m.inv_p0_;
    if (std::abs(den) == 0.0) throw NumericalError("disk_map: anchor hits closing pole");
    cd nu = aimg.value / den;
    cd u = nu * nu;
    m.sign_ = u.imag() >= 0.0 ? 1.0 : -1.0;
    m.q_ = m.sign_ * u;
    if (!(m.q_.imag() > 0.0))
        throw NumericalError("disk_map: anchor failed to land in the half plane");

    // final rotation: positive real derivative at the anchor
    m.rot_ = cd(1, 0);
    double h = 1e-6 * std::max(diam, 1.0);
    cd d = (m.evaluate(z0 + h) - m.evaluate(z0 - h)) / (2.0 * h);
    if (std::abs(d) == 0.0) throw NumericalError("disk_map: vanishing anchor derivative");
    m.rot_ = std::conj(d) / std::abs(d);

    // Boundary images as inward limits. Replaying a boundary sample through
    // the stage stack loses the side of the slit base it sits on, so each
    // sample is nudged slightly into the domain instead; the image error is
    // of the order of the nudge relative to the local sample spacing.
    // Nudge along the interior angle bisector, which points into the domain
    // at every vertex of a simple polygon, convex or reflex.
    double orient = signed_area(boundary) >= 0.0 ? 1.0 : -1.0;
    m.trace_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        cd u = boundary[(j + 1) % n] - boundary[j];
        cd v = boundary[(j + n - 1) % n] - boundary[j];
        if (orient < 0.0) std::swap(u, v);
        if (std::abs(u) == 0.0 || std::abs(v) == 0.0)
            throw NumericalError("disk_map: repeated boundary sample");
        double alpha = std::arg(v / u);
        if (alpha <= 0.0) alpha += 2.0 * std::numbers::pi;
        cd dir = (u / std::abs(u)) * std::polar(1.0, alpha / 2.0);
        double scale = 1e-6 * std::min(std::abs(u), std::abs(v));
        ExtComplex w = m.evaluate_ext(ExtComplex(boundary[j] + scale * dir));
        if (w.at_infinity || std::abs(w.value) == 0.0 || std::abs(w.value) > 1.0 + 1e-9)
            throw NumericalError("disk_map: could not trace a boundary sample");
        m.trace_[j] = w.value / std::abs(w.value);
    }

    double worst = 1e-12;
    for (std::size_t j = 0; j < n; ++j) {
        cd mid = 0.5 * (boundary[j] + boundary[(j + 1) % n]);
        ExtComplex w = m.evaluate_ext(ExtComplex(mid));
        if (!w.at_infinity)
            worst = std::max(worst, std::abs(std::abs(w.value) - 1.0));
    }
    m.accuracy_ = worst;
    return m;
}

DiscreteConformalMap disk_map(const std::vector<cd>& boundary, cd z0) {
    return DiscreteConformalMap::disk_map(boundary, z0);
}

cd evaluate(const DiscreteConformalMap& map, cd z) { return map.evaluate(z); }

cd invert(const DiscreteConformalMap& map, cd w) { return map.invert(w); }

std::vector<BoundaryImage> boundary_trace(const DiscreteConformalMap& map) {
    return map.boundary_trace();
}

ExtComplex cayley_upper(const ExtComplex& w) {
    if (w.at_infinity) return ExtComplex(cd(0, -1));
    cd den = 1.0 - w.value;
    if (std::abs(den) < 1e-15 * (1.0 + std::abs(w.value))) return ExtComplex::infinity();
    return ExtComplex(cd(0, 1) * (1.0 + w.value) / den);
}

ExtComplex cayley_lower(const ExtComplex& w) {
    ExtComplex u = cayley_upper(w);
    if (u.at_infinity) return u;
    return ExtComplex(-u.value);
}

cd cayley_upper_inv(cd z) { return (z - cd(0, 1)) / (z + cd(0, 1)); }

cd cayley_lower_inv(cd z) { return (z + cd(0, 1)) / (z - cd(0, 1)); }

cd interior_point(const std::vector<cd>& boundary) {
    const std::size_t n = boundary.size();
    double diam = polyline_diameter(boundary);
    std::vector<cd> candidates;
    cd centroid(0, 0);
    for (cd z : boundary) centroid += z;
    centroid /= (double)n;
    candidates.push_back(centroid);
    std::size_t stride = std::max<std::size_t>(1, n / 16);
    for (std::size_t i = 0; i < n; i += stride)
        for (std::size_t d : {n / 3, n / 2})
            candidates.push_back(0.5 * (boundary[i] + boundary[(i + d) % n]));

    cd best(0, 0);
    double best_dist = -1.0;
    for (cd c : candidates) {
        if (winding_number(boundary, c) == 0) continue;
        double dist = distance_to_polyline(c, boundary, true);
        if (dist > best_dist) {
            best_dist = dist;
            best = c;
        }
    }
    if (best_dist <= 1e-9 * diam)
        throw NumericalError("interior_point: no well-separated interior point found");
    return best;
}

cd HalfPlaneMaps::to_upper(cd z) const {
    ExtComplex w = cayley_upper(plus.dm.evaluate_ext(ExtComplex(plus.pre(z))));
    if (w.at_infinity) throw std::domain_error("to_upper: boundary pole");
    return w.value;
}

cd HalfPlaneMaps::to_lower(cd z) const {
    ExtComplex w = cayley_lower(minus.dm.evaluate_ext(ExtComplex(minus.pre(z))));
    if (w.at_infinity) throw std::domain_error("to_lower: boundary pole");
    return w.value;
}

cd HalfPlaneMaps::from_upper(cd w) const {
    return plus.pre_inv(plus.dm.invert(cayley_upper_inv(w)));
}

cd HalfPlaneMaps::from_lower(cd w) const {
    return minus.pre_inv(minus.dm.invert(cayley_lower_inv(w)));
}

HalfPlaneMaps half_plane_maps(const PGCurve& gamma) {
    if (!gamma.closed) throw std::invalid_argument("half_plane_maps: curve not closed");
    for (const auto& s : gamma.samples)
        if (!s.is_finite())
            throw std::invalid_argument("half_plane_maps: curve passes through infinity");
    std::vector<cd> pts = gamma.finite_samples();
    if (pts.size() < 4) throw std::invalid_argument("half_plane_maps: too few samples");
    if (!is_simple_polyline(pts, true))
        throw std::invalid_argument("half_plane_maps: curve is not simple");

    cd inner = interior_point(pts);
    DiscreteConformalMap bounded = DiscreteConformalMap::disk_map(pts, inner);
    std::vector<cd> mpts(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) mpts[j] = 1.0 / (pts[j] - inner);
    DiscreteConformalMap unbounded = DiscreteConformalMap::disk_map(mpts, cd(0, 0));

    HalfPlaneMaps hm;
    bool ccw = signed_area(pts) > 0.0;
    if (ccw) {
        hm.plus = SideMap{bounded, false, cd(0, 0)};
        hm.minus = SideMap{unbounded, true, inner};
    } else {
        hm.plus = SideMap{unbounded, true, inner};
        hm.minus = SideMap{bounded, false, cd(0, 0)};
    }

    auto tp = hm.plus.dm.boundary_trace();
    auto tm = hm.minus.dm.boundary_trace();
    hm.trace_plus.reserve(pts.size());
    hm.trace_minus.reserve(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
        hm.trace_plus.push_back(cayley_upper(ExtComplex(tp[j].circle)));
        hm.trace_minus.push_back(cayley_lower(ExtComplex(tm[j].circle)));
    }
    return hm;
}

}  // namespace pgc
