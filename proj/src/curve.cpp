#include "pgc/curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pgc {

std::vector<cd> PGCurve::finite_samples() const {
    std::vector<cd> out;
    out.reserve(samples.size());
    for (const auto& s : samples)
        if (s.is_finite()) out.push_back(s.value);
    return out;
}

double PGCurve::diameter() const { return polyline_diameter(finite_samples()); }

double signed_area(const std::vector<cd>& p) {
    double a = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cd& u = p[i];
        const cd& v = p[(i + 1) % n];
        a += u.real() * v.imag() - v.real() * u.imag();
    }
    return 0.5 * a;
}

double polyline_diameter(const std::vector<cd>& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = i + 1; j < p.size(); ++j)
            d = std::max(d, std::abs(p[i] - p[j]));
    return d;
}

namespace {

double cross(cd o, cd a, cd b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) -
           (a.imag() - o.imag()) * (b.real() - o.real());
}

bool on_segment(cd a, cd b, cd q) {
    return std::min(a.real(), b.real()) - 1e-15 <= q.real() &&
           q.real() <= std::max(a.real(), b.real()) + 1e-15 &&
           std::min(a.imag(), b.imag()) - 1e-15 <= q.imag() &&
           q.imag() <= std::max(a.imag(), b.imag()) + 1e-15;
}

bool segments_intersect(cd a, cd b, cd c, cd d) {
    double d1 = cross(c, d, a);
    double d2 = cross(c, d, b);
    double d3 = cross(a, b, c);
    double d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(c, d, a)) return true;
    if (d2 == 0 && on_segment(c, d, b)) return true;
    if (d3 == 0 && on_segment(a, b, c)) return true;
    if (d4 == 0 && on_segment(a, b, d)) return true;
    return false;
}

}  // namespace

bool is_simple_polyline(const std::vector<cd>& p, bool closed) {
    const std::size_t n = p.size();
    if (n < 3) return true;
    const std::size_t segs = closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i) {
        cd a = p[i], b = p[(i + 1) % n];
        for (std::size_t j = i + 1; j < segs; ++j) {
            bool adjacent = (j == i + 1) || (closed && i == 0 && j == segs - 1);
            if (adjacent) continue;
            cd c = p[j], d = p[(j + 1) % n];
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

int winding_number(const std::vector<cd>& p, cd z) {
    double total = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        cd u = p[i] - z;
        cd v = p[(i + 1) % n] - z;
        total += std::arg(v / u);
    }
    return (int)std::lround(total / (2.0 * M_PI));
}

double point_segment_distance(cd z, cd a, cd b) {
    cd ab = b - a;
    double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(z - a);
    double t = ((z.real() - a.real()) * ab.real() + (z.imag() - a.imag()) * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * ab));
}

double distance_to_polyline(cd z, const std::vector<cd>& p, bool closed) {
    if (p.empty()) throw std::invalid_argument("distance_to_polyline: empty polyline");
    if (p.size() == 1) return std::abs(z - p[0]);
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = p.size();
    const std::size_t segs = closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i)
        d = std::min(d, point_segment_distance(z, p[i], p[(i + 1) % n]));
    return d;
}

double hausdorff_distance(const std::vector<cd>& a, bool a_closed,
                          const std::vector<cd>& b, bool b_closed) {
    double h = 0.0;
    for (cd z : a) h = std::max(h, distance_to_polyline(z, b, b_closed));
    for (cd z : b) h = std::max(h, distance_to_polyline(z, a, a_closed));
    return h;
}

std::vector<cd> resample_polyline(const std::vector<cd>& p, std::size_t n, bool closed) {
    if (p.size() < 2 || n < 2)
        throw std::invalid_argument("resample_polyline: need at least 2 points");
    std::vector<cd> pts = p;
    if (closed) pts.push_back(p.front());
    std::vector<double> cum(pts.size(), 0.0);
    for (std::size_t i = 1; i < pts.size(); ++i)
        cum[i] = cum[i - 1] + std::abs(pts[i] - pts[i - 1]);
    double total = cum.back();
    if (total == 0.0) return std::vector<cd>(n, p.front());
    std::vector<cd> out;
    out.reserve(n);
    // Closed curves get n distinct points; open curves include both endpoints.
    std::size_t steps = closed ? n : n - 1;
    std::size_t seg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double target = total * (double)k / (double)steps;
        while (seg + 2 < pts.size() && cum[seg + 1] < target) ++seg;
        double len = cum[seg + 1] - cum[seg];
        double t = len > 0.0 ? (target - cum[seg]) / len : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        out.push_back(pts[seg] + t * (pts[seg + 1] - pts[seg]));
    }
    return out;
}

}  // namespace pgc
