#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

namespace pgc {

using cd = std::complex<double>;

// A point of the Riemann sphere: a finite complex value or the point at
// infinity. Infinity is an explicit flag, never a large float.
struct ExtComplex {
    cd value{0.0, 0.0};
    bool at_infinity = false;

    ExtComplex() = default;
    ExtComplex(cd v) : value(v), at_infinity(false) {}
    ExtComplex(double v) : value(v, 0.0), at_infinity(false) {}

    static ExtComplex infinity() {
        ExtComplex e;
        e.at_infinity = true;
        e.value = cd(0.0, 0.0);
        return e;
    }

    bool is_finite() const { return !at_infinity; }

    cd finite() const {
        if (at_infinity) throw std::domain_error("ExtComplex: value at infinity");
        return value;
    }

    bool operator==(const ExtComplex& o) const {
        if (at_infinity || o.at_infinity) return at_infinity == o.at_infinity;
        return value == o.value;
    }
    bool operator!=(const ExtComplex& o) const { return !(*this == o); }
};

// Chordal (spherical) distance, bounded by 2, defined at infinity.
inline double chordal(const ExtComplex& z, const ExtComplex& w) {
    if (z.at_infinity && w.at_infinity) return 0.0;
    if (z.at_infinity) return 2.0 / std::sqrt(1.0 + std::norm(w.value));
    if (w.at_infinity) return 2.0 / std::sqrt(1.0 + std::norm(z.value));
    return 2.0 * std::abs(z.value - w.value) /
           std::sqrt((1.0 + std::norm(z.value)) * (1.0 + std::norm(w.value)));
}

inline double chordal(cd z, cd w) { return chordal(ExtComplex(z), ExtComplex(w)); }

// Approximate equality on the sphere.
inline bool sphere_close(const ExtComplex& z, const ExtComplex& w, double tol) {
    return chordal(z, w) <= tol;
}

// Points of the extended real line reuse ExtComplex with real values.
inline ExtComplex ext_real(double x) { return ExtComplex(cd(x, 0.0)); }

inline double real_of(const ExtComplex& x) {
    if (x.at_infinity) throw std::domain_error("ext real: infinity has no finite value");
    return x.value.real();
}

// Cyclic order test on the extended line: is b strictly inside the arc
// from a to c traversed in increasing direction (through +inf -> -inf)?
inline bool cyclic_between(const ExtComplex& a, const ExtComplex& b, const ExtComplex& c) {
    auto key = [](const ExtComplex& p) {
        // order reals increasingly, infinity last
        return p.at_infinity ? std::numeric_limits<double>::infinity() : p.value.real();
    };
    double ka = key(a), kb = key(b), kc = key(c);
    if (ka == kb || kb == kc || ka == kc) return false;
    if (ka < kc) return ka < kb && kb < kc;
    return kb > ka || kb < kc;  // arc wraps through infinity
}

}  // namespace pgc
