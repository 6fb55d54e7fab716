#include "pgc/mobius.hpp"

#include <algorithm>
#include <cmath>

namespace pgc {

Mobius::Mobius(cd a, cd b, cd c, cd d) : a_(a), b_(b), c_(c), d_(d) { normalize(); }

void Mobius::normalize() {
    cd det = a_ * d_ - b_ * c_;
    double scale = std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
    if (scale == 0.0 || std::abs(det) <= 1e-300 * scale * scale)
        throw std::invalid_argument("Mobius: singular coefficient matrix");
    cd s = std::sqrt(det);
    a_ /= s;
    b_ /= s;
    c_ /= s;
    d_ /= s;

    // Resolve the A ~ -A ambiguity: first nonzero coefficient in (a,b,c,d)
    // gets nonnegative real part, tie broken by nonnegative imaginary part.
    double mx = std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
    const double eps = 1e-12 * mx;
    for (cd v : {a_, b_, c_, d_}) {
        if (std::abs(v) <= eps) continue;
        bool flip;
        if (std::abs(v.real()) > eps)
            flip = v.real() < 0.0;
        else
            flip = v.imag() < 0.0;
        if (flip) {
            a_ = -a_;
            b_ = -b_;
            c_ = -c_;
            d_ = -d_;
        }
        break;
    }
}

ExtComplex Mobius::apply(const ExtComplex& z) const {
    if (z.at_infinity) {
        if (std::abs(c_) == 0.0) return ExtComplex::infinity();
        return ExtComplex(a_ / c_);
    }
    cd num = a_ * z.value + b_;
    cd den = c_ * z.value + d_;
    if (std::abs(den) == 0.0) return ExtComplex::infinity();
    return ExtComplex(num / den);
}

cd Mobius::operator()(cd z) const {
    cd den = c_ * z + d_;
    if (std::abs(den) == 0.0) throw std::domain_error("Mobius: pole input");
    return (a_ * z + b_) / den;
}

cd Mobius::derivative(cd z) const {
    cd den = c_ * z + d_;
    if (std::abs(den) == 0.0) throw std::domain_error("Mobius::derivative: pole input");
    return 1.0 / (den * den);
}

double Mobius::slope_at_infinity() const {
    if (std::abs(c_) > 0.0) {
        // Conjugate by the inversion s(x) = -1/x, which fixes H: the slope at
        // infinity is the derivative of s o T o s^{-1} at 0.
        Mobius s(cd(0), cd(-1), cd(1), cd(0));
        Mobius t = s.compose(*this).compose(s.inverse());
        return t.derivative(cd(0)).real();
    }
    return (a_ / d_).real();
}

Mobius Mobius::compose(const Mobius& o) const {
    return Mobius(a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_,
                  c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_);
}

Mobius Mobius::inverse() const { return Mobius(d_, -b_, -c_, a_); }

namespace {

// Coefficient matrix of the map sending (p,q,r) to (0,1,infinity).
std::array<cd, 4> to_standard_triple(const ExtComplex& p, const ExtComplex& q,
                                     const ExtComplex& r) {
    if (p.at_infinity) {
        // z -> (q-r)/(z-r)
        return {cd(0), q.finite() - r.finite(), cd(1), -r.finite()};
    }
    if (q.at_infinity) {
        // z -> (z-p)/(z-r)
        return {cd(1), -p.finite(), cd(1), -r.finite()};
    }
    if (r.at_infinity) {
        // z -> (z-p)/(q-p)
        return {cd(1), -p.finite(), cd(0), q.finite() - p.finite()};
    }
    cd pp = p.finite(), qq = q.finite(), rr = r.finite();
    return {qq - rr, -pp * (qq - rr), qq - pp, -rr * (qq - pp)};
}

bool distinct3(const ExtComplex& p, const ExtComplex& q, const ExtComplex& r) {
    return p != q && q != r && p != r;
}

}  // namespace

Mobius Mobius::from_three_points(const ExtComplex& p, const ExtComplex& q,
                                 const ExtComplex& r, const ExtComplex& P,
                                 const ExtComplex& Q, const ExtComplex& R) {
    if (!distinct3(p, q, r))
        throw std::invalid_argument("from_three_points: coincident source points");
    if (!distinct3(P, Q, R))
        throw std::invalid_argument("from_three_points: coincident target points");
    auto m1 = to_standard_triple(p, q, r);
    auto m2 = to_standard_triple(P, Q, R);
    Mobius M1(m1[0], m1[1], m1[2], m1[3]);
    Mobius M2(m2[0], m2[1], m2[2], m2[3]);
    return M2.inverse().compose(M1);
}

Mobius Mobius::from_point_pair_and_derivative(double a, double b, double alpha,
                                              double beta, double delta) {
    if (a == b || alpha == beta || !(delta > 0.0))
        throw std::invalid_argument("from_point_pair_and_derivative: degenerate input");
    // Closed form of S2^{-1} o S1, expanded in extended precision: with
    // k = delta (a-b)/(alpha-beta), T = ((alpha-beta k) z + (beta k a - alpha b))
    // / ((1-k) z + (k a - b)).
    long double la = a, lb = b, lal = alpha, lbe = beta, ld = delta;
    long double k = ld * (la - lb) / (lal - lbe);
    long double ca = lal - lbe * k;
    long double cb = lbe * k * la - lal * lb;
    long double cc = 1.0L - k;
    long double cdd = k * la - lb;
    return Mobius(cd(double(ca)), cd(double(cb)), cd(double(cc)), cd(double(cdd)));
}

bool Mobius::is_real_increasing(double tol) const {
    // After det-1 canonical normalization, a positive-determinant real
    // representative exists iff all four coefficients are (numerically) real.
    double mx = std::max({std::abs(a_), std::abs(b_), std::abs(c_), std::abs(d_)});
    double im = std::max({std::abs(a_.imag()), std::abs(b_.imag()),
                          std::abs(c_.imag()), std::abs(d_.imag())});
    return im <= tol * std::max(1.0, mx);
}

bool Mobius::coeff_close(const Mobius& o, double tol) const {
    return std::abs(a_ - o.a_) <= tol && std::abs(b_ - o.b_) <= tol &&
           std::abs(c_ - o.c_) <= tol && std::abs(d_ - o.d_) <= tol;
}

}  // namespace pgc
