#pragma once

#include <array>

#include "pgc/ext_complex.hpp"

namespace pgc {

// Moebius transformation z -> (az+b)/(cz+d), stored determinant-normalized
// (ad - bc = 1) in a canonical representative of the pair {A, -A}.
class Mobius {
  public:
    Mobius() : a_(1), b_(0), c_(0), d_(1) {}
    Mobius(cd a, cd b, cd c, cd d);

    static Mobius identity() { return Mobius(); }

    cd a() const { return a_; }
    cd b() const { return b_; }
    cd c() const { return c_; }
    cd d() const { return d_; }

    ExtComplex apply(const ExtComplex& z) const;
    ExtComplex operator()(const ExtComplex& z) const { return apply(z); }
    cd operator()(cd z) const;  // finite input, finite output expected

    // T'(z) = 1/(cz+d)^2 for det-1 coefficients. Throws at the pole.
    cd derivative(cd z) const;

    // Derivative in the chart at infinity, lim T(x)/x (affine) resp. a/c.
    // Used for derivative jumps of welding maps at the breakpoint infinity.
    double slope_at_infinity() const;

    Mobius compose(const Mobius& o) const;  // this after o
    Mobius inverse() const;

    static Mobius from_three_points(const ExtComplex& p, const ExtComplex& q,
                                    const ExtComplex& r, const ExtComplex& P,
                                    const ExtComplex& Q, const ExtComplex& R);

    // Unique T with T(a)=alpha, T(b)=beta, T'(a)=delta, via T = S2^{-1} o S1
    // with S1(z) = delta (a-b)/(alpha-beta) (z-a)/(z-b), S2(z) = (z-alpha)/(z-beta).
    static Mobius from_point_pair_and_derivative(double a, double b, double alpha,
                                                 double beta, double delta);

    // True iff T has a real representative with positive determinant,
    // i.e. T is an increasing homeomorphism of the extended real line.
    bool is_real_increasing(double tol = 1e-9) const;

    bool coeff_close(const Mobius& o, double tol) const;

    std::array<cd, 4> coeffs() const { return {a_, b_, c_, d_}; }

  private:
    cd a_, b_, c_, d_;
    void normalize();
};

}  // namespace pgc
