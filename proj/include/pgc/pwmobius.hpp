#pragma once

#include <optional>
#include <vector>

#include "pgc/mobius.hpp"

namespace pgc {

// Thrown when breakpoint data violates the alternating product constraint.
struct ConstraintError : std::runtime_error {
    double product;
    explicit ConstraintError(double p)
        : std::runtime_error("welding product constraint violated, product = " +
                             std::to_string(p)),
          product(p) {}
};

// Increasing homeomorphism of the extended real line, Moebius on each arc
// between consecutive breakpoints. Breakpoints are stored in increasing
// order of their finite values; infinity, when a breakpoint, is stored last.
// branch(i) acts on the arc from breakpoint i to breakpoint i+1 (cyclically).
class PiecewiseMobius {
  public:
    PiecewiseMobius() = default;
    PiecewiseMobius(std::vector<ExtComplex> breakpoints, std::vector<Mobius> branches,
                    double continuity_tol = 1e-9);

    static PiecewiseMobius single(const Mobius& m);  // no breakpoints in effect

    std::size_t size() const { return breakpoints_.size(); }
    const std::vector<ExtComplex>& breakpoints() const { return breakpoints_; }
    const std::vector<Mobius>& branches() const { return branches_; }

    // Branch index of the arc that starts at breakpoint i.
    const Mobius& branch_after(std::size_t i) const { return branches_[i]; }
    // Branch of the arc that ends at breakpoint i.
    const Mobius& branch_before(std::size_t i) const;

    ExtComplex evaluate(const ExtComplex& x) const;
    double operator()(double x) const { return real_of(evaluate(ext_real(x))); }

    std::size_t breakpoint_index(const ExtComplex& x, double tol = 1e-12) const;

    // omega'(x_j^+)/omega'(x_j^-); at the breakpoint infinity computed after
    // conjugation by phi(z) = 1/(1-z).
    double derivative_jump(const ExtComplex& x_j) const;
    double spiral_rate_from_jump(const ExtComplex& x_j) const;

    bool is_C1(double tol) const;

    PiecewiseMobius precompose(const Mobius& sigma) const;   // omega o sigma
    PiecewiseMobius postcompose(const Mobius& sigma) const;  // sigma o omega

  private:
    std::vector<ExtComplex> breakpoints_;
    std::vector<Mobius> branches_;
    std::size_t arc_index(const ExtComplex& x) const;
};

// Canonically normalized C1 welding map: identity for x < 0, x - 1 + y_n for
// x > 1, breakpoints 0 = x_1 < ... < x_n = 1 with images 0 = y_1 < ... < y_n.
struct NormalizedWelding {
    std::vector<double> x;
    std::vector<double> y;
    double shift = 0.0;  // y_n - 1
    PiecewiseMobius map;
};

struct NormalizeResult {
    NormalizedWelding welding;
    Mobius sigma_pre;   // applied before omega
    Mobius sigma_post;  // applied after omega
};

// Alternating product of the constructibility constraint; 1 iff a normalized
// C1 welding through (x_j, y_j) exists.
double check_product(const std::vector<double>& x, const std::vector<double>& y);

// Forward recursion building the unique normalized C1 welding through the
// given breakpoints. y.back() is recomputed from the product constraint when
// the input satisfies it to within tol.
NormalizedWelding construct_welding(std::vector<double> x, std::vector<double> y,
                                    double tol = 1e-9);

NormalizeResult normalize(const PiecewiseMobius& omega, double c1_tol = 1e-6);

bool equivalent(const PiecewiseMobius& w1, const PiecewiseMobius& w2, double tol);

// Sampled estimate of the quasisymmetry constant M of Eq.-(QS) type ratios,
// for maps fixing infinity.
double qs_constant(const PiecewiseMobius& omega, std::size_t samples = 64);

// Two-piece Moebius map near infinity: a1 x + b1 for x > c1, a2 x + b2 for
// x < c2 (c2 <= c1).
struct TwoPieceAffine {
    double a1, b1, c1;
    double a2, b2, c2;
};

enum class PairClass { ShiftPlusOne, ShiftMinusOne, IdentityGap, Linear };

struct PairNormalization {
    PairClass cls;
    double left_cutoff;  // canonical-cutoff of the shifted forms; 0 when unused
    Mobius phi;          // conjugators: tau o omega o phi is canonical
    Mobius tau;
};

// Canonical representative of a two-piece map with continuous derivative at
// infinity (a1 == a2), following the shift +1 / shift -1 / identity-gap /
// linear classification.
PairNormalization normalize_pair(const TwoPieceAffine& w, double tol = 1e-12);

}  // namespace pgc
