#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "pgc/curve.hpp"
#include "pgc/solver.hpp"

namespace pgc {

// Meromorphic model S(z) = sum_j lambda_j/(z - zeta_j)^2 + c_j/(z - zeta_j),
// one term per finite pole; a pole at infinity contributes no term.
struct RationalSchwarzian {
    std::vector<ExtComplex> poles;
    std::vector<cd> residues;     // c_j
    std::vector<cd> quad_coeffs;  // lambda_j, zero at C1 vertices

    cd evaluate(cd z) const;
    bool has_infinite_pole() const;
};

using ConformalEvaluator = std::function<cd(cd)>;

// f'''/f' - (3/2)(f''/f')^2 from an 8-point circular stencil of radius h.
cd numerical_schwarzian(const ConformalEvaluator& f, cd z, double h);

// |S_{g o h}(z) - S_g(h(z)) h'(z)^2 - S_h(z)| by the same stencils.
double verify_composition(const ConformalEvaluator& g, const ConformalEvaluator& h,
                          cd z, double step = 1e-2);

struct RationalFit {
    RationalSchwarzian model;
    double residual = 0.0;  // rms misfit over the samples
};

// Least squares for the residues c_j; the double-pole coefficients are preset
// to spiral_pole_coefficient(rate) per pole, rate 0 at C1 vertices.
RationalFit fit_rational(const std::vector<std::pair<cd, cd>>& samples,
                         const std::vector<ExtComplex>& poles,
                         const std::vector<double>& spiral_rates);

struct ConstraintSums {
    cd sums[3] = {};     // sum c_j, sum c_j zeta_j, sum c_j zeta_j^2
    bool has_third = true;  // false when infinity is a pole
};

ConstraintSums constraint_residuals(const RationalSchwarzian& rs);

// (4i sin theta) h'(zeta), the simple-pole residue at a C1 vertex.
cd vertex_residue_prediction(double theta, cd hprime_at_vertex);

// The same residue from half-plane data: 4i sin((t-s)/2) rho e^{-i(t+s)/2}.
cd vertex_residue_hyperbolic(double s, double t, double rho);

// R^2/2 + iR, the double-pole coefficient at a spiral vertex of rate R.
cd spiral_pole_coefficient(double R);

struct CurveAnalysis {
    RationalSchwarzian model;
    double fit_residual = 0.0;
    ConstraintSums constraints;
    double normalized_constraints[3] = {};  // sums scaled by residue magnitudes
    double decay_exponent = 0.0;  // -slope of log|S| against log|z| far out
    std::vector<VertexFlag> flags;
    double welding_residual = 0.0;
    std::size_t probes = 0;
};

// Rational model of the Schwarzian of the two half-plane maps of the curve
// sides, with poles at the vertices and spiral coefficients preset from the
// welding classification.
CurveAnalysis analyze_curve(const PGCurve& gamma, const SolverConfig& cfg);

}  // namespace pgc
