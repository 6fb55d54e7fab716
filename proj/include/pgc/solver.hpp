#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pgc/confmap.hpp"
#include "pgc/curve.hpp"
#include "pgc/pwmobius.hpp"

namespace pgc {

struct SolverConfig {
    std::size_t edge_samples = 64;   // segments per edge
    std::size_t max_sweeps = 50;
    double tol_move = 1e-4;          // relative to curve diameter
    std::size_t conformal_N = 512;   // boundary resolution of the slit maps
    double damping = 0.0;            // 0 selects 1.0 (n < 5) or 0.5
};

// Conformal map of the complement of an open arc onto the unit disc, with
// the anchor sent to 0. Built by doubling: w = 1/(sqrt((z-A)/(z-B)) + c)
// carries the slit sphere onto a Jordan domain, then a disc map.
class SlitDomainMap {
  public:
    SlitDomainMap(const std::vector<cd>& arc, cd anchor);

    cd evaluate(cd z) const;
    cd invert(cd w) const;

    // Circle images of the two arc endpoints (prime ends at the tips).
    cd tip_front() const { return tip_front_; }
    cd tip_back() const { return tip_back_; }

    const DiscreteConformalMap& disc() const { return dm_; }

  private:
    cd A_, B_, c_;
    std::vector<cd> polygon_;
    DiscreteConformalMap dm_;
    cd tip_front_, tip_back_;
};

struct UpdateResult {
    PGCurve curve;
    bool accepted = false;
    double displacement = 0.0;  // max sample move before damping
    double theta = 0.0;
    std::string diagnostic;
};

// Replace the two edges meeting at vertex j by the geodesic pair of the
// complement of the rest of the curve, blended with the old edges by the
// damping factor.
UpdateResult update_edge_pair(const PGCurve& gamma, std::size_t j, const SolverConfig& cfg);

struct SweepRecord {
    std::size_t sweep;
    double max_displacement;
    std::size_t rejected;
};

struct SolveResult {
    PGCurve curve;
    std::vector<SweepRecord> log;
    bool converged = false;
};

// Gauss-Seidel iteration of update_edge_pair over all vertices, starting
// from a circular-arc blend through the given vertices.
SolveResult solve_through_vertices(const std::vector<cd>& vertices, const SolverConfig& cfg);

// Initial curve of the solver, exposed for testing.
PGCurve initial_curve(const std::vector<cd>& vertices, std::size_t edge_samples);

struct ExtractedWelding {
    PiecewiseMobius map;
    double residual = 0.0;                    // max chordal misfit over all samples
    std::vector<double> edge_residuals;       // per edge, in curve order
    std::vector<ExtComplex> vertex_breakpoints;  // per vertex, in curve order
    std::vector<ExtComplex> x, y;             // boundary traces on R-hat per sample
    std::optional<NormalizeResult> normalized;
};

// Conformal welding of the two sides of the curve, with a Moebius branch
// fitted on each edge and the misfit of the fit as a residual.
ExtractedWelding extract_welding(const PGCurve& gamma, const SolverConfig& cfg);

bool is_geodesic_edge(const ExtractedWelding& w, std::size_t edge, double tol);
bool is_geodesic_edge(const PGCurve& gamma, std::size_t edge, double tol,
                      const SolverConfig& cfg);

// |x2 - y2/y3| for a normalized welding with breakpoints {inf, 0, x2, 1};
// zero exactly for four-vertex piecewise geodesic curves.
double check_modulus(const NormalizedWelding& w);

struct AutomorphismCheck {
    double distance[3];    // chordal Hausdorff between samples and their image
    bool swaps_sides[3];   // whether tau_k exchanges the two complementary sides
};

// The three involutions permuting vertices {0, zeta, 1, inf} in pairs:
// tau_1 = zeta/z, tau_2 = (z-zeta)/(z-1), tau_3 = zeta(z-1)/(z-zeta).
AutomorphismCheck check_automorphisms(const PGCurve& gamma, cd zeta);

// Spiral rate from samples of one curve arm approaching zeta, via points one
// full turn apart in argument; requires at least two full turns of winding.
double measure_spiral_rate(const std::vector<cd>& arm, cd zeta);

// C1 / spiral classification of vertex j from the welding derivative jump.
VertexFlag classify_vertex(const ExtractedWelding& w, std::size_t j, double tol = 1e-3);

struct CurveFromWeldingResult {
    PGCurve curve;
    double welding_error = 0.0;
    bool converged = false;
};

// Search for a piecewise geodesic curve whose welding is Moebius-equivalent
// to the target, optimizing vertex positions with three vertices gauge-fixed.
CurveFromWeldingResult curve_from_welding(const PiecewiseMobius& omega, const SolverConfig& cfg);

}  // namespace pgc
