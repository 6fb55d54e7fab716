#pragma once

#include <cstddef>
#include <optional>

#include "pgc/curve.hpp"
#include "pgc/pwmobius.hpp"

namespace pgc {

// Constants of the half-disc model at angle theta: c = sin theta,
// A = (pi/2) c, B = cos theta + theta c, C = -cos theta - (theta+pi) c,
// D = A - (B - A) = C + 2 pi c.
struct GeodesicPairParams {
    double theta, c, A, B, C, D;
    static GeodesicPairParams make(double theta);
};

// Logarithmic spiral data: A_coef = 1/(1 - i tan theta), rate tan theta,
// welding slope a = exp(-2 pi tan theta).
struct SpiralParams {
    double theta;
    cd A_coef;
    double rate;
    double a;
    static SpiralParams make(double theta);
};

// HalfDisc: the right half disc D+, image U_theta. Extended: the
// Schwarz-reflected extension on the disc minus the left chord arm,
// image the plane slit along (-inf, B].
enum class GMode { HalfDisc, Extended };

cd G(double theta, cd z, GMode mode = GMode::HalfDisc);

cd G_prime(double theta, cd z);

bool in_U(double theta, cd w);

// side matters only for real w on the slit (-inf, B] in Extended mode:
// +1 takes the boundary value from above, -1 from below.
cd G_inverse(double theta, cd w, GMode mode = GMode::HalfDisc, int side = +1);

// Chord from e^{i theta} through 0 to -e^{-i theta}; closed Jordan curve
// through +-i when |theta| = pi/2. 2*samples+1 interior points.
PGCurve trace_pair(double theta, std::size_t samples);

// Welding record of the pair: identity on (B, inf), shift by 2 pi sin theta
// on (-inf, C). closure interpolates the gap (C, B) -> (D, B) with the
// Moebius branch fixing B with derivative 1; absent in the degenerate
// |theta| = pi/2 case, where one of the gaps is empty.
struct PairWelding {
    GeodesicPairParams params;
    double shift;
    Mobius upper;
    Mobius lower;
    bool degenerate_gap;
    std::optional<PiecewiseMobius> closure;
};

PairWelding pair_welding(double theta);

// Full-line closure; throws std::domain_error when |theta| = pi/2.
PiecewiseMobius pair_welding_map(double theta);

cd pre_schwarzian(double theta, cd z);

cd schwarzian_G(double theta, cd z);

enum class SpiralBranch { Main, Opposite };

cd spiral_point(double theta, SpiralBranch branch, double t);

PiecewiseMobius spiral_welding(double theta);

// Pair in the upper half plane running 0 -> r e^{it} -> inf, transported
// from the disc model by the inverse of tau(z) = -i e^{-it}(z - zeta)/(z -
// conj(zeta)). The final sample is the point at infinity.
PGCurve halfplane_pair(double r, double t, std::size_t samples);

}  // namespace pgc
