#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "pgc/curve.hpp"

namespace pgc {

struct BoundaryImage {
    cd sample;
    cd circle;
};

// Conformal map of a polyline-bounded Jordan domain onto the unit disc,
// built as a composition stack of elementary geodesic slit maps. The
// designated interior point maps to 0 with positive real derivative.
class DiscreteConformalMap {
  public:
    DiscreteConformalMap() = default;

    static DiscreteConformalMap disk_map(const std::vector<cd>& boundary, cd z0);

    cd evaluate(cd z) const;
    cd invert(cd w) const;
    ExtComplex evaluate_ext(const ExtComplex& z) const;

    std::vector<cd> evaluate_batch(const std::vector<cd>& pts, bool parallel = true) const;
    std::vector<cd> invert_batch(const std::vector<cd>& ws, bool parallel = true) const;

    std::vector<BoundaryImage> boundary_trace() const;

    double accuracy() const { return accuracy_; }
    std::size_t resolution() const { return boundary_.size(); }
    cd anchor() const { return zint_; }
    const std::vector<cd>& boundary() const { return boundary_; }

  private:
    struct Stage {
        double inv_xc;  // 1/x_c of sigma(z) = z/(1 - z/x_c); 0 when the tip is
                        // directly above the base
        double h;       // height of the straightened slit
    };

    ExtComplex forward_raw(const ExtComplex& z) const;  // before Cayley/rotation

    cd za_, zb_;  // first two boundary samples, defining the initial map
    std::vector<Stage> stages_;
    double inv_p0_ = 0.0;  // closing pole
    double sign_ = 1.0;    // closing square orientation
    cd q_;                 // image of the anchor in H
    cd rot_ = cd(1, 0);
    cd zint_;
    std::vector<cd> boundary_;
    std::vector<cd> trace_;  // circle images of the boundary samples
    double accuracy_ = 0.0;
};

// Free-function facade.
DiscreteConformalMap disk_map(const std::vector<cd>& boundary, cd z0);
cd evaluate(const DiscreteConformalMap& map, cd z);
cd invert(const DiscreteConformalMap& map, cd w);
std::vector<BoundaryImage> boundary_trace(const DiscreteConformalMap& map);

// One complementary side of a closed curve: an optional sphere rotation
// 1/(z - pole) for the unbounded side, then a disc map.
struct SideMap {
    DiscreteConformalMap dm;
    bool through_pole = false;
    cd pole;

    cd pre(cd z) const { return through_pole ? 1.0 / (z - pole) : z; }
    cd pre_inv(cd u) const { return through_pole ? pole + 1.0 / u : u; }
};

// Conformal maps of the two sides of a closed curve onto the upper and
// lower half planes, with boundary traces along the curve samples.
struct HalfPlaneMaps {
    SideMap plus;   // Omega+ (left of the curve) -> H
    SideMap minus;  // Omega- -> L
    std::vector<ExtComplex> trace_plus;
    std::vector<ExtComplex> trace_minus;

    cd to_upper(cd z) const;
    cd to_lower(cd z) const;
    cd from_upper(cd w) const;
    cd from_lower(cd w) const;
};

HalfPlaneMaps half_plane_maps(const PGCurve& gamma);

// A point strictly inside the closed polyline, away from its boundary.
cd interior_point(const std::vector<cd>& boundary);

// Cayley transforms between the disc and the half planes.
ExtComplex cayley_upper(const ExtComplex& w);
ExtComplex cayley_lower(const ExtComplex& w);
cd cayley_upper_inv(cd z);
cd cayley_lower_inv(cd z);

}  // namespace pgc
