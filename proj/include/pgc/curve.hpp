#pragma once

#include <cstddef>
#include <vector>

#include "pgc/ext_complex.hpp"

namespace pgc {

// Local behaviour of a curve at a marked vertex: C1 junction or logarithmic
// spiral of the given rate.
struct VertexFlag {
    bool c1 = true;
    double spiral_rate = 0.0;
};

// Sampled curve with marked vertices. Closed curves repeat no sample: the
// segment from samples.back() to samples.front() closes the polyline.
// flags[k] describes the vertex at vertex_indices[k].
struct PGCurve {
    std::vector<ExtComplex> samples;
    std::vector<std::size_t> vertex_indices;
    std::vector<VertexFlag> flags;
    bool closed = true;

    // Finite sample values in order, dropping points at infinity.
    std::vector<cd> finite_samples() const;
    double diameter() const;
};

double signed_area(const std::vector<cd>& p);

double polyline_diameter(const std::vector<cd>& p);

// Pairwise segment intersection test, contacts of adjacent segments excepted.
bool is_simple_polyline(const std::vector<cd>& p, bool closed);

// Winding number of the closed polyline around z.
int winding_number(const std::vector<cd>& p, cd z);

double point_segment_distance(cd z, cd a, cd b);

double distance_to_polyline(cd z, const std::vector<cd>& p, bool closed);

// Symmetric Hausdorff distance between sampled curves, measured from the
// samples of each to the segments of the other.
double hausdorff_distance(const std::vector<cd>& a, bool a_closed,
                          const std::vector<cd>& b, bool b_closed);

// n points equally spaced in arc length along the polyline.
std::vector<cd> resample_polyline(const std::vector<cd>& p, std::size_t n, bool closed);

}  // namespace pgc
