#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "pgc/curve.hpp"
#include "pgc/pwmobius.hpp"
#include "pgc/schwarzian.hpp"
#include "pgc/solver.hpp"

namespace pgc {

using nlohmann::json;

json complex_json(cd z);
cd complex_from_json(const json& j);

json ext_json(const ExtComplex& z);       // "inf" or [re, im]
ExtComplex ext_from_json(const json& j);

json mobius_json(const Mobius& m);        // [[re, im] x 4]
Mobius mobius_from_json(const json& j);

json pwmobius_json(const PiecewiseMobius& w);
PiecewiseMobius pwmobius_from_json(const json& j);

json normalized_welding_json(const NormalizedWelding& w);

json curve_json(const PGCurve& c);
PGCurve curve_from_json(const json& j);

json analysis_json(const CurveAnalysis& an);

struct RenderOptions {
    double size_px = 800.0;
    double stroke = 1.5;
    bool vertex_markers = true;
};

// Deterministic standalone SVG: fixed-precision coordinates, path through the
// samples, circles at the vertices.
std::string curve_svg(const PGCurve& c, const RenderOptions& opt = {});

std::string curve_csv(const PGCurve& c);  // t,re,im rows

std::string sweep_csv(const std::vector<SweepRecord>& log);

}  // namespace pgc
