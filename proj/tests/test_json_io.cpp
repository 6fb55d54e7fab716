#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pgc/explicit_pairs.hpp"
#include "pgc/json_io.hpp"

using namespace pgc;
using std::numbers::pi;

TEST_CASE("complex and extended point round trips") {
    const cd z(1.25, -3.5);
    CHECK(complex_from_json(complex_json(z)) == z);
    CHECK(ext_from_json(ext_json(ExtComplex(z))) == ExtComplex(z));
    CHECK(ext_from_json(ext_json(ExtComplex::infinity())) == ExtComplex::infinity());
    CHECK(ext_json(ExtComplex::infinity()) == json("inf"));
    CHECK_THROWS_AS(ext_from_json(json("nope")), std::invalid_argument);
    CHECK_THROWS_AS(complex_from_json(json::array({1.0})), std::invalid_argument);
}

TEST_CASE("mobius and piecewise mobius round trips") {
    const Mobius m(cd(2, 1), cd(0, -1), cd(1, 0), cd(3, 0));
    const Mobius back = mobius_from_json(mobius_json(m));
    for (int k = 0; k < 4; ++k) CHECK(back.coeffs()[k] == m.coeffs()[k]);

    const PiecewiseMobius w = pair_welding_map(0.4);
    const PiecewiseMobius wb = pwmobius_from_json(pwmobius_json(w));
    REQUIRE(wb.size() == w.size());
    for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(chordal(wb.breakpoints()[i], w.breakpoints()[i]) < 1e-15);
    for (double x : {-9.0, -2.0, 0.1, 1.4, 6.0})
        CHECK(wb(x) == doctest::Approx(w(x)).epsilon(1e-14));
}

TEST_CASE("curve round trip keeps samples, vertices and flags") {
    PGCurve c = trace_pair(0.7, 32);
    c.flags[1] = VertexFlag{false, 0.83};
    const PGCurve back = curve_from_json(curve_json(c));
    REQUIRE(back.samples.size() == c.samples.size());
    for (std::size_t k = 0; k < c.samples.size(); ++k)
        CHECK(chordal(back.samples[k], c.samples[k]) < 1e-15);
    CHECK(back.vertex_indices == c.vertex_indices);
    CHECK(back.closed == c.closed);
    CHECK(!back.flags[1].c1);
    CHECK(back.flags[1].spiral_rate == doctest::Approx(0.83));

    json bad = curve_json(c);
    bad["vertices"][0] = 10000;
    CHECK_THROWS_AS(curve_from_json(bad), std::invalid_argument);
}

TEST_CASE("svg output is deterministic and well formed") {
    const PGCurve c = trace_pair(1.0, 64);
    const std::string a = curve_svg(c), b = curve_svg(c);
    CHECK(a == b);
    CHECK(a.find("<svg") == 0);
    CHECK(a.find("<path") != std::string::npos);
    CHECK(a.find("<circle") != std::string::npos);
    RenderOptions plain;
    plain.vertex_markers = false;
    CHECK(curve_svg(c, plain).find("<circle") == std::string::npos);

    PGCurve tiny;
    tiny.samples = {ExtComplex(cd(0, 0))};
    CHECK_THROWS_AS(curve_svg(tiny), std::invalid_argument);
}

TEST_CASE("csv outputs") {
    const PGCurve c = trace_pair(0.3, 8);
    const std::string csv = curve_csv(c);
    CHECK(csv.rfind("t,re,im\n", 0) == 0);
    std::size_t rows = 0;
    for (char ch : csv)
        if (ch == '\n') ++rows;
    CHECK(rows == c.samples.size() + 1);

    std::vector<SweepRecord> log = {{0, 0.5, 0}, {1, 0.01, 1}};
    const std::string sc = sweep_csv(log);
    CHECK(sc.rfind("sweep,max_displacement,rejected\n", 0) == 0);
    CHECK(sc.find("\n1,") != std::string::npos);
}

TEST_CASE("welding json carries the normalized data") {
    const NormalizedWelding w = construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
    const json j = normalized_welding_json(w);
    CHECK(j["x"].size() == 3);
    CHECK(j["shift"].get<double>() == doctest::Approx(1.0));
}
