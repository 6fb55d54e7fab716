#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pgc/errors.hpp"
#include "pgc/explicit_pairs.hpp"
#include "pgc/mobius.hpp"
#include "pgc/schwarzian.hpp"
#include "pgc/solver.hpp"

using namespace pgc;
using std::numbers::pi;

namespace {

SolverConfig small_cfg() {
    SolverConfig cfg;
    cfg.edge_samples = 64;
    cfg.conformal_N = 256;
    cfg.max_sweeps = 20;
    cfg.tol_move = 1e-3;
    return cfg;
}

PGCurve circle_curve(std::size_t verts, std::size_t per_edge) {
    PGCurve c;
    const std::size_t total = verts * per_edge;
    for (std::size_t k = 0; k < total; ++k)
        c.samples.push_back(ExtComplex(std::polar(1.0, 2.0 * pi * double(k) / double(total))));
    for (std::size_t j = 0; j < verts; ++j) c.vertex_indices.push_back(j * per_edge);
    c.flags.assign(verts, VertexFlag{});
    c.closed = true;
    return c;
}

// Partial-fraction residues of C / prod (z - zeta_j).
std::vector<cd> partial_fraction_residues(cd C, const std::vector<cd>& zeta) {
    std::vector<cd> c(zeta.size());
    for (std::size_t j = 0; j < zeta.size(); ++j) {
        cd denom = 1.0;
        for (std::size_t k = 0; k < zeta.size(); ++k)
            if (k != j) denom *= zeta[j] - zeta[k];
        c[j] = C / denom;
    }
    return c;
}

}  // namespace

TEST_CASE("stencil schwarzian on closed forms") {
    auto mob = [](cd z) { return (2.0 * z + cd(1, 1)) / (z - cd(0, 3)); };
    CHECK(std::abs(numerical_schwarzian(mob, cd(0.4, -0.2), 1e-2)) < 1e-8);

    auto sq = [](cd z) { return z * z; };
    CHECK(std::abs(numerical_schwarzian(sq, cd(1.0, 0.0), 1e-2) - cd(-1.5, 0.0)) < 1e-9);

    auto ex = [](cd z) { return std::exp(z); };
    CHECK(std::abs(numerical_schwarzian(ex, cd(0.3, 0.7), 1e-2) - cd(-0.5, 0.0)) < 1e-9);

    const double theta = 0.5236;
    const cd z(0.3, 0.3);
    auto g = [theta](cd w) { return G(theta, w); };
    CHECK(std::abs(numerical_schwarzian(g, z, 1e-3) - schwarzian_G(theta, z)) < 1e-6);
}

TEST_CASE("derivative underflow is reported") {
    auto sq = [](cd z) { return z * z; };
    CHECK_THROWS_AS(numerical_schwarzian(sq, cd(0.0, 0.0), 1e-3), NumericalError);
    CHECK_THROWS_AS(numerical_schwarzian(sq, cd(1.0, 0.0), 0.0), std::invalid_argument);
}

TEST_CASE("composition rule") {
    auto mob = [](cd z) { return (z - 1.0) / (z + 2.0); };
    auto ex = [](cd z) { return std::exp(z); };
    auto sq = [](cd z) { return z * z; };
    const cd z(1.0, 0.5);

    // Moebius outer factor leaves the schwarzian unchanged.
    CHECK(verify_composition(mob, ex, z) < 1e-7);
    auto mex = [&](cd w) { return mob(ex(w)); };
    CHECK(std::abs(numerical_schwarzian(mex, z, 1e-2) -
                   numerical_schwarzian(ex, z, 1e-2)) < 1e-7);

    CHECK(verify_composition(ex, mob, z) < 1e-7);
    CHECK(verify_composition(sq, sq, z) < 1e-6);
}

TEST_CASE("moebius invariance of the numerical schwarzian") {
    const double theta = -0.8;
    const Mobius sigma(1.4, 0.3, 0.2, 1.0);
    REQUIRE(sigma.is_real_increasing());
    auto f = [theta](cd w) { return G(theta, w); };
    auto sf = [&](cd w) { return sigma.apply(ExtComplex(G(theta, w))).finite(); };
    for (cd z : {cd(0.35, 0.2), cd(0.5, -0.3), cd(0.2, 0.05)}) {
        CHECK(std::abs(numerical_schwarzian(sf, z, 1e-3) -
                       numerical_schwarzian(f, z, 1e-3)) < 1e-6);
    }
}

TEST_CASE("contour residue of the pair schwarzian") {
    for (double theta : {0.3, -0.7, 1.1, 0.0}) {
        cd acc = 0.0;
        const std::size_t m = 256;
        for (std::size_t k = 0; k < m; ++k) {
            const cd z = std::polar(0.1, 2.0 * pi * double(k) / double(m));
            acc += schwarzian_G(theta, z) * z;
        }
        acc /= double(m);
        CHECK(std::abs(acc - cd(0.0, 4.0 * std::sin(theta))) < 1e-8);
    }
}

TEST_CASE("rational fit recovers synthetic residues") {
    const std::vector<cd> zeta = {cd(0, 0), cd(0, 1), cd(1, 0), cd(2, 0)};
    const std::vector<cd> c = partial_fraction_residues(cd(2.0, -1.0), zeta);
    std::vector<ExtComplex> poles(zeta.begin(), zeta.end());

    std::vector<std::pair<cd, cd>> samples;
    for (std::size_t k = 0; k < 16; ++k) {
        const cd z = cd(0.75, 0.25) + std::polar(3.0, 2.0 * pi * double(k) / 16.0);
        cd s = 0.0;
        for (std::size_t j = 0; j < 4; ++j) s += c[j] / (z - zeta[j]);
        samples.push_back({z, s});
    }
    const RationalFit fit = fit_rational(samples, poles, {});
    CHECK(fit.residual < 1e-10);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(fit.model.residues[j] - c[j]) < 1e-10);

    // Partial fractions of a degree-0 numerator satisfy all three sum rules.
    ConstraintSums sums = constraint_residuals(fit.model);
    REQUIRE(sums.has_third);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(sums.sums[k]) < 1e-12);

    // The fitted model reproduces C / prod(z - zeta_j) off the sample ring.
    for (std::size_t k = 0; k < 10; ++k) {
        const cd z = cd(0.5, -0.4) + std::polar(1.7, 0.9 + double(k));
        cd prod = 1.0;
        for (const cd& zj : zeta) prod *= z - zj;
        CHECK(std::abs(fit.model.evaluate(z) - cd(2.0, -1.0) / prod) < 1e-9);
    }

    RationalSchwarzian bumped = fit.model;
    bumped.residues[0] += 1e-3;
    CHECK(std::abs(constraint_residuals(bumped).sums[0] - sums.sums[0] - 1e-3) < 1e-15);
}

TEST_CASE("three poles force the zero model") {
    std::vector<ExtComplex> poles = {ExtComplex(cd(0, 0)), ExtComplex(cd(1, 0)),
                                     ExtComplex(cd(0, 1))};
    std::vector<std::pair<cd, cd>> samples;
    for (std::size_t k = 0; k < 12; ++k)
        samples.push_back({cd(0.3, 0.3) + std::polar(2.0, 0.5 + double(k)), cd(0, 0)});
    const RationalFit fit = fit_rational(samples, poles, {});
    CHECK(fit.residual < 1e-14);
    for (const cd& c : fit.model.residues) CHECK(std::abs(c) < 1e-13);
}

TEST_CASE("infinite pole drops the third sum rule") {
    std::vector<ExtComplex> poles = {ExtComplex(cd(0, 0)), ExtComplex(cd(1, 0)),
                                     ExtComplex(cd(2, 0)), ExtComplex::infinity()};
    std::vector<std::pair<cd, cd>> samples;
    for (std::size_t k = 0; k < 10; ++k) {
        const cd z = cd(1.0, 0.1) + std::polar(3.5, 0.3 + double(k));
        samples.push_back({z, 1.0 / (z * (z - 1.0) * (z - 2.0))});
    }
    const RationalFit fit = fit_rational(samples, poles, {});
    CHECK(fit.residual < 1e-12);
    CHECK(std::abs(fit.model.residues[0] - cd(0.5, 0.0)) < 1e-10);
    CHECK(std::abs(fit.model.residues[1] - cd(-1.0, 0.0)) < 1e-10);
    CHECK(std::abs(fit.model.residues[2] - cd(0.5, 0.0)) < 1e-10);
    CHECK(std::abs(fit.model.residues[3]) == 0.0);
    ConstraintSums sums = constraint_residuals(fit.model);
    CHECK(!sums.has_third);
    CHECK(std::abs(sums.sums[0]) < 1e-10);
    CHECK(std::abs(sums.sums[1]) < 1e-10);
}

TEST_CASE("spiral coefficients") {
    CHECK(spiral_pole_coefficient(0.0) == cd(0.0, 0.0));
    CHECK(std::abs(spiral_pole_coefficient(1.0) - cd(0.5, 1.0)) < 1e-15);
    CHECK(std::abs(spiral_pole_coefficient(2.0) - cd(2.0, 2.0)) < 1e-15);
    // tan-theta form of the same coefficient
    const double th = 0.6;
    CHECK(std::abs(spiral_pole_coefficient(std::tan(th)) -
                   (cd(0, 1) * std::tan(th) + 0.5 * std::tan(th) * std::tan(th))) < 1e-14);
}

TEST_CASE("preset double pole absorbs a spiral map") {
    const double R = 0.9;
    auto g = [R](cd z) { return std::exp((1.0 - cd(0, R)) * std::log(z)); };
    std::vector<std::pair<cd, cd>> samples;
    for (std::size_t k = 0; k < 14; ++k) {
        const cd z = std::polar(1.0 + 0.07 * double(k), 0.25 + 0.18 * double(k));
        samples.push_back({z, numerical_schwarzian(g, z, 1e-2)});
    }
    std::vector<ExtComplex> poles = {ExtComplex(cd(0, 0))};
    const RationalFit fit = fit_rational(samples, poles, {R});
    CHECK(std::abs(fit.model.quad_coeffs[0] - spiral_pole_coefficient(R)) < 1e-14);
    CHECK(fit.residual < 1e-7);
    CHECK(std::abs(fit.model.residues[0]) < 1e-7);
}

TEST_CASE("residue predictions") {
    CHECK(std::abs(vertex_residue_prediction(0.0, cd(2, 1))) == 0.0);
    CHECK(std::abs(vertex_residue_prediction(pi / 2, cd(1, 0)) - cd(0, 4)) < 1e-12);
    // hyperbolic form with tangent angles +-theta and unit density
    const double th = 0.47;
    CHECK(std::abs(vertex_residue_hyperbolic(-th, th, 1.0) -
                   vertex_residue_prediction(th, cd(1, 0))) < 1e-14);
}

TEST_CASE("analysis of a circle is trivial") {
    const PGCurve c = circle_curve(3, 400);
    const CurveAnalysis an = analyze_curve(c, small_cfg());
    CHECK(an.probes > 40);
    CHECK(an.fit_residual < 1e-4);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(an.flags[j].c1);
        CHECK(std::abs(an.model.residues[j]) < 1e-3);
        CHECK(std::abs(an.model.quad_coeffs[j]) < 1e-12);
    }
}

TEST_CASE("analysis of a four vertex solved curve") {
    const std::vector<cd> verts = {cd(1.3, 0.0), cd(0.0, 1.0), cd(-1.0, 0.1), cd(-0.2, -0.9)};
    const SolveResult sol = solve_through_vertices(verts, small_cfg());
    REQUIRE(sol.converged);
    const CurveAnalysis an = analyze_curve(sol.curve, small_cfg());

    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(an.model.quad_coeffs[j]) < 1e-12);
    // Eq-four structure: residues proportional to partial fractions of a
    // single constant over the vertex polynomial.
    const std::vector<cd> pf = partial_fraction_residues(cd(1.0, 0.0), verts);
    cd scale = 0.0;
    for (std::size_t j = 0; j < 4; ++j) scale += an.model.residues[j] / pf[j];
    scale /= 4.0;
    CHECK(std::abs(scale) > 1e-4);
    // Coarse solver settings leave percent-level noise on the residues; the
    // structural checks here use matching slack.
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(std::abs(an.model.residues[j] - scale * pf[j]) < 0.2 * std::abs(scale * pf[j]));
    for (int k = 0; k < 3; ++k) CHECK(an.normalized_constraints[k] < 0.1);
    CHECK(an.decay_exponent > 3.5);
    CHECK(an.decay_exponent < 4.5);
}
