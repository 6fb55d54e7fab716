#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pgc/pwmobius.hpp"

using namespace pgc;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Welding of the logarithmic-spiral pair: x for x > 0, ax for x < 0.
PiecewiseMobius spiral_welding(double a) {
    std::vector<ExtComplex> bps = {ext_real(0.0), ExtComplex::infinity()};
    std::vector<Mobius> brs = {Mobius::identity(), Mobius(cd(a), cd(0), cd(0), cd(1))};
    return PiecewiseMobius(std::move(bps), std::move(brs));
}

// Welding of the G_theta geodesic pair: x on (B, inf), x + 2 pi sin(theta) on
// (-inf, C), and the interpolating unit-end-slope branch across (C, B).
PiecewiseMobius pair_welding_example(double theta) {
    double A = 0.5 * kPi * std::sin(theta);
    double B = std::cos(theta) + theta * std::sin(theta);
    double C = -std::cos(theta) - (theta + kPi) * std::sin(theta);
    double D = 2.0 * A - B;
    std::vector<ExtComplex> bps = {ext_real(C), ext_real(B), ExtComplex::infinity()};
    Mobius gap = theta == 0.0
                     ? Mobius::identity()
                     : Mobius::from_point_pair_and_derivative(B, C, B, D, 1.0);
    std::vector<Mobius> brs = {gap, Mobius::identity(),
                               Mobius(cd(1), cd(2.0 * kPi * std::sin(theta)), cd(0), cd(1))};
    return PiecewiseMobius(std::move(bps), std::move(brs));
}

Mobius random_increasing(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (;;) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        double det = a * d - b * c;
        if (det > 0.1) return Mobius(cd(a), cd(b), cd(c), cd(d));
        if (det < -0.1) return Mobius(cd(a), cd(-b), cd(c), cd(-d));
    }
}

// Random interpolation data on [0,1] with the product constraint solved for
// the last image.
std::pair<std::vector<double>, std::vector<double>> random_constraint_data(
    std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> u(0.4, 1.0);
    std::vector<double> x(n), y(n);
    x[0] = y[0] = 0.0;
    for (std::size_t j = 1; j < n; ++j) x[j] = x[j - 1] + u(rng);
    for (std::size_t j = 1; j < n; ++j) x[j] /= x[n - 1];
    x[n - 1] = 1.0;
    for (std::size_t j = 1; j < n - 1; ++j) y[j] = y[j - 1] + u(rng);
    // Solve the alternating product for the last slope.
    double q = 1.0;
    int sign = -1;
    for (std::size_t j = n - 2; j >= 1; --j) {
        double s = (y[j] - y[j - 1]) / (x[j] - x[j - 1]);
        q *= sign > 0 ? s : 1.0 / s;
        sign = -sign;
    }
    y[n - 1] = y[n - 2] + (x[n - 1] - x[n - 2]) / q;
    return {x, y};
}

}  // namespace

TEST_CASE("evaluate") {
    PiecewiseMobius id = PiecewiseMobius::single(Mobius::identity());
    CHECK(id(5.0) == 5.0);

    PiecewiseMobius sp = spiral_welding(2.0);
    CHECK(sp(-1.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(sp(3.0) == 3.0);

    PiecewiseMobius pw = pair_welding_example(kPi / 6.0);
    CHECK(pw(-3.0) == doctest::Approx(-3.0 + kPi).epsilon(1e-14));
}

TEST_CASE("construction rejects invalid data") {
    // Decreasing branch.
    CHECK_THROWS_AS(PiecewiseMobius({ext_real(0.0), ExtComplex::infinity()},
                                    {Mobius(cd(-1), cd(0), cd(0), cd(1)),
                                     Mobius::identity()}),
                    std::invalid_argument);
    // Discontinuity at the breakpoint.
    CHECK_THROWS_AS(PiecewiseMobius({ext_real(0.0), ExtComplex::infinity()},
                                    {Mobius(cd(1), cd(1), cd(0), cd(1)),
                                     Mobius::identity()}),
                    std::invalid_argument);
}

TEST_CASE("derivative jumps") {
    PiecewiseMobius sp = spiral_welding(std::exp(-2.0 * kPi));
    CHECK(sp.derivative_jump(ext_real(0.0)) ==
          doctest::Approx(std::exp(2.0 * kPi)).epsilon(1e-10));
    // slope as x -> +inf over slope as x -> -inf
    CHECK(sp.derivative_jump(ExtComplex::infinity()) ==
          doctest::Approx(std::exp(2.0 * kPi)).epsilon(1e-10));
    CHECK_THROWS_AS(sp.derivative_jump(ext_real(0.5)), std::domain_error);

    PiecewiseMobius pw = pair_welding_example(kPi / 6.0);
    double B = std::cos(kPi / 6.0) + (kPi / 6.0) * 0.5;
    CHECK(pw.derivative_jump(ext_real(B)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pw.derivative_jump(ExtComplex::infinity()) ==
          doctest::Approx(1.0).epsilon(1e-12));

    PiecewiseMobius id2({ext_real(0.0), ext_real(1.0)},
                        {Mobius::identity(), Mobius::identity()});
    CHECK(id2.derivative_jump(ext_real(0.0)) == 1.0);
    CHECK(id2.derivative_jump(ext_real(1.0)) == 1.0);
}

TEST_CASE("spiral rate from jump") {
    PiecewiseMobius id2({ext_real(0.0), ext_real(1.0)},
                        {Mobius::identity(), Mobius::identity()});
    CHECK(id2.spiral_rate_from_jump(ext_real(0.0)) == 0.0);

    double theta = kPi / 4.0;
    PiecewiseMobius sp = spiral_welding(std::exp(-2.0 * kPi * std::tan(theta)));
    CHECK(sp.spiral_rate_from_jump(ext_real(0.0)) ==
          doctest::Approx(std::tan(theta)).epsilon(1e-10));

    PiecewiseMobius tri = spiral_welding(std::exp(-4.0 * kPi));
    CHECK(tri.spiral_rate_from_jump(ext_real(0.0)) == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("is_C1") {
    PiecewiseMobius id2({ext_real(0.0), ext_real(1.0)},
                        {Mobius::identity(), Mobius::identity()});
    CHECK(id2.is_C1(1e-12));
    CHECK_FALSE(spiral_welding(2.0).is_C1(1e-6));
    NormalizedWelding w = construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
    CHECK(w.map.is_C1(1e-12));
}

TEST_CASE("check_product") {
    CHECK(check_product({0.0, 1.0}, {0.0, 1.0}) == 1.0);
    CHECK(check_product({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0}) == doctest::Approx(1.0));
    CHECK(check_product({0.0, 0.5, 1.0}, {0.0, 1.0, 3.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(check_product({0.0, 0.6, 0.5}, {0.0, 1.0, 2.0}), std::domain_error);
}

TEST_CASE("construct_welding examples") {
    NormalizedWelding w2 = construct_welding({0.0, 1.0}, {0.0, 1.0});
    for (double x : {-3.0, 0.3, 0.9, 7.0})
        CHECK(w2.map(x) == doctest::Approx(x).epsilon(1e-14));
    CHECK(w2.shift == 0.0);

    NormalizedWelding w3 = construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
    CHECK(w3.map.branches()[0].coeff_close(Mobius(cd(1), cd(0), cd(-1), cd(1)), 1e-13));
    CHECK(w3.map.branches()[1].coeff_close(Mobius(cd(3), cd(-1), cd(1), cd(0)), 1e-13));
    CHECK(w3.map(2.0) == doctest::Approx(3.0).epsilon(1e-14));  // x - 1 + y_n
    CHECK(w3.map.is_C1(1e-12));

    CHECK_THROWS_AS(construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 3.0}), ConstraintError);
    try {
        construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 3.0});
    } catch (const ConstraintError& e) {
        CHECK(e.product == doctest::Approx(2.0));
    }
}

TEST_CASE("construct properties over random constraint data") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::size_t> nn(2, 6);
    for (int k = 0; k < 200; ++k) {
        auto [x, y] = random_constraint_data(rng, nn(rng));
        CHECK(std::abs(check_product(x, y) - 1.0) < 1e-12);
        NormalizedWelding w = construct_welding(x, y);
        for (std::size_t j = 0; j < x.size(); ++j)
            CHECK(std::abs(w.map(x[j]) - y[j]) < 1e-12 * std::max(1.0, std::abs(y[j])));
        for (const ExtComplex& b : w.map.breakpoints())
            CHECK(std::abs(w.map.derivative_jump(b) - 1.0) < 1e-12);
        // Determinism.
        NormalizedWelding w2 = construct_welding(x, y);
        for (std::size_t j = 0; j < w.map.branches().size(); ++j)
            CHECK(w.map.branches()[j].coeff_close(w2.map.branches()[j], 0.0));
    }
}

TEST_CASE("recursion ends with unit derivative when the product is 1") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 100; ++k) {
        auto [x, y] = random_constraint_data(rng, 6);
        double deriv = 1.0;
        for (std::size_t j = 0; j + 1 < x.size(); ++j) {
            double s = (y[j + 1] - y[j]) / (x[j + 1] - x[j]);
            deriv = s * s / deriv;
        }
        CHECK(std::abs(deriv - 1.0) < 1e-10);
    }
}

TEST_CASE("normalize") {
    NormalizedWelding w = construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
    NormalizeResult r = normalize(w.map);
    CHECK(r.sigma_pre.coeff_close(Mobius::identity(), 1e-12));
    CHECK(r.sigma_post.coeff_close(Mobius::identity(), 1e-12));
    CHECK(r.welding.x.size() == 3);
    CHECK(r.welding.x[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.welding.y[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.welding.shift == doctest::Approx(1.0).epsilon(1e-12));

    // theta = 0 pair welding: identity away from [C,B] = [-1,1].
    PiecewiseMobius pw0 = pair_welding_example(0.0);
    NormalizeResult r0 = normalize(pw0);
    CHECK(r0.welding.shift == doctest::Approx(0.0).epsilon(1e-12));
    for (double x : {-2.0, 0.25, 0.75, 3.0})
        CHECK(r0.welding.map(x) == doctest::Approx(x).epsilon(1e-12));

    CHECK_THROWS_AS(normalize(spiral_welding(2.0)), std::domain_error);
    CHECK_THROWS_AS(normalize(PiecewiseMobius::single(Mobius::identity())),
                    std::domain_error);
}

TEST_CASE("normalize conjugation identity on a grid") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        auto [x, y] = random_constraint_data(rng, 5);
        NormalizedWelding w = construct_welding(x, y);
        Mobius s1 = random_increasing(rng), s2 = random_increasing(rng);
        PiecewiseMobius conj = w.map.postcompose(s1).precompose(s2);
        NormalizeResult r = normalize(conj);
        CHECK(r.welding.x.size() == x.size());
        for (int i = 0; i < 1000; ++i) {
            double t = -5.0 + 10.0 * i / 999.0;
            ExtComplex lhs = r.sigma_post.apply(conj.evaluate(r.sigma_pre.apply(ext_real(t))));
            ExtComplex rhs = r.welding.map.evaluate(ext_real(t));
            CHECK(chordal(lhs, rhs) < 1e-10);
        }
    }
}

TEST_CASE("equivalent") {
    std::mt19937_64 rng(55);
    NormalizedWelding w = construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
    CHECK(equivalent(w.map, w.map, 1e-10));

    for (int k = 0; k < 25; ++k) {
        Mobius s1 = random_increasing(rng), s2 = random_increasing(rng);
        PiecewiseMobius conj = w.map.postcompose(s1).precompose(s2);
        CHECK(equivalent(w.map, conj, 1e-8));
    }

    NormalizedWelding other = construct_welding({0.0, 0.25, 1.0}, {0.0, 2.0, 8.0});
    CHECK_FALSE(equivalent(w.map, other.map, 1e-6));
}

TEST_CASE("qs_constant") {
    PiecewiseMobius id2({ext_real(0.0), ext_real(1.0)},
                        {Mobius::identity(), Mobius::identity()});
    CHECK(qs_constant(id2) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK(qs_constant(spiral_welding(2.0)) == doctest::Approx(2.0).epsilon(1e-6));

    NormalizedWelding w = construct_welding({0.0, 0.5, 1.0}, {0.0, 1.0, 2.0});
    double m = qs_constant(w.map);
    CHECK(m > 1.0);
    CHECK(std::isfinite(m));
}

TEST_CASE("normalize_pair") {
    // Pair welding for theta = pi/6: shift +1 class.
    double theta = kPi / 6.0;
    TwoPieceAffine w8{1.0, 0.0, std::cos(theta) + theta * std::sin(theta),
                      1.0, 2.0 * kPi * std::sin(theta),
                      -std::cos(theta) - (theta + kPi) * std::sin(theta)};
    PairNormalization p = normalize_pair(w8);
    CHECK(p.cls == PairClass::ShiftPlusOne);
    double expect = -(1.0 / std::tan(theta) + theta) / kPi - 0.5;
    CHECK(p.left_cutoff == doctest::Approx(expect).epsilon(1e-12));
    // tau o omega o phi is x for x > 0 and x + 1 left of the cutoff.
    for (double x : {0.5, 2.0, 10.0})
        CHECK(real_of(p.tau.apply(ext_real(w8.a1 * real_of(p.phi.apply(ext_real(x))) + w8.b1))) ==
              doctest::Approx(x).epsilon(1e-12));
    for (double x : {p.left_cutoff - 0.5, p.left_cutoff - 3.0})
        CHECK(real_of(p.tau.apply(ext_real(w8.a2 * real_of(p.phi.apply(ext_real(x))) + w8.b2))) ==
              doctest::Approx(x + 1.0).epsilon(1e-11));

    // Identity (linear everywhere).
    PairNormalization lin = normalize_pair(TwoPieceAffine{1, 0, 0, 1, 0, 0});
    CHECK(lin.cls == PairClass::Linear);

    // Shift -1 class: x for x > 1, x - 2 for x < -1.
    PairNormalization m = normalize_pair(TwoPieceAffine{1, 0, 1, 1, -2, -1});
    CHECK(m.cls == PairClass::ShiftMinusOne);
    for (double x : {0.5, 4.0})
        CHECK(real_of(m.tau.apply(ext_real(real_of(m.phi.apply(ext_real(x)))))) ==
              doctest::Approx(x).epsilon(1e-12));
    for (double x : {m.left_cutoff - 1.0, m.left_cutoff - 4.0})
        CHECK(real_of(m.tau.apply(ext_real(real_of(m.phi.apply(ext_real(x))) - 2.0))) ==
              doctest::Approx(x - 1.0).epsilon(1e-12));

    // Identity-gap class.
    PairNormalization g = normalize_pair(TwoPieceAffine{2, 1, 3, 2, 1, -1});
    CHECK(g.cls == PairClass::IdentityGap);
    for (double x : {1.5, 6.0})
        CHECK(real_of(g.tau.apply(ext_real(2.0 * real_of(g.phi.apply(ext_real(x))) + 1.0))) ==
              doctest::Approx(x).epsilon(1e-12));
    for (double x : {-1.5, -6.0})
        CHECK(real_of(g.tau.apply(ext_real(2.0 * real_of(g.phi.apply(ext_real(x))) + 1.0))) ==
              doctest::Approx(x).epsilon(1e-12));

    // Discontinuous derivative at infinity is rejected.
    CHECK_THROWS_AS(normalize_pair(TwoPieceAffine{1, 0, 0, 2, 0, 0}),
                    std::invalid_argument);
}
