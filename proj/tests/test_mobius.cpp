#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "pgc/mobius.hpp"

using namespace pgc;

namespace {

Mobius random_real_increasing(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (;;) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        double det = a * d - b * c;
        if (det > 0.1) return Mobius(cd(a), cd(b), cd(c), cd(d));
        if (det < -0.1) return Mobius(cd(a), cd(-b), cd(c), cd(-d));
    }
}

ExtComplex random_sphere_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_int_distribution<int> inf(0, 19);
    if (inf(rng) == 0) return ExtComplex::infinity();
    return ExtComplex(cd(u(rng), u(rng)));
}

}  // namespace

TEST_CASE("apply conventions") {
    Mobius id = Mobius::identity();
    CHECK(id.apply(ExtComplex(cd(3, 4))) == ExtComplex(cd(3, 4)));

    Mobius inv(cd(0), cd(1), cd(1), cd(0));  // 1/z
    CHECK(inv.apply(ExtComplex(0.0)).at_infinity);
    CHECK(inv.apply(ExtComplex::infinity()) == ExtComplex(0.0));

    Mobius t(cd(2), cd(1), cd(1), cd(1));  // (2z+1)/(z+1)
    CHECK(t.apply(ExtComplex(0.0)) == ExtComplex(1.0));
    CHECK(std::abs(t(cd(0)) - cd(1)) == 0.0);
}

TEST_CASE("derivative and the two-point identity") {
    Mobius id = Mobius::identity();
    CHECK(std::abs(id.derivative(cd(0.7, -1.2)) - cd(1)) < 1e-15);

    Mobius t(cd(2), cd(1), cd(1), cd(1));
    CHECK(std::abs(t.derivative(cd(0)) - cd(1)) < 1e-15);
    CHECK(std::abs(t.derivative(cd(1)) - cd(0.25)) < 1e-15);
    // T'(0) T'(1) = ((T(1)-T(0))/(1-0))^2
    cd lhs = t.derivative(cd(0)) * t.derivative(cd(1));
    cd rhs = std::pow((t(cd(1)) - t(cd(0))) / cd(1), 2);
    CHECK(std::abs(lhs - rhs) < 1e-15);

    Mobius dbl(cd(2), cd(0), cd(0), cd(1));
    CHECK(std::abs(dbl.derivative(cd(5, 3)) - cd(2)) < 1e-14);

    Mobius pole(cd(1), cd(0), cd(1), cd(-1));  // z/(z-1)
    CHECK_THROWS_AS(pole.derivative(cd(1)), std::domain_error);
}

TEST_CASE("compose and inverse") {
    Mobius inv(cd(0), cd(1), cd(1), cd(0));
    CHECK(inv.compose(inv).coeff_close(Mobius::identity(), 1e-15));

    Mobius dbl(cd(2), cd(0), cd(0), cd(1));
    Mobius half = dbl.inverse();
    CHECK(std::abs(half(cd(2)) - cd(1)) < 1e-15);

    Mobius p1(cd(1), cd(1), cd(0), cd(1)), m1(cd(1), cd(-1), cd(0), cd(1));
    CHECK(p1.compose(m1).coeff_close(Mobius::identity(), 1e-15));
}

TEST_CASE("from_three_points") {
    ExtComplex z0(0.0), z1(1.0), zi = ExtComplex::infinity(), z2(2.0);
    CHECK(Mobius::from_three_points(z0, z1, zi, z0, z1, zi)
              .coeff_close(Mobius::identity(), 1e-14));

    Mobius dbl = Mobius::from_three_points(z0, z1, zi, z0, z2, zi);
    CHECK(dbl.coeff_close(Mobius(cd(2), cd(0), cd(0), cd(1)), 1e-14));

    Mobius inv = Mobius::from_three_points(z0, zi, z1, zi, z0, z1);
    CHECK(inv.coeff_close(Mobius(cd(0), cd(1), cd(1), cd(0)), 1e-14));

    CHECK_THROWS_AS(Mobius::from_three_points(z0, z0, z1, z0, z1, zi),
                    std::invalid_argument);
    CHECK_THROWS_AS(Mobius::from_three_points(z0, z1, zi, z0, z0, z1),
                    std::invalid_argument);
}

TEST_CASE("from_point_pair_and_derivative") {
    // z/(1-z)
    Mobius t1 = Mobius::from_point_pair_and_derivative(0.0, 0.5, 0.0, 1.0, 1.0);
    CHECK(t1.coeff_close(Mobius(cd(1), cd(0), cd(-1), cd(1)), 1e-14));
    CHECK(std::abs(t1(cd(0))) < 1e-15);
    CHECK(std::abs(t1(cd(0.5)) - cd(1)) < 1e-14);
    CHECK(std::abs(t1.derivative(cd(0)) - cd(1)) < 1e-14);

    // 3 - 1/z
    Mobius t2 = Mobius::from_point_pair_and_derivative(0.5, 1.0, 1.0, 2.0, 4.0);
    CHECK(t2.coeff_close(Mobius(cd(3), cd(-1), cd(1), cd(0)), 1e-14));
    CHECK(std::abs(t2.derivative(cd(0.5)) - cd(4)) < 1e-13);

    CHECK(Mobius::from_point_pair_and_derivative(0.0, 1.0, 0.0, 1.0, 1.0)
              .coeff_close(Mobius::identity(), 1e-14));

    CHECK_THROWS_AS(Mobius::from_point_pair_and_derivative(0, 0, 0, 1, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(Mobius::from_point_pair_and_derivative(0, 1, 0, 1, -2),
                    std::invalid_argument);
}

TEST_CASE("is_real_increasing") {
    CHECK(Mobius(cd(1), cd(1), cd(0), cd(1)).is_real_increasing());
    CHECK_FALSE(Mobius(cd(-1), cd(0), cd(0), cd(1)).is_real_increasing());
    CHECK(Mobius(cd(2), cd(1), cd(1), cd(1)).is_real_increasing());
    CHECK_FALSE(Mobius(cd(0, 1), cd(0), cd(0), cd(1)).is_real_increasing());
}

TEST_CASE("two-point derivative identity on random increasing maps") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 10000; ++k) {
        Mobius t = random_real_increasing(rng);
        double a = u(rng), b = u(rng);
        if (std::abs(a - b) < 1e-3) continue;
        cd ta, tb, da, db;
        try {
            ta = t(cd(a));
            tb = t(cd(b));
            da = t.derivative(cd(a));
            db = t.derivative(cd(b));
        } catch (const std::domain_error&) {
            continue;
        }
        cd lhs = da * db;
        cd rhs = std::pow((tb - ta) / cd(b - a), 2);
        double scale = std::max(std::abs(lhs), std::abs(rhs));
        if (scale > 1e8) continue;  // both sides blow up near the pole
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("group action round trip") {
    std::mt19937_64 rng(777);
    for (int k = 0; k < 2000; ++k) {
        Mobius t = random_real_increasing(rng);
        ExtComplex z = random_sphere_point(rng);
        ExtComplex back = t.inverse().apply(t.apply(z));
        CHECK(chordal(back, z) < 1e-13);
    }
}

TEST_CASE("from_three_points round trips its triple") {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 500; ++k) {
        ExtComplex p[3], q[3];
        auto distinct = [](ExtComplex* v) {
            return chordal(v[0], v[1]) > 1e-2 && chordal(v[1], v[2]) > 1e-2 &&
                   chordal(v[0], v[2]) > 1e-2;
        };
        do
            for (auto& e : p) e = random_sphere_point(rng);
        while (!distinct(p));
        do
            for (auto& e : q) e = random_sphere_point(rng);
        while (!distinct(q));
        Mobius t = Mobius::from_three_points(p[0], p[1], p[2], q[0], q[1], q[2]);
        for (int i = 0; i < 3; ++i) CHECK(chordal(t.apply(p[i]), q[i]) < 1e-12);
    }
}

TEST_CASE("from_point_pair_and_derivative is deterministic and well posed") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    std::uniform_real_distribution<double> d(0.1, 10.0);
    for (int k = 0; k < 500; ++k) {
        double a = u(rng), b = u(rng), al = u(rng), be = u(rng), de = d(rng);
        if (std::abs(a - b) < 0.05 || std::abs(al - be) < 0.05) continue;
        Mobius t1 = Mobius::from_point_pair_and_derivative(a, b, al, be, de);
        Mobius t2 = Mobius::from_point_pair_and_derivative(a, b, al, be, de);
        CHECK(t1.coeff_close(t2, 0.0));
        CHECK(std::abs(t1(cd(a)) - cd(al)) < 1e-11);
        CHECK(std::abs(t1(cd(b)) - cd(be)) < 1e-10);
        CHECK(std::abs(t1.derivative(cd(a)) - cd(de)) < 1e-10 * de);
    }
}
