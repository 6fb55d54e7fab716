#include "pgc/explicit_pairs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pgc/errors.hpp"

namespace pgc {

GeodesicPairParams GeodesicPairParams::make(double theta) {
    if (!(theta >= -M_PI / 2 - 1e-12 && theta <= M_PI / 2 + 1e-12))
        throw std::invalid_argument("GeodesicPairParams: theta outside [-pi/2, pi/2]");
    GeodesicPairParams p;
    p.theta = theta;
    p.c = std::sin(theta);
    p.A = 0.5 * M_PI * p.c;
    p.B = std::cos(theta) + theta * p.c;
    p.C = -std::cos(theta) - (theta + M_PI) * p.c;
    p.D = 2.0 * p.A - p.B;
    return p;
}

SpiralParams SpiralParams::make(double theta) {
    if (!(std::abs(theta) < M_PI / 2))
        throw std::invalid_argument("SpiralParams: theta outside (-pi/2, pi/2)");
    SpiralParams s;
    s.theta = theta;
    s.rate = std::tan(theta);
    s.A_coef = 1.0 / cd(1.0, -s.rate);
    s.a = std::exp(-2.0 * M_PI * s.rate);
    return s;
}

namespace {

// Formula evaluation with the principal log, no domain checks.
cd raw_G(double c, cd z) { return 0.5 * (z + 1.0 / z) - cd(0, 1) * c * std::log(z); }

cd raw_G_prime(double c, cd z) {
    return (z * z - 2.0 * cd(0, 1) * c * z - 1.0) / (2.0 * z * z);
}

bool in_closed_half_disc(cd z, double tol) {
    return z.real() >= -tol && std::abs(z) <= 1.0 + tol;
}

// Newton iteration for G(z) = w from a given seed; empty result on failure.
std::optional<cd> newton_G(double c, cd w, cd z0) {
    cd z = z0;
    const double target = 1e-13 * std::max(1.0, std::abs(w));
    for (int it = 0; it < 80; ++it) {
        cd f;
        try {
            f = raw_G(c, z) - w;
        } catch (...) {
            return std::nullopt;
        }
        if (std::abs(f) < target) return z;
        cd dp = raw_G_prime(c, z);
        if (std::abs(dp) < 1e-15) return std::nullopt;
        cd step = f / dp;
        double m = std::abs(step);
        if (m > 0.4) step *= 0.4 / m;
        z -= step;
        if (std::abs(z) < 1e-12 || std::abs(z) > 10.0) return std::nullopt;
    }
    return std::nullopt;
}

bool valid_half_disc_root(double c, cd z, cd w, double geo_tol) {
    if (!in_closed_half_disc(z, geo_tol)) return false;
    return std::abs(raw_G(c, z) - w) <= 1e-12 * std::max(1.0, std::abs(w));
}

// Seeds near the critical point e^{i theta} where G ~ B + G''/2 (z-e^{i theta})^2;
// at |theta| = pi/2 the quadratic term vanishes and G ~ B - (z -+ i)^3/6.
void critical_seeds(double theta, double c, cd w, double B, std::vector<cd>& out) {
    cd zc = std::polar(1.0, theta);
    double co = std::cos(theta);
    if (std::abs(co) > 1e-8) {
        cd g2 = co * std::exp(cd(0, -2.0 * theta));
        cd d = std::sqrt(2.0 * (w - B) / g2);
        out.push_back(zc + d);
        out.push_back(zc - d);
    } else {
        cd r = std::pow(-6.0 * (w - B), 1.0 / 3.0);
        for (int k = 0; k < 3; ++k) {
            cd cand = zc + r * std::exp(cd(0, 2.0 * M_PI * k / 3.0));
            if (cand.real() >= -1e-9 && std::abs(cand) <= 1.0 + 1e-9) out.push_back(cand);
        }
    }
    (void)c;
}

cd invert_half_disc(double theta, double c, cd w, double B) {
    std::vector<cd> seeds;
    if (std::abs(w - B) < 0.5) critical_seeds(theta, c, w, B, seeds);
    if (std::abs(w) > 3.0) seeds.push_back(1.0 / (2.0 * w));
    std::vector<std::pair<double, cd>> grid;
    for (double r : {0.08, 0.2, 0.35, 0.5, 0.65, 0.8, 0.92})
        for (int j = 0; j < 16; ++j) {
            cd z = std::polar(r, -M_PI / 2 + M_PI * (j + 0.5) / 16.0);
            grid.emplace_back(std::abs(raw_G(c, z) - w), z);
        }
    std::sort(grid.begin(), grid.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t j = 0; j < std::min<std::size_t>(6, grid.size()); ++j)
        seeds.push_back(grid[j].second);
    for (cd s : seeds) {
        auto z = newton_G(c, w, s);
        if (z && valid_half_disc_root(c, *z, w, 1e-8)) return *z;
    }
    throw NumericalError("G_inverse: Newton iteration failed to locate a preimage");
}

}  // namespace

cd G(double theta, cd z, GMode mode) {
    auto p = GeodesicPairParams::make(theta);
    if (std::abs(z) == 0.0) throw std::domain_error("G: z = 0");
    if (std::abs(z) > 1.0 + 1e-9) throw std::domain_error("G: z outside the closed disc");
    if (mode == GMode::HalfDisc) {
        if (z.real() < -1e-9) throw std::domain_error("G: z outside the right half disc");
        return raw_G(p.c, z);
    }
    if (z.real() >= 0.0) return raw_G(p.c, z);
    // Reflected extension: the side of the left chord arm is the mirror side
    // of the right arm, read off from the sign of Im G at the mirror point.
    cd u = raw_G(p.c, -std::conj(z));
    if (u.imag() < 0.0) return 2.0 * p.A - std::conj(u);
    return -2.0 * p.A - std::conj(u);
}

cd G_prime(double theta, cd z) {
    if (std::abs(z) == 0.0) throw std::domain_error("G_prime: z = 0");
    return raw_G_prime(std::sin(theta), z);
}

bool in_U(double theta, cd w) {
    auto p = GeodesicPairParams::make(theta);
    if (w.imag() > 0.0) return w.real() > -p.A;
    if (w.imag() < 0.0) return w.real() > p.A;
    return w.real() > p.B;
}

cd G_inverse(double theta, cd w, GMode mode, int side) {
    auto p = GeodesicPairParams::make(theta);
    if (mode == GMode::HalfDisc) {
        if (w.imag() == 0.0 && std::abs(w.real() - p.B) < 1e-14)
            return std::polar(1.0, theta);
        // Closure of U within tolerance; boundary preimages land on the
        // closed half disc.
        bool real_w = std::abs(w.imag()) <= 1e-12;
        bool outside = (real_w && w.real() < -std::abs(p.A) - 1e-9) ||
                       (!real_w && w.imag() > 0.0 && w.real() <= -p.A - 1e-9) ||
                       (!real_w && w.imag() < 0.0 && w.real() <= p.A - 1e-9);
        if (outside) throw std::domain_error("G_inverse: w outside U");
        return invert_half_disc(theta, p.c, w, p.B);
    }
    if (w.imag() == 0.0) {
        if (std::abs(w.real() - p.B) < 1e-14) return std::polar(1.0, theta);
        if (w.real() > p.B) return invert_half_disc(theta, p.c, w, p.B);
        // On the slit: boundary values from above lie in (-inf, D), from
        // below in (-inf, C); both have preimages on the left chord arm.
        if (side >= 0) {
            if (w.real() >= p.D)
                throw std::domain_error("G_inverse: upper slit value not attained");
            return -std::conj(invert_half_disc(theta, p.c, 2.0 * p.A - w, p.B));
        }
        if (w.real() >= p.C)
            throw std::domain_error("G_inverse: lower slit value not attained");
        return -std::conj(invert_half_disc(theta, p.c, -2.0 * p.A - w, p.B));
    }
    if (w.imag() > 0.0) {
        if (w.real() > -p.A) return invert_half_disc(theta, p.c, w, p.B);
        cd u = -2.0 * p.A - std::conj(w);
        return -std::conj(invert_half_disc(theta, p.c, u, p.B));
    }
    if (w.real() > p.A) return invert_half_disc(theta, p.c, w, p.B);
    cd u = 2.0 * p.A - std::conj(w);
    return -std::conj(invert_half_disc(theta, p.c, u, p.B));
}

PGCurve trace_pair(double theta, std::size_t samples) {
    if (samples < 3) throw std::invalid_argument("trace_pair: samples < 3");
    auto p = GeodesicPairParams::make(theta);
    bool jordan = std::abs(std::cos(theta)) < 1e-12;
    const std::size_t N = samples;
    const double s = 0.05, wmax = 1e8;
    const double sigma = std::log1p((wmax - p.B) / s);

    std::vector<cd> arm(N);
    cd prev;
    for (std::size_t k = 1; k <= N; ++k) {
        double w = p.B + s * std::expm1(sigma * (double)k / (double)N);
        cd z;
        if (k == 1) {
            z = invert_half_disc(theta, p.c, cd(w, 0.0), p.B);
        } else {
            auto r = newton_G(p.c, cd(w, 0.0), prev);
            if (r && valid_half_disc_root(p.c, *r, cd(w, 0.0), 1e-8))
                z = *r;
            else
                z = invert_half_disc(theta, p.c, cd(w, 0.0), p.B);
        }
        arm[k - 1] = z;
        prev = z;
    }
    if (theta == 0.0)
        for (auto& z : arm) z = cd(z.real(), 0.0);

    cd end = std::polar(1.0, theta);
    PGCurve curve;
    curve.samples.reserve(2 * N + 3);
    curve.samples.push_back(ExtComplex(end));
    for (std::size_t k = 0; k < N; ++k) curve.samples.push_back(ExtComplex(arm[k]));
    curve.samples.push_back(ExtComplex(cd(0.0, 0.0)));
    for (std::size_t k = N; k-- > 0;)
        curve.samples.push_back(ExtComplex(-std::conj(arm[k])));
    if (!jordan) curve.samples.push_back(ExtComplex(-std::conj(end)));
    curve.closed = jordan;
    if (jordan)
        curve.vertex_indices = {0, N + 1};
    else
        curve.vertex_indices = {0, N + 1, 2 * N + 2};
    curve.flags.assign(curve.vertex_indices.size(), VertexFlag{});
    return curve;
}

PairWelding pair_welding(double theta) {
    PairWelding w;
    w.params = GeodesicPairParams::make(theta);
    w.shift = 2.0 * M_PI * w.params.c;
    w.upper = Mobius::identity();
    w.lower = Mobius(cd(1), cd(w.shift), cd(0), cd(1));
    w.degenerate_gap =
        std::min(w.params.B - w.params.C, w.params.B - w.params.D) < 1e-9;
    if (!w.degenerate_gap) {
        Mobius gap = Mobius::from_point_pair_and_derivative(
            w.params.B, w.params.C, w.params.B, w.params.D, 1.0);
        w.closure = PiecewiseMobius(
            {ext_real(w.params.C), ext_real(w.params.B), ExtComplex::infinity()},
            {gap, w.upper, w.lower});
    }
    return w;
}

PiecewiseMobius pair_welding_map(double theta) {
    PairWelding w = pair_welding(theta);
    if (!w.closure)
        throw std::domain_error("pair_welding_map: degenerate gap at |theta| = pi/2");
    return *w.closure;
}

cd pre_schwarzian(double theta, cd z) {
    cd zc = std::polar(1.0, theta);
    cd zm = -std::conj(zc);
    if (std::abs(z) == 0.0 || std::abs(z - zc) == 0.0 || std::abs(z - zm) == 0.0)
        throw std::domain_error("pre_schwarzian: pole input");
    return -2.0 / z + 1.0 / (z - zc) + 1.0 / (z - zm);
}

cd schwarzian_G(double theta, cd z) {
    cd zc = std::polar(1.0, theta);
    cd zm = -std::conj(zc);
    if (std::abs(z) == 0.0 || std::abs(z - zc) == 0.0 || std::abs(z - zm) == 0.0)
        throw std::domain_error("schwarzian_G: pole input");
    cd P = -2.0 / z + 1.0 / (z - zc) + 1.0 / (z - zm);
    cd Pp = 2.0 / (z * z) - 1.0 / ((z - zc) * (z - zc)) - 1.0 / ((z - zm) * (z - zm));
    return Pp - 0.5 * P * P;
}

cd spiral_point(double theta, SpiralBranch branch, double t) {
    auto s = SpiralParams::make(theta);
    cd arg = branch == SpiralBranch::Main ? cd(t, M_PI) : cd(t, 0.0);
    return std::exp(s.A_coef * arg);
}

PiecewiseMobius spiral_welding(double theta) {
    auto s = SpiralParams::make(theta);
    return PiecewiseMobius({ext_real(0.0), ExtComplex::infinity()},
                           {Mobius::identity(), Mobius(cd(s.a), cd(0), cd(0), cd(1))});
}

PGCurve halfplane_pair(double r, double t, std::size_t samples) {
    if (!(r > 0.0)) throw std::invalid_argument("halfplane_pair: r must be positive");
    if (!(t > 0.0 && t < M_PI))
        throw std::invalid_argument("halfplane_pair: t outside (0, pi)");
    double theta = t - M_PI / 2;
    PGCurve base = trace_pair(theta, samples);

    cd zeta = std::polar(r, t);
    cd e = std::exp(cd(0, -t));
    Mobius tau(-cd(0, 1) * e, cd(0, 1) * e * zeta, cd(1), -std::conj(zeta));
    Mobius tau_inv = tau.inverse();

    PGCurve out;
    out.samples.reserve(base.samples.size());
    for (const auto& z : base.samples) out.samples.push_back(tau_inv.apply(z));
    out.samples.front() = ExtComplex(cd(0.0, 0.0));
    out.samples.back() = ExtComplex::infinity();
    out.closed = false;
    out.vertex_indices = base.vertex_indices;
    out.flags = base.flags;
    return out;
}

}  // namespace pgc
