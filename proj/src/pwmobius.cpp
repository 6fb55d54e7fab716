#include "pgc/pwmobius.hpp"

#include <algorithm>
#include <cmath>

namespace pgc {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool bp_less(const ExtComplex& a, const ExtComplex& b) {
    if (a.at_infinity) return false;
    if (b.at_infinity) return true;
    return a.value.real() < b.value.real();
}

// Right-derivative over left-derivative of two branches meeting at finite x.
// Computed as the derivative of left^{-1} o right, a near-identity map with
// no pole near x; this avoids the cancellation in evaluating cz+d for each
// branch separately and is exact at a common pole.
double jump_at_finite(const Mobius& left, const Mobius& right, double x) {
    using cl = std::complex<long double>;
    auto L = left.coeffs(), R = right.coeffs();
    cl la = L[0], lb = L[1], lc = L[2], ld = L[3];
    cl ra = R[0], rb = R[1], rc = R[2], rd = R[3];
    // adj(L) * R, derivative det/(cx+d)^2 at x.
    cl ma = ld * ra - lb * rc;
    cl mb = ld * rb - lb * rd;
    cl mc = la * rc - lc * ra;
    cl md = la * rd - lc * rb;
    cl den = mc * (long double)x + md;
    if (std::abs(den) == 0.0L)
        throw std::domain_error("derivative_jump: branches disagree at the breakpoint");
    cl r = (ma * md - mb * mc) / (den * den);
    if (!(r.real() > 0.0L))
        throw std::domain_error("derivative_jump: non-positive derivative ratio");
    return double(r.real());
}

}  // namespace

PiecewiseMobius::PiecewiseMobius(std::vector<ExtComplex> breakpoints,
                                 std::vector<Mobius> branches, double continuity_tol) {
    if (breakpoints.empty()) {
        if (branches.size() != 1)
            throw std::invalid_argument(
                "PiecewiseMobius: no breakpoints requires exactly one branch");
    } else if (breakpoints.size() != branches.size()) {
        throw std::invalid_argument("PiecewiseMobius: need one branch per arc");
    }

    // Accept any rotation of the cyclic order; store finite breakpoints in
    // increasing order with infinity last.
    if (!breakpoints.empty()) {
        std::size_t start = 0;
        std::size_t inf_count = 0;
        for (std::size_t i = 0; i < breakpoints.size(); ++i)
            if (breakpoints[i].at_infinity) {
                inf_count++;
                start = (i + 1) % breakpoints.size();
            }
        if (inf_count > 1)
            throw std::invalid_argument("PiecewiseMobius: repeated breakpoint at infinity");
        if (inf_count == 0) {
            start = std::min_element(breakpoints.begin(), breakpoints.end(), bp_less) -
                    breakpoints.begin();
        }
        breakpoints_.reserve(breakpoints.size());
        branches_.reserve(branches.size());
        for (std::size_t k = 0; k < breakpoints.size(); ++k) {
            std::size_t i = (start + k) % breakpoints.size();
            breakpoints_.push_back(breakpoints[i]);
            branches_.push_back(branches[i]);
        }
        for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i)
            if (!bp_less(breakpoints_[i], breakpoints_[i + 1]))
                throw std::invalid_argument("PiecewiseMobius: breakpoints not cyclically ordered");
    } else {
        branches_ = std::move(branches);
    }

    for (const Mobius& t : branches_)
        if (!t.is_real_increasing())
            throw std::invalid_argument("PiecewiseMobius: branch is not real-increasing");

    // Value-continuity at each breakpoint.
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        ExtComplex va = branch_after(i).apply(breakpoints_[i]);
        ExtComplex vb = branch_before(i).apply(breakpoints_[i]);
        if (chordal(va, vb) > continuity_tol)
            throw std::invalid_argument("PiecewiseMobius: discontinuous at a breakpoint");
    }

    // Global monotonicity: breakpoint images must be in increasing cyclic order.
    if (breakpoints_.size() >= 3) {
        std::size_t n = breakpoints_.size();
        for (std::size_t i = 0; i < n; ++i) {
            ExtComplex a = evaluate(breakpoints_[i]);
            ExtComplex b = evaluate(breakpoints_[(i + 1) % n]);
            ExtComplex c = evaluate(breakpoints_[(i + 2) % n]);
            if (!cyclic_between(a, b, c))
                throw std::invalid_argument("PiecewiseMobius: breakpoint images not monotone");
        }
    }
}

PiecewiseMobius PiecewiseMobius::single(const Mobius& m) {
    PiecewiseMobius p;
    p.branches_ = {m};
    return p;
}

const Mobius& PiecewiseMobius::branch_before(std::size_t i) const {
    return branches_[(i + branches_.size() - 1) % branches_.size()];
}

std::size_t PiecewiseMobius::arc_index(const ExtComplex& x) const {
    if (breakpoints_.empty()) return 0;
    std::size_t last = breakpoints_.size() - 1;
    if (x.at_infinity) return last;
    double v = x.value.real();
    // Arc wrapping through infinity (below the smallest finite breakpoint)
    // always carries the last branch index.
    std::size_t i = last;
    for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
        if (breakpoints_[j].at_infinity) break;
        if (v >= breakpoints_[j].value.real()) i = j;
    }
    if (!breakpoints_[0].at_infinity && v < breakpoints_[0].value.real()) i = last;
    return i;
}

ExtComplex PiecewiseMobius::evaluate(const ExtComplex& x) const {
    return branches_[arc_index(x)].apply(x);
}

std::size_t PiecewiseMobius::breakpoint_index(const ExtComplex& x, double tol) const {
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        const ExtComplex& b = breakpoints_[i];
        if (x.at_infinity && b.at_infinity) return i;
        if (!x.at_infinity && !b.at_infinity &&
            std::abs(x.value.real() - b.value.real()) <=
                tol * std::max(1.0, std::abs(b.value.real())))
            return i;
    }
    throw std::domain_error("PiecewiseMobius: not a breakpoint");
}

double PiecewiseMobius::derivative_jump(const ExtComplex& x_j) const {
    std::size_t i = breakpoint_index(x_j);
    if (!breakpoints_[i].at_infinity)
        return jump_at_finite(branch_before(i), branch_after(i),
                              breakpoints_[i].value.real());

    // Jump at infinity: conjugate by phi(z) = 1/(1-z), which sends infinity
    // to 0 and the approach through +infinity to the left side of 0. The
    // requested ratio slope(+inf)/slope(-inf) is the standard jump of the
    // conjugated map at 0.
    Mobius phi(cd(0), cd(1), cd(-1), cd(1));
    Mobius phi_inv = phi.inverse();
    Mobius left = phi.compose(branch_before(i)).compose(phi_inv);
    Mobius right = phi.compose(branch_after(i)).compose(phi_inv);
    return jump_at_finite(left, right, 0.0);
}

double PiecewiseMobius::spiral_rate_from_jump(const ExtComplex& x_j) const {
    return std::log(derivative_jump(x_j)) / (2.0 * kPi);
}

bool PiecewiseMobius::is_C1(double tol) const {
    for (const ExtComplex& b : breakpoints_) {
        double j = derivative_jump(b);
        if (j < 1.0 - tol || j > 1.0 + tol) return false;
    }
    return true;
}

PiecewiseMobius PiecewiseMobius::precompose(const Mobius& sigma) const {
    if (!sigma.is_real_increasing())
        throw std::invalid_argument("precompose: sigma is not real-increasing");
    if (breakpoints_.empty()) return single(branches_[0].compose(sigma));
    Mobius sigma_inv = sigma.inverse();
    std::vector<ExtComplex> bps;
    std::vector<Mobius> brs;
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
        bps.push_back(sigma_inv.apply(breakpoints_[i]));
        brs.push_back(branches_[i].compose(sigma));
    }
    return PiecewiseMobius(std::move(bps), std::move(brs));
}

PiecewiseMobius PiecewiseMobius::postcompose(const Mobius& sigma) const {
    if (!sigma.is_real_increasing())
        throw std::invalid_argument("postcompose: sigma is not real-increasing");
    std::vector<Mobius> brs;
    for (const Mobius& t : branches_) brs.push_back(sigma.compose(t));
    if (breakpoints_.empty()) return single(brs[0]);
    return PiecewiseMobius(breakpoints_, std::move(brs));
}

double check_product(const std::vector<double>& x, const std::vector<double>& y) {
    std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("check_product: need matching lists of length >= 2");
    for (std::size_t j = 0; j + 1 < n; ++j)
        if (!(x[j] < x[j + 1]) || !(y[j] < y[j + 1]))
            throw std::domain_error("check_product: lists must be strictly increasing");
    double p = 1.0;
    int sign = 1;
    for (std::size_t j = n - 1; j >= 1; --j) {
        double s = (y[j] - y[j - 1]) / (x[j] - x[j - 1]);
        p *= sign > 0 ? s : 1.0 / s;
        sign = -sign;
    }
    return p;
}

NormalizedWelding construct_welding(std::vector<double> x, std::vector<double> y,
                                    double tol) {
    std::size_t n = x.size();
    if (n < 2 || y.size() != n)
        throw std::invalid_argument("construct_welding: need matching lists of length >= 2");
    if (x.front() != 0.0 || x.back() != 1.0 || y.front() != 0.0)
        throw std::domain_error("construct_welding: expects x_1 = y_1 = 0, x_n = 1");
    double product = check_product(x, y);
    if (std::abs(product - 1.0) > tol) throw ConstraintError(product);

    // Restore the constraint exactly: the product is linear in the last slope,
    // so solve for y_n from the remaining data.
    double q = product * (x[n - 1] - x[n - 2]) / (y[n - 1] - y[n - 2]);
    y[n - 1] = y[n - 2] + (x[n - 1] - x[n - 2]) / q;

    std::vector<ExtComplex> bps;
    std::vector<Mobius> brs;
    double deriv = 1.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        bps.push_back(ext_real(x[j]));
        brs.push_back(Mobius::from_point_pair_and_derivative(x[j], x[j + 1], y[j],
                                                             y[j + 1], deriv));
        double s = (y[j + 1] - y[j]) / (x[j + 1] - x[j]);
        deriv = s * s / deriv;
    }
    bps.push_back(ext_real(1.0));
    brs.push_back(Mobius(cd(1), cd(y[n - 1] - 1.0), cd(0), cd(1)));
    bps.push_back(ExtComplex::infinity());
    brs.push_back(Mobius::identity());

    NormalizedWelding w;
    w.x = std::move(x);
    w.y = std::move(y);
    w.shift = w.y.back() - 1.0;
    w.map = PiecewiseMobius(std::move(bps), std::move(brs));
    return w;
}

namespace {

// Normalization with a chosen anchor breakpoint sent to infinity; the
// anchor's cyclic successor goes to 0, its cyclic predecessor to 1.
NormalizeResult normalize_at(const PiecewiseMobius& omega, std::size_t i0) {
    std::size_t k = omega.size();
    ExtComplex b0 = omega.breakpoints()[i0];
    ExtComplex b1 = omega.breakpoints()[(i0 + 1) % k];
    ExtComplex blast = omega.breakpoints()[(i0 + k - 1) % k];

    Mobius sigma_pre = Mobius::from_three_points(
        ExtComplex::infinity(), ext_real(0.0), ext_real(1.0), b0, b1, blast);
    // Branch on the arc from b0 to b1 becomes the identity tail on (-inf, 0).
    Mobius L = omega.branch_after(i0);
    Mobius sigma_post = L.compose(sigma_pre).inverse();

    // Assemble sigma_post o omega o sigma_pre directly so that the anchor
    // images (infinity, 0, 1) are exact rather than rounded.
    Mobius pre_inv = sigma_pre.inverse();
    std::vector<ExtComplex> bps(k);
    std::vector<Mobius> brs(k);
    for (std::size_t j = 0; j < k; ++j) {
        if (j == i0)
            bps[j] = ExtComplex::infinity();
        else if (j == (i0 + 1) % k)
            bps[j] = ext_real(0.0);
        else if (j == (i0 + k - 1) % k)
            bps[j] = ext_real(1.0);
        else
            bps[j] = ext_real(real_of(pre_inv.apply(omega.breakpoints()[j])));
        brs[j] = sigma_post.compose(omega.branch_after(j)).compose(sigma_pre);
    }
    // Fitted maps carry breakpoint mismatches of the order of their fit
    // residual; keep them acceptable after conjugation.
    double ctol = 1e-7;
    for (std::size_t j = 0; j < k; ++j)
        ctol = std::max(ctol, 2.0 * chordal(brs[(j + k - 1) % k].apply(bps[j]),
                                            brs[j].apply(bps[j])));
    PiecewiseMobius norm(std::move(bps), std::move(brs), ctol);

    NormalizeResult r;
    r.sigma_pre = sigma_pre;
    r.sigma_post = sigma_post;
    r.welding.map = norm;
    for (const ExtComplex& b : norm.breakpoints()) {
        if (b.at_infinity) continue;
        double xb = b.value.real();
        r.welding.x.push_back(xb);
        r.welding.y.push_back(real_of(norm.evaluate(b)));
    }
    r.welding.shift = r.welding.y.back() - 1.0;
    return r;
}

}  // namespace

NormalizeResult normalize(const PiecewiseMobius& omega, double c1_tol) {
    if (omega.size() < 2)
        throw std::domain_error("normalize: need at least 2 breakpoints");
    if (!omega.is_C1(c1_tol))
        throw std::domain_error("normalize: map is not C1 at every breakpoint");
    // Prefer an existing breakpoint at infinity so that already-normalized
    // input is a fixed point; otherwise anchor at the largest finite one.
    return normalize_at(omega, omega.size() - 1);
}

bool equivalent(const PiecewiseMobius& w1, const PiecewiseMobius& w2, double tol) {
    NormalizeResult a = normalize(w1);
    if (w2.size() < 2 || !w2.is_C1(1e-6))
        throw std::domain_error("equivalent: inputs must be C1 with >= 2 breakpoints");
    if (a.welding.x.size() != w2.size() - 1) return false;
    // The normalized form depends on which breakpoint is sent to infinity;
    // equivalence holds if any cyclic anchor of w2 matches.
    for (std::size_t i0 = 0; i0 < w2.size(); ++i0) {
        NormalizeResult b = normalize_at(w2, i0);
        if (a.welding.x.size() != b.welding.x.size()) continue;
        bool ok = std::abs(a.welding.shift - b.welding.shift) <= tol;
        for (std::size_t i = 0; ok && i < a.welding.x.size(); ++i)
            ok = std::abs(a.welding.x[i] - b.welding.x[i]) <= tol &&
                 std::abs(a.welding.y[i] - b.welding.y[i]) <= tol;
        if (ok) return true;
    }
    return false;
}

double qs_constant(const PiecewiseMobius& omega, std::size_t samples) {
    if (!omega.evaluate(ExtComplex::infinity()).at_infinity)
        throw std::domain_error("qs_constant: map must fix infinity");
    std::vector<double> xs;
    for (const ExtComplex& b : omega.breakpoints())
        if (b.is_finite()) xs.push_back(b.value.real());
    if (xs.empty()) xs.push_back(0.0);
    std::vector<double> base = xs;
    for (std::size_t i = 0; i + 1 < base.size(); ++i)
        xs.push_back(0.5 * (base[i] + base[i + 1]));

    double m = 1.0;
    std::size_t nt = std::max<std::size_t>(samples, 8);
    for (std::size_t i = 0; i < nt; ++i) {
        double e = -6.0 + 12.0 * double(i) / double(nt - 1);
        double t = std::pow(10.0, e);
        for (double x : xs) {
            double num = omega(x + t) - omega(x);
            double den = omega(x) - omega(x - t);
            if (!(num > 0.0) || !(den > 0.0)) continue;
            double r = num / den;
            m = std::max({m, r, 1.0 / r});
        }
    }
    return m;
}

PairNormalization normalize_pair(const TwoPieceAffine& w, double tol) {
    double scale = std::max({std::abs(w.a1), std::abs(w.b1), std::abs(w.b2), 1.0});
    if (std::abs(w.a1 - w.a2) > tol * scale)
        throw std::invalid_argument(
            "normalize_pair: derivative at infinity is discontinuous (a1 != a2); "
            "spiral case, see derivative_jump / spiral_rate_from_jump");
    if (!(w.a1 > 0.0) || w.c2 > w.c1)
        throw std::invalid_argument("normalize_pair: need a > 0 and c2 <= c1");
    double a = w.a1;

    PairNormalization r;
    if (std::abs(w.b1 - w.b2) > tol * scale) {
        double db = std::abs(w.b1 - w.b2);
        r.cls = w.b2 > w.b1 ? PairClass::ShiftPlusOne : PairClass::ShiftMinusOne;
        r.phi = Mobius(cd(db / a), cd(w.c1), cd(0), cd(1));
        r.tau = Mobius(cd(1), cd(-(a * w.c1 + w.b1)), cd(0), cd(db));
        r.left_cutoff = (w.c2 - w.c1) * a / db;
    } else if (w.c1 - w.c2 > tol * std::max({std::abs(w.c1), std::abs(w.c2), 1.0})) {
        r.cls = PairClass::IdentityGap;
        double dc = w.c1 - w.c2;
        r.phi = Mobius(cd(0.5 * dc), cd(0.5 * (w.c1 + w.c2)), cd(0), cd(1));
        r.tau = Mobius(cd(2.0 / (a * dc)), cd(-(w.c1 + w.c2 + 2.0 * w.b1 / a) / dc),
                       cd(0), cd(1));
        r.left_cutoff = 0.0;
    } else {
        r.cls = PairClass::Linear;
        r.phi = Mobius::identity();
        r.tau = Mobius(cd(1), cd(-w.b1), cd(0), cd(a));  // tau o omega = identity
        r.left_cutoff = 0.0;
    }
    return r;
}

}  // namespace pgc
