#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "hexscat/lattice.hpp"
#include "hexscat/scalar.hpp"

namespace hexscat {

struct BranchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Branch of the torus phases being continued: positive means the real
// trace has xi_j in (0, pi), negative means xi_j in (-pi, 0). The two
// continuations are negatives of each other.
enum class Branch { positive, negative };

template <class R>
struct ThetaConstants {
    using C = complex_t<R>;
    R theta{};
    R c{};   // 2 - e^{2 theta}
    R a{};   // sqrt(2 - e^{2 theta})
    R b{};   // 2 sinh(theta) / a
    R a1{};  // (2a)^2
    R b1{};  // (b + sqrt(b^2+1))^2 = e^{2 theta} / (2 - e^{2 theta})
    C a2{};  // -sqrt(2) (2 - e^{2 theta}) i : the O(N) amplitude-ratio constant
    C b2{};  // -i / (sqrt(2) (2 - e^{2 theta})): the O(1/N) constant, 1/|a2|
             // (the two ratios multiply to exactly 1 on the level manifold)
};

// Requires 0 < theta < (1/2) log 2.
template <class R>
ThetaConstants<R> theta_constants(const R& theta) {
    using C = complex_t<R>;
    ThetaConstants<R> tc;
    tc.theta = theta;
    const R e2t = gm::exp_(R(theta * 2));
    tc.c = R(2) - e2t;
    if (!(theta > 0) || !(tc.c > 0))
        throw std::domain_error("theta_constants: theta must lie in (0, log(2)/2)");
    tc.a = gm::sqrt_(tc.c);
    tc.b = R(2) * gm::sinh_(theta) / tc.a;
    tc.a1 = R(4) * tc.c;
    tc.b1 = e2t / tc.c;
    const R sqrt2 = gm::sqrt_(R(2));
    tc.a2 = C(R(0), -sqrt2 * tc.c);
    tc.b2 = C(R(0), R(-1) / (sqrt2 * tc.c));
    return tc;
}

// Continued torus phases zeta(z, theta). The half-angle sine/cosine pairs
// are the primary data; e^{i n zeta} is formed from them by integer
// powers, which keeps phase factors free of log branch ambiguity.
template <class R>
struct ContinuedPhase {
    using C = complex_t<R>;
    C zeta1{}, zeta2{};
    C s1{}, c1{};  // sin(zeta1/2), cos(zeta1/2)
    C s2{}, c2{};
    Branch branch = Branch::positive;

    C e1() const { C h = c1 + C(R(0), R(1)) * s1; return h * h; }      // e^{i zeta1}
    C e2() const { C h = c2 + C(R(0), R(1)) * s2; return h * h; }      // e^{i zeta2}
    C e1_inv() const { C h = c1 - C(R(0), R(1)) * s1; return h * h; }  // e^{-i zeta1}
    C e2_inv() const { C h = c2 - C(R(0), R(1)) * s2; return h * h; }
};

struct ZetaOptions {
    int leg_steps = 32;
    int max_retries = 4;
    double method_check_tol = 1e-9;
    bool cross_check = true;  // run the quadratic inversion on ray-like points
};

namespace detail {

// g(z) = (1 - c z^2)^2 - 16 z^2 sinh^2(theta); all zeros are real
// (at +-e^{-theta} and +-e^{theta}/c), so sqrt(g) has single-valued
// branches on the upper half-plane.
template <class R>
complex_t<R> g_of(const complex_t<R>& z, const ThetaConstants<R>& tc) {
    using C = complex_t<R>;
    const C z2 = z * z;
    const C A = C(1) - z2 * tc.c;
    const R sh = gm::sinh_(tc.theta);
    return A * A - z2 * (R(16) * sh * sh);
}

// Picks the square root of `val` closest to `prev`. Returns false when the
// two candidates are nearly equidistant from prev (step too coarse).
template <class C>
bool track_sqrt(const C& val, const C& prev, C& out) {
    const C q = gm::sqrt_(val);
    const auto dp = gm::mag(C(q - prev));
    const auto dm = gm::mag(C(q + prev));
    out = (dp <= dm) ? q : -q;
    const auto lo = dp <= dm ? dp : dm;
    const auto hi = dp <= dm ? dm : dp;
    return lo * 4 <= hi * 3;
}

// Given the continued w = sqrt(g), forms the four half-angle squares
// without cancellation: the larger root of each pair directly, the
// smaller from the product identities
//   u1 u2 = 4 z^2 sinh^2(theta),   v1 v2 = z^2 e^{-2 theta}.
// u_j = sin^2(zeta_j/2), v_j = cos^2(zeta_j/2); u1 carries +w, v2 +w.
template <class R>
void half_angle_squares(const complex_t<R>& z, const complex_t<R>& w, const ThetaConstants<R>& tc,
                        complex_t<R>& u1, complex_t<R>& u2, complex_t<R>& v1, complex_t<R>& v2) {
    using C = complex_t<R>;
    const C z2 = z * z;
    const C A = C(1) - z2 * tc.c;
    const C B = C(1) + z2 * tc.c;
    const R sh = gm::sinh_(tc.theta);
    const C S = z2 * (R(4) * sh * sh);
    const C T = z2 * gm::exp_(R(tc.theta * -2));
    const C ap = (A + w) / R(2), am = (A - w) / R(2);
    if (gm::mag(ap) >= gm::mag(am)) {
        u1 = ap;
        u2 = S / u1;
    } else {
        u2 = am;
        u1 = S / u2;
    }
    const C bm = (B - w) / R(2), bp = (B + w) / R(2);
    if (gm::mag(bm) >= gm::mag(bp)) {
        v1 = bm;
        v2 = T / v1;
    } else {
        v2 = bp;
        v1 = T / v2;
    }
}

// Stable split of a complex value val = (x + i y)^2 into x^2 and y^2:
// the non-cancelling combination of |val| and Re(val) directly, the
// other from Im(val)^2 = 4 x^2 y^2.
template <class R>
void square_split(const complex_t<R>& val, R& xs, R& ys) {
    const R m = gm::mag(val);
    const R rv = gm::re(val);
    const R iv = gm::im(val);
    if (rv >= 0) {
        xs = (m + rv) / 2;
        ys = xs > 0 ? iv * iv / (xs * 4) : R(0);
    } else {
        ys = (m - rv) / 2;
        xs = ys > 0 ? iv * iv / (ys * 4) : R(0);
    }
}

// Positive root of t^2 + beta t - ys = 0 (ys >= 0), without cancellation.
template <class R>
R stable_positive_root(const R& beta, const R& ys) {
    const R disc = gm::sqrt_(R(beta * beta + ys * 4));
    if (beta >= 0) {
        const R den = beta + disc;
        return den > 0 ? R(ys * 2 / den) : R(0);
    }
    return (disc - beta) / 2;
}

// Path from the real anchor k0 into the upper half-plane and over to the
// target. Geometric spacing on the vertical legs keeps the relative step
// bounded when the target is far up the ray.
template <class R>
std::vector<complex_t<R>> continuation_path(const complex_t<R>& target, const R& k0,
                                            int leg_steps) {
    using C = complex_t<R>;
    std::vector<C> pts;
    const R x = gm::re(target), y = gm::im(target);
    const R half = R(1) / 2;
    const R ym = y > half ? y : half;
    const R quarter = R(1) / 4;
    const R y_start = ym < quarter ? ym : quarter;
    pts.push_back(C(k0, R(0)));
    for (int j = 1; j <= 4; ++j) pts.push_back(C(k0, y_start * j / 4));
    const R rho = gm::exp_(R(gm::log_(R(ym / y_start)) / leg_steps));
    R yy = y_start;
    for (int j = 1; j <= leg_steps; ++j) {
        yy = yy * rho;
        pts.push_back(C(k0, j == leg_steps ? ym : yy));
    }
    for (int j = 1; j <= leg_steps; ++j) pts.push_back(C(k0 + (x - k0) * j / leg_steps, ym));
    if (y < ym) {
        const R y_floor = y_start / 4;
        const R y_low = y > y_floor ? y : y_floor;
        const R sig = gm::exp_(R(gm::log_(R(y_low / ym)) / leg_steps));
        R yd = ym;
        for (int j = 1; j <= leg_steps; ++j) {
            yd = yd * sig;
            pts.push_back(C(x, yd));
        }
        for (int j = 1; j <= 4; ++j) pts.push_back(C(x, y_low + (y - y_low) * j / 4));
    }
    pts.push_back(target);
    return pts;
}

}  // namespace detail

// Analytic continuation of the positive-branch phases by tracking
// w = sqrt(g), sin(zeta1/2) and cos(zeta1/2) along a path from the real
// anchor; the second phase follows from the exact products
//   sin(zeta1/2) sin(zeta2/2) = 2 z sinh(theta),
//   cos(zeta1/2) cos(zeta2/2) = z e^{-theta}.
// At the anchor zeta1 is the smaller of the two real angles (w starts at
// -sqrt(g)); with that labelling zeta1 stays bounded on the ray z = 1+iN
// while zeta2 carries the 2 log N growth.
template <class R>
ContinuedPhase<R> zeta_by_path(const complex_t<R>& z, const ThetaConstants<R>& tc,
                               const ZetaOptions& opt = {}) {
    using C = complex_t<R>;
    const R k0 = R(1) / 2;  // inside (0, e^{-theta}) for every admissible theta

    int steps = opt.leg_steps;
    for (int attempt = 0;; ++attempt) {
        const auto pts = detail::continuation_path<R>(z, k0, steps);
        C w = -gm::sqrt_(detail::g_of<R>(pts.front(), tc));
        C u1, u2, v1, v2;
        detail::half_angle_squares<R>(pts.front(), w, tc, u1, u2, v1, v2);
        C s1 = gm::sqrt_(u1), c1 = gm::sqrt_(v1);
        bool ok = true;
        for (size_t i = 1; i < pts.size() && ok; ++i) {
            const C& p = pts[i];
            ok = detail::track_sqrt(detail::g_of<R>(p, tc), w, w);
            detail::half_angle_squares<R>(p, w, tc, u1, u2, v1, v2);
            ok = ok && detail::track_sqrt(u1, s1, s1);
            ok = ok && detail::track_sqrt(v1, c1, c1);
        }
        if (!ok) {
            if (attempt >= opt.max_retries)
                throw BranchError("zeta: branch tracking stayed ambiguous after retries");
            steps *= 2;
            continue;
        }
        ContinuedPhase<R> ph;
        ph.branch = Branch::positive;
        ph.s1 = s1;
        ph.c1 = c1;
        ph.s2 = z * (R(2) * gm::sinh_(tc.theta)) / s1;
        ph.c2 = z * gm::exp_(-tc.theta) / c1;
        const R tol = R(1e-8);
        const bool consistent =
            gm::mag(C(ph.s2 * ph.s2 - u2)) <= tol * (gm::mag(u2) + 1) &&
            gm::mag(C(ph.c2 * ph.c2 - v2)) <= tol * (gm::mag(v2) + 1);
        if (!consistent) {
            if (attempt >= opt.max_retries)
                throw BranchError("zeta: half-angle products inconsistent with tracked squares");
            steps *= 2;
            continue;
        }
        const C ih = C(R(0), R(1));
        ph.zeta1 = ih * gm::log_(C(ph.c1 + ih * ph.s1)) * R(-2);
        ph.zeta2 = ih * gm::log_(C(ph.c2 + ih * ph.s2)) * R(-2);
        return ph;
    }
}

// Quadratic half-angle inversion, valid on ray-like points z = x + iN
// with N >> |x|: resolves sqrt(g) by the large-N behaviour
// sin^2(zeta2/2) ~ -(2 - e^{2 theta}) z^2, then recovers eta_j + i kappa_j
// from cos^2(zeta1/2) and sin^2(zeta2/2) via the positive root of
//   t^2 + (x^2 + y^2 - 1) t - y^2 = 0.
// Positive-branch signs on the ray: kappa_1 > 0 (bounded component),
// kappa_2 < 0 (growing component); forced by the level identity.
template <class R>
ContinuedPhase<R> zeta_by_quadratic(const complex_t<R>& z, const ThetaConstants<R>& tc) {
    using C = complex_t<R>;
    const C q = gm::sqrt_(detail::g_of<R>(z, tc));
    const C z2 = z * z;
    C w = q;
    {
        const C A = C(1) - z2 * tc.c;
        const C u2p = (A - q) / R(2), u2m = (A + q) / R(2);
        const C asym = -(z2 * tc.c);
        w = (gm::mag(C(u2p - asym)) <= gm::mag(C(u2m - asym))) ? q : -q;
    }
    C u1, u2, v1, v2;
    detail::half_angle_squares<R>(z, w, tc, u1, u2, v1, v2);

    ContinuedPhase<R> ph;
    ph.branch = Branch::positive;

    // zeta1 from v1 = cos^2(zeta1/2): quadratic in t = sin^2(eta1/2)
    {
        R xs, ys;
        detail::square_split<R>(v1, xs, ys);
        const R beta = gm::mag(v1) - 1;
        const R t1 = detail::stable_positive_root<R>(beta, ys);
        const R sh_half = gm::sqrt_(R(t1 > 0 ? ys / t1 : R(0)));
        const R ch_half = gm::sqrt_(R(sh_half * sh_half + 1));
        const R kappa1 = R(2) * gm::log_(R(sh_half + ch_half));
        const R sinh_k = 2 * sh_half * ch_half;
        const R cos_eta = 1 - 2 * t1;
        const R sin_eta = sinh_k > 0 ? R(gm::im(v1) * -2 / sinh_k) : R(0);
        const R eta1 = gm::atan2_(sin_eta, cos_eta);
        const R sn = gm::sin_(R(eta1 / 2)), cn = gm::cos_(R(eta1 / 2));
        ph.s1 = C(sn * ch_half, cn * sh_half);
        ph.c1 = C(cn * ch_half, -sn * sh_half);
        ph.zeta1 = C(eta1, kappa1);
    }
    // zeta2 from u2 = sin^2(zeta2/2): quadratic in t = cos^2(eta2/2),
    // with kappa_2 < 0 on this branch
    {
        R xs, ys;
        detail::square_split<R>(u2, xs, ys);
        const R beta = gm::mag(u2) - 1;
        const R t2 = detail::stable_positive_root<R>(beta, ys);
        const R sh_half = -gm::sqrt_(R(t2 > 0 ? ys / t2 : R(0)));  // sinh(kappa2/2) < 0
        const R ch_half = gm::sqrt_(R(sh_half * sh_half + 1));
        const R kappa2 = R(-2) * gm::log_(R(ch_half - sh_half));
        const R sinh_k = 2 * sh_half * ch_half;
        const R cos_eta = 2 * t2 - 1;
        const R sin_eta = sinh_k != 0 ? R(gm::im(u2) * 2 / sinh_k) : R(0);
        const R eta2 = gm::atan2_(sin_eta, cos_eta);
        const R sn = gm::sin_(R(eta2 / 2)), cn = gm::cos_(R(eta2 / 2));
        ph.s2 = C(sn * ch_half, cn * sh_half);
        ph.c2 = C(cn * ch_half, -sn * sh_half);
        ph.zeta2 = C(eta2, kappa2);
    }
    return ph;
}

template <class R>
ContinuedPhase<R> negate_phase(const ContinuedPhase<R>& ph) {
    ContinuedPhase<R> out = ph;
    out.branch = ph.branch == Branch::positive ? Branch::negative : Branch::positive;
    out.zeta1 = -ph.zeta1;
    out.zeta2 = -ph.zeta2;
    out.s1 = -ph.s1;
    out.s2 = -ph.s2;
    return out;
}

// The continued phases at z on the requested branch. Path continuation is
// the primary method; the level identity alpha(zeta) conj_alpha(zeta)
// = 8 z^2 + 1 must hold on every output, and on ray-like points the
// quadratic inversion is run as an independent cross-check.
template <class R>
ContinuedPhase<R> zeta(const complex_t<R>& z, const ThetaConstants<R>& tc,
                       Branch branch = Branch::positive, const ZetaOptions& opt = {}) {
    using C = complex_t<R>;
    if (!(gm::im(z) >= 0))
        throw std::domain_error("zeta: z must lie in the closed upper half-plane");
    ContinuedPhase<R> ph = zeta_by_path<R>(z, tc, opt);
    {
        const C lvl = (C(1) + ph.e1() + ph.e2()) * (C(1) + ph.e1_inv() + ph.e2_inv());
        const C want = z * z * R(8) + C(1);
        if (gm::mag(C(lvl - want)) > R(1e-8) * (gm::mag(want) + 1))
            throw BranchError("zeta: level identity alpha*conj_alpha = 8z^2+1 violated");
    }
    const bool ray_like =
        opt.cross_check && gm::im(z) >= 10 && gm::im(z) >= 10 * gm::mag(gm::re(z));
    if (ray_like) {
        const ContinuedPhase<R> alt = zeta_by_quadratic<R>(z, tc);
        const auto rel = [](const C& x, const C& y) {
            return static_cast<double>(gm::mag(C(x - y)) / (gm::mag(x) + gm::mag(y) + 1e-300));
        };
        const double d1 = rel(ph.e1(), alt.e1());
        const double d2 = rel(ph.e2(), alt.e2());
        if (d1 > opt.method_check_tol || d2 > opt.method_check_tol) {
            std::ostringstream os;
            os << "zeta: path and quadratic methods disagree (rel " << d1 << ", " << d2
               << ") at z=(" << static_cast<double>(gm::re(z)) << ","
               << static_cast<double>(gm::im(z)) << "), theta=" << static_cast<double>(tc.theta)
               << "; path e1=(" << static_cast<double>(gm::re(ph.e1())) << ","
               << static_cast<double>(gm::im(ph.e1())) << ") quad e1=("
               << static_cast<double>(gm::re(alt.e1())) << ","
               << static_cast<double>(gm::im(alt.e1())) << ")";
            throw BranchError(os.str());
        }
    }
    return branch == Branch::positive ? ph : negate_phase(ph);
}

// e^{i n . zeta} via integer powers of the exact half-angle squares.
template <class R>
complex_t<R> phase_factor(LatticeSite n, const ContinuedPhase<R>& ph) {
    using C = complex_t<R>;
    const C f = gm::ipow(ph.e1(), n.n1) * gm::ipow(ph.e2(), n.n2);
    if constexpr (std::is_same_v<R, double>) {
        if (!std::isfinite(f.real()) || !std::isfinite(f.imag()))
            throw std::overflow_error("phase_factor: exponent out of double range at " +
                                      to_string(n));
    }
    return f;
}

// Principal sqrt(8 z^2 + 1); on paths from real k in (0,1) through the
// first quadrant this is the continuation of the band parameter
// lambda = sqrt(8 k^2 + 1) > 0 (the argument never crosses the cut).
template <class R>
complex_t<R> lambda_sqrt(const complex_t<R>& z) {
    using C = complex_t<R>;
    return gm::sqrt_(C(z * z * R(8) + C(1)));
}

enum class AlphaKind { alpha, conj_alpha };

// alpha(zeta)/sqrt(8 z^2 + 1), or the conjugate-series counterpart
// (1 + e^{-i zeta1} + e^{-i zeta2})/sqrt(8 z^2 + 1).
template <class R>
complex_t<R> amp_ratio(const ContinuedPhase<R>& ph, const complex_t<R>& z, AlphaKind which) {
    using C = complex_t<R>;
    const C num = which == AlphaKind::alpha ? C(C(1) + ph.e1() + ph.e2())
                                            : C(C(1) + ph.e1_inv() + ph.e2_inv());
    return num / lambda_sqrt<R>(z);
}

struct AsymptoticPrediction {
    double re_zeta1_mod_2pi;  // 0
    double im_zeta1;          // +- 2 log(b + sqrt(b^2+1))
    double re_zeta2_mod_2pi;  // pi (same residue class on both branches)
    double im_zeta2;          // +- (2 log N + log(4 a^2))
    // stated decay powers of the corrections, same order as the fields
    double rate_re1 = 3, rate_im1 = 2, rate_re2 = 1, rate_im2 = 2;
};

// Closed-form large-N predictions for zeta(1 + iN, theta).
AsymptoticPrediction asymptotic_prediction(double n_large, double theta, Branch branch);

}  // namespace hexscat
