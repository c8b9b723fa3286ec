#pragma once

#include <algorithm>
#include <complex>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "hexscat/lattice.hpp"
#include "hexscat/linalg.hpp"
#include "hexscat/scalar.hpp"
#include "hexscat/spectral.hpp"

namespace hexscat {

// z is an admissible spectral point when it avoids the band [-3, 3].
inline bool admissible_spectral_point(std::complex<double> z) {
    return z.imag() != 0.0 || std::abs(z.real()) > 3.0;
}

template <class R>
struct Mat2 {
    using C = complex_t<R>;
    C m11{}, m12{}, m21{}, m22{};

    friend Mat2 operator-(const Mat2& a, const Mat2& b) {
        return {a.m11 - b.m11, a.m12 - b.m12, a.m21 - b.m21, a.m22 - b.m22};
    }
    double inf_norm() const {
        double m = 0.0;
        for (const C* e : {&m11, &m12, &m21, &m22})
            m = std::max(m, static_cast<double>(gm::mag(*e)));
        return m;
    }
};

// Fourier coefficient tables of r^s, r^s alpha and r^s conj(alpha),
// built once by exact convolution (all coefficients are nonnegative
// integers, so the supports are structural: every stored frequency n
// obeys d(n) <= s, d12(n) <= s, d21(n) <= s respectively). Immutable
// after construction; safe for concurrent reads.
template <class R>
class SeriesTable {
  public:
    struct Row {
        std::map<LatticeSite, R> r, ra, rca;
    };

    explicit SeriesTable(int smax) {
        std::map<LatticeSite, R> rs{{{0, 0}, R(1)}};
        const std::vector<std::pair<LatticeSite, R>> rgen = {
            {{0, 0}, R(3)},  {{1, 0}, R(1)},  {{0, 1}, R(1)},  {{1, -1}, R(1)},
            {{-1, 0}, R(1)}, {{0, -1}, R(1)}, {{-1, 1}, R(1)}};
        const std::vector<std::pair<LatticeSite, R>> agen = {
            {{0, 0}, R(1)}, {{1, 0}, R(1)}, {{0, 1}, R(1)}};
        const std::vector<std::pair<LatticeSite, R>> cagen = {
            {{0, 0}, R(1)}, {{-1, 0}, R(1)}, {{0, -1}, R(1)}};
        for (int s = 0; s <= smax; ++s) {
            if (s > 0) rs = convolve(rs, rgen);
            Row row;
            row.r = rs;
            row.ra = convolve(rs, agen);
            row.rca = convolve(rs, cagen);
            rows_.push_back(std::move(row));
        }
    }

    int smax() const { return int(rows_.size()) - 1; }
    const Row& row(int s) const { return rows_.at(size_t(s)); }

    R coeff_r(int s, LatticeSite n) const { return lookup(row(s).r, n); }
    R coeff_ra(int s, LatticeSite n) const { return lookup(row(s).ra, n); }
    R coeff_rca(int s, LatticeSite n) const { return lookup(row(s).rca, n); }

  private:
    static R lookup(const std::map<LatticeSite, R>& m, LatticeSite n) {
        auto it = m.find(n);
        return it == m.end() ? R(0) : it->second;
    }
    static std::map<LatticeSite, R> convolve(const std::map<LatticeSite, R>& p,
                                             const std::vector<std::pair<LatticeSite, R>>& gen) {
        std::map<LatticeSite, R> out;
        for (const auto& [n, a] : p)
            for (const auto& [m, b] : gen) out[n + m] += a * b;
        return out;
    }

    std::vector<Row> rows_;
};

// Smallest truncation order making the geometric series tail
// sum_{j>s} 9^j |z|^{-2j-1} smaller than tol. Requires |z| > 3.
inline int series_order_for(double abs_z, int dist_min, double tol, int cap = 96) {
    if (!(abs_z > 3.0)) throw std::domain_error("r0_series: requires |z| > 3");
    const double ratio = 9.0 / (abs_z * abs_z);
    double term = std::pow(ratio, dist_min + 1) / abs_z;  // bound at s = dist_min + 1
    int s = dist_min + 1;
    while (term / (1.0 - ratio) > tol && s < cap) {
        term *= ratio;
        ++s;
    }
    return s;
}

// Free-resolvent matrix element <P(n+m)| R0(z) |P(m)> by the large-|z|
// expansion: diagonal entries -sum_s c_{r^s}(n) z^{-2s-1}, off-diagonal
// -sum_s c_{r^s alpha}(n) z^{-2s-2} (12) and the conj(alpha) row (21).
template <class R>
Mat2<R> r0_series_tabulated(const complex_t<R>& z, LatticeSite n, int smax,
                            const SeriesTable<R>& table) {
    using C = complex_t<R>;
    if (!(gm::mag(z) > 3)) throw std::domain_error("r0_series: requires |z| > 3");
    if (smax < dist(DistKind::D, n))
        throw std::invalid_argument("r0_series: smax below d(n), expansion would truncate to 0");
    if (smax > table.smax()) throw std::invalid_argument("r0_series: table too short");
    const C zinv = C(1) / z;
    const C zinv2 = zinv * zinv;
    C p_odd = zinv;          // z^{-2s-1} at s = 0
    C p_even = zinv * zinv;  // z^{-2s-2} at s = 0
    Mat2<R> out;
    for (int s = 0; s <= smax; ++s) {
        const auto& row = table.row(s);
        auto it = row.r.find(n);
        if (it != row.r.end()) {
            out.m11 -= it->second * p_odd;
        }
        it = row.ra.find(n);
        if (it != row.ra.end()) out.m12 -= it->second * p_even;
        it = row.rca.find(n);
        if (it != row.rca.end()) out.m21 -= it->second * p_even;
        p_odd = p_odd * zinv2;
        p_even = p_even * zinv2;
    }
    out.m22 = out.m11;
    return out;
}

template <class R>
Mat2<R> r0_series(const complex_t<R>& z, LatticeSite n, int smax) {
    const SeriesTable<R> table(smax);
    return r0_series_tabulated<R>(z, n, smax, table);
}

// Trapezoidal quadrature of R0(z, xi) e^{-i n xi} over the torus with the
// plain Fourier-coefficient normalization 1/(2 pi)^2, so the s = 0
// diagonal term is -1/z. Spectrally accurate for admissible z.
Mat2<double> r0_quad(std::complex<double> z, LatticeSite n, int grid_k);

// Doubles the grid until two successive values differ by at most tol.
Mat2<double> r0_quad_auto(std::complex<double> z, LatticeSite n, double tol = 1e-12,
                          int start_grid = 16, int max_grid = 4096);

struct TruncationSpec {
    int keep_q1_above = 0;  // keep q1 on rows n2 > keep_q1_above
    int keep_q2_above = 0;  // keep q2 on rows n2 > keep_q2_above
};

// Matrix of 2x2 resolvent blocks <P(n)| R(z) |P(m)> over a declared
// finite site set, obtained from the finite linear system
// (I + G0 Q) X = G0 (second resolvent identity restricted to supp q).
template <class R>
struct ResolventBlock {
    using C = complex_t<R>;
    C z{};
    std::vector<LatticeSite> sites;
    DenseMatrix<C> x;
    double rcond = 0.0;
    double residual_inf = 0.0;

    int index(LatticeSite n) const {
        auto it = std::lower_bound(sites.begin(), sites.end(), n);
        if (it == sites.end() || !(*it == n)) return -1;
        return int(it - sites.begin());
    }
    Mat2<R> block(LatticeSite n, LatticeSite m) const {
        const int i = index(n), j = index(m);
        if (i < 0 || j < 0)
            throw std::invalid_argument("ResolventBlock: site not in declared set");
        return {x(2 * i, 2 * j), x(2 * i, 2 * j + 1), x(2 * i + 1, 2 * j), x(2 * i + 1, 2 * j + 1)};
    }
};

template <class R>
Mat2<R> r0_entry(const complex_t<R>& z, LatticeSite n, const SeriesTable<R>& table) {
    const double az = static_cast<double>(gm::mag(z));
    if (az >= 8.0) {
        const int s = series_order_for(az, dist(DistKind::D, n),
                                       static_cast<double>(scalar_traits<R>::eps()) / az,
                                       table.smax());
        return r0_series_tabulated<R>(z, n, std::max(s, dist(DistKind::D, n)), table);
    }
    if constexpr (std::is_same_v<R, double>) {
        return r0_quad_auto(z, n);
    } else {
        throw std::domain_error("r0_entry: high-precision path requires |z| >= 8");
    }
}

// Suitable table order for all pairwise differences of `sites` at z.
template <class R>
int suggest_table_order(double abs_z, const std::vector<LatticeSite>& sites) {
    int dmax = 0;
    for (const auto& n : sites)
        for (const auto& m : sites) dmax = std::max(dmax, dist(DistKind::D, n - m));
    if (abs_z >= 8.0)
        return series_order_for(abs_z, dmax, static_cast<double>(scalar_traits<R>::eps()) / abs_z);
    return dmax;  // quadrature path; table only used for supports
}

template <class R>
ResolventBlock<R> resolvent_block(const PotentialField& q, const complex_t<R>& z,
                                  const std::vector<LatticeSite>& extra_sites = {},
                                  const SeriesTable<R>* table = nullptr) {
    using C = complex_t<R>;
    if (!admissible_spectral_point({static_cast<double>(gm::re(z)), static_cast<double>(gm::im(z))}))
        throw std::domain_error("resolvent_block: z inside the band [-3,3]");

    ResolventBlock<R> out;
    out.z = z;
    for (const auto& [n, v] : q.entries())
        if (v.q1 != 0.0 || v.q2 != 0.0) out.sites.push_back(n);
    out.sites.insert(out.sites.end(), extra_sites.begin(), extra_sites.end());
    std::sort(out.sites.begin(), out.sites.end());
    out.sites.erase(std::unique(out.sites.begin(), out.sites.end()), out.sites.end());
    const int ns = int(out.sites.size());
    if (ns == 0) {
        out.x = DenseMatrix<C>(0, 0);
        out.rcond = 1.0;
        return out;
    }

    std::unique_ptr<SeriesTable<R>> local;
    if (!table) {
        local = std::make_unique<SeriesTable<R>>(
            suggest_table_order<R>(static_cast<double>(gm::mag(z)), out.sites));
        table = local.get();
    }

    DenseMatrix<C> g0(2 * ns, 2 * ns);
    for (int i = 0; i < ns; ++i)
        for (int j = 0; j < ns; ++j) {
            const Mat2<R> b = r0_entry<R>(z, out.sites[i] - out.sites[j], *table);
            g0(2 * i, 2 * j) = b.m11;
            g0(2 * i, 2 * j + 1) = b.m12;
            g0(2 * i + 1, 2 * j) = b.m21;
            g0(2 * i + 1, 2 * j + 1) = b.m22;
        }

    // A = I + G0 Q with Q block-diagonal
    DenseMatrix<C> a = DenseMatrix<C>::identity(2 * ns);
    std::vector<R> qdiag(size_t(2) * ns, R(0));
    for (int j = 0; j < ns; ++j) {
        const auto e = q.at(out.sites[j]);
        qdiag[2 * j] = R(e.q1);
        qdiag[2 * j + 1] = R(e.q2);
    }
    for (int i = 0; i < 2 * ns; ++i)
        for (int j = 0; j < 2 * ns; ++j) a(i, j) += g0(i, j) * qdiag[j];

    DenseLU<C> lu(a);
    const double norm_a = a.inf_norm();
    const double norm_ainv = lu.inverse().inf_norm();
    out.rcond = 1.0 / std::max(norm_a * norm_ainv, 1.0);
    if (out.rcond < 1e-13)
        throw SingularSystemError("resolvent_block: system nearly singular (z close to a "
                                  "resonance of the truncated problem)",
                                  norm_a * norm_ainv);
    out.x = lu.solve(g0);

    // identity residual X - G0 + G0 Q X
    DenseMatrix<C> qx(2 * ns, 2 * ns);
    for (int i = 0; i < 2 * ns; ++i)
        for (int j = 0; j < 2 * ns; ++j) qx(i, j) = qdiag[i] * out.x(i, j);
    out.residual_inf = (out.x - g0 + g0 * qx).inf_norm();
    return out;
}

template <class R>
ResolventBlock<R> truncated_resolvent_block(const PotentialField& q, TruncationSpec t,
                                            const complex_t<R>& z,
                                            const std::vector<LatticeSite>& extra_sites = {},
                                            const SeriesTable<R>* table = nullptr) {
    return resolvent_block<R>(truncate_rows(q, t.keep_q1_above, t.keep_q2_above), z, extra_sites,
                              table);
}

// Least-squares slope of log|value| against log N.
double fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& values);

struct DecayFit {
    LatticeSite n, m;
    int i = 0, j = 0;  // matrix entry, 1-based
    double slope = 0.0;
    double target = 0.0;  // -(2 d + 1) on the diagonal, -(2 d_ij + 2) off it
    bool zero_entry = false;
};

// Fits the large-N decay of resolvent entries along z = 1 + iN.
std::vector<DecayFit> decay_probe(const PotentialField& q,
                                  const std::vector<std::pair<LatticeSite, LatticeSite>>& pairs,
                                  const std::vector<double>& ns_values);

}  // namespace hexscat
