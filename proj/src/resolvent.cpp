#include "hexscat/resolvent.hpp"

#include <cmath>
#include <numbers>

namespace hexscat {

Mat2<double> r0_quad(std::complex<double> z, LatticeSite n, int grid_k) {
    using C = std::complex<double>;
    if (grid_k < 8) throw std::invalid_argument("r0_quad: grid must be >= 8");
    if (!admissible_spectral_point(z)) throw std::domain_error("r0_quad: z inside the band");
    const double h = 2.0 * std::numbers::pi / grid_k;
    const C z2 = z * z;
    Mat2<double> acc;
    for (int j = 0; j < grid_k; ++j) {
        const double xi1 = j * h;
        for (int l = 0; l < grid_k; ++l) {
            const double xi2 = l * h;
            const C alpha = 1.0 + std::exp(C(0, xi1)) + std::exp(C(0, xi2));
            const double r = std::norm(alpha);
            const C den = z2 - r;
            if (std::abs(den) < 1e-12)
                throw std::domain_error("r0_quad: symbol denominator vanished on the grid");
            const C phase = std::exp(C(0, -(n.n1 * xi1 + n.n2 * xi2)));
            const C f = phase / den;
            acc.m11 += -z * f;
            acc.m12 += -alpha * f;
            acc.m21 += -std::conj(alpha) * f;
        }
    }
    const double w = 1.0 / (double(grid_k) * grid_k);
    acc.m11 *= w;
    acc.m12 *= w;
    acc.m21 *= w;
    acc.m22 = acc.m11;
    return acc;
}

Mat2<double> r0_quad_auto(std::complex<double> z, LatticeSite n, double tol, int start_grid,
                          int max_grid) {
    Mat2<double> prev = r0_quad(z, n, start_grid);
    for (int k = 2 * start_grid; k <= max_grid; k *= 2) {
        const Mat2<double> cur = r0_quad(z, n, k);
        if ((cur - prev).inf_norm() <= tol) return cur;
        prev = cur;
    }
    throw std::runtime_error("r0_quad_auto: quadrature failed to stabilize (z too close to the band?)");
}

double fit_loglog_slope(const std::vector<double>& ns, const std::vector<double>& values) {
    if (ns.size() != values.size() || ns.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need matching samples, at least 2");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = int(ns.size());
    for (int i = 0; i < m; ++i) {
        const double x = std::log(ns[i]);
        const double y = std::log(values[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

std::vector<DecayFit> decay_probe(const PotentialField& q,
                                  const std::vector<std::pair<LatticeSite, LatticeSite>>& pairs,
                                  const std::vector<double>& ns_values) {
    if (ns_values.size() < 4) throw std::invalid_argument("decay_probe: need at least 4 N values");
    for (size_t i = 1; i < ns_values.size(); ++i)
        if (!(ns_values[i] > ns_values[i - 1]))
            throw std::invalid_argument("decay_probe: N values must increase");

    std::vector<LatticeSite> extra;
    for (const auto& [n, m] : pairs) {
        extra.push_back(n);
        extra.push_back(m);
    }

    std::vector<ResolventBlock<double>> blocks;
    blocks.reserve(ns_values.size());
    for (const double nv : ns_values)
        blocks.push_back(resolvent_block<double>(q, {1.0, nv}, extra));

    std::vector<DecayFit> fits;
    for (const auto& [n, m] : pairs) {
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j) {
                DecayFit f;
                f.n = n;
                f.m = m;
                f.i = i;
                f.j = j;
                const LatticeSite d = n - m;
                if (i == j)
                    f.target = -(2.0 * dist(DistKind::D, d) + 1.0);
                else if (i == 1)
                    f.target = -(2.0 * dist(DistKind::D12, d) + 2.0);
                else
                    f.target = -(2.0 * dist(DistKind::D21, d) + 2.0);

                std::vector<double> mags;
                bool zero = false;
                for (const auto& blk : blocks) {
                    const Mat2<double> b = blk.block(n, m);
                    const std::complex<double> e = (i == 1 && j == 1)   ? b.m11
                                                   : (i == 1 && j == 2) ? b.m12
                                                   : (i == 2 && j == 1) ? b.m21
                                                                        : b.m22;
                    const double a = std::abs(e);
                    if (a < 1e-280) {
                        zero = true;
                        break;
                    }
                    mags.push_back(a);
                }
                if (zero) {
                    f.zero_entry = true;
                    f.slope = -std::numeric_limits<double>::infinity();
                } else {
                    f.slope = fit_loglog_slope(ns_values, mags);
                }
                fits.push_back(f);
            }
    }
    return fits;
}

}  // namespace hexscat
