#include "hexscat/lattice.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace hexscat {

std::string to_string(LatticeSite n) {
    std::ostringstream os;
    os << "(" << n.n1 << "," << n.n2 << ")";
    return os.str();
}

int dist(DistKind kind, LatticeSite n) {
    const int a1 = std::abs(n.n1);
    const int a2 = std::abs(n.n2);
    switch (kind) {
        case DistKind::D:
            if (static_cast<long long>(n.n1) * n.n2 >= 0) return a1 + a2;
            return std::max(a1, a2);
        case DistKind::D12:
            if (n.n1 > 0 && n.n2 > 0) return a1 + a2 - 1;
            if (n.n1 > 0 && n.n2 <= 0) return std::max(a1 - 1, a2);
            if (n.n1 <= 0 && n.n2 <= 0) return a1 + a2;
            return std::max(a1, a2 - 1);  // n1 <= 0, n2 > 0
        case DistKind::D21:
            return dist(DistKind::D12, -n);
    }
    throw std::logic_error("dist: bad kind");
}

HexCoords hex_coords(LatticeSite n) {
    HexCoords h;
    const int s = n.n1 + n.n2;
    // ((s % 2) + 2) % 2 keeps the parity test correct for negative sums.
    if (((s % 2) + 2) % 2 == 0) {
        h.parity = Parity::even;
        h.m1 = (n.n1 + n.n2) / 2;
        h.m2 = (n.n2 - n.n1) / 2;
    } else {
        h.parity = Parity::odd;
        h.m1 = (n.n1 + n.n2 - 1) / 2;
        h.m2 = (n.n2 - 1 - n.n1) / 2;
    }
    return h;
}

LatticeSite site_from_hex(const HexCoords& h) {
    if (h.parity == Parity::even) return {h.m1 - h.m2, h.m1 + h.m2};
    return {h.m1 - h.m2, 1 + h.m1 + h.m2};
}

namespace {

using CheckFn2 = bool (*)(LatticeSite, LatticeSite);
using CheckFn1 = bool (*)(LatticeSite);

int d(LatticeSite n) { return dist(DistKind::D, n); }
int d12(LatticeSite n) { return dist(DistKind::D12, n); }
int d21(LatticeSite n) { return dist(DistKind::D21, n); }

LemmaCheck run_pairwise(const std::string& name, int radius, CheckFn2 ok) {
    LemmaCheck c{name, true, 0, {}};
    for (int u1 = -radius; u1 <= radius; ++u1)
        for (int u2 = -radius; u2 <= radius; ++u2)
            for (int v1 = -radius; v1 <= radius; ++v1)
                for (int v2 = -radius; v2 <= radius; ++v2) {
                    const LatticeSite u{u1, u2}, v{v1, v2};
                    ++c.checked;
                    if (!ok(u, v)) {
                        c.pass = false;
                        c.counterexample = "u=" + to_string(u) + " v=" + to_string(v);
                        return c;
                    }
                }
    return c;
}

LemmaCheck run_single(const std::string& name, int radius, CheckFn1 ok) {
    LemmaCheck c{name, true, 0, {}};
    for (int n1 = -radius; n1 <= radius; ++n1)
        for (int n2 = -radius; n2 <= radius; ++n2) {
            const LatticeSite n{n1, n2};
            ++c.checked;
            if (!ok(n)) {
                c.pass = false;
                c.counterexample = "n=" + to_string(n);
                return c;
            }
        }
    return c;
}

}  // namespace

LatticeReport verify_distance_lemmas(int radius) {
    if (radius < 1) throw std::invalid_argument("verify_distance_lemmas: radius must be >= 1");
    LatticeReport rep;
    rep.radius = radius;

    rep.checks.push_back(run_single("norm.definiteness", radius, [](LatticeSite n) {
        const int v = d(n);
        if (v < 0) return false;
        return (v == 0) == (n.n1 == 0 && n.n2 == 0);
    }));
    rep.checks.push_back(run_single("norm.symmetry", radius, [](LatticeSite n) {
        return d(n) == d(-n);
    }));
    rep.checks.push_back(run_single("norm.homogeneity", radius, [](LatticeSite n) {
        for (int a = -3; a <= 3; ++a)
            if (d(a * n) != std::abs(a) * d(n)) return false;
        return true;
    }));
    rep.checks.push_back(run_single("reflection.d12_d21", radius, [](LatticeSite n) {
        return d12(n) == d21(-n);
    }));
    rep.checks.push_back(run_single("lower_bound.n2", radius, [](LatticeSite n) {
        const int a2 = std::abs(n.n2);
        if (d(n) < a2) return false;
        if (d12(n) < (n.n2 > 0 ? a2 - 1 : a2)) return false;
        if (d21(n) < (n.n2 >= 0 ? a2 : a2 - 1)) return false;
        return true;
    }));
    rep.checks.push_back(run_single("sandwich.d_minus_1", radius, [](LatticeSite n) {
        const int dv = d(n);
        return dv - 1 <= d12(n) && d12(n) <= dv && dv - 1 <= d21(n) && d21(n) <= dv;
    }));

    rep.checks.push_back(run_pairwise("triangle.d", radius, [](LatticeSite u, LatticeSite v) {
        return d(u + v) <= d(u) + d(v);
    }));
    rep.checks.push_back(run_pairwise("quasi_triangle.d12", radius, [](LatticeSite u, LatticeSite v) {
        return d12(u + v) <= d(u) + d12(v) && d12(u + v) <= d12(u) + d(v);
    }));
    rep.checks.push_back(run_pairwise("quasi_triangle.d21", radius, [](LatticeSite u, LatticeSite v) {
        return d21(u + v) <= d(u) + d21(v) && d21(u + v) <= d21(u) + d(v);
    }));
    rep.checks.push_back(run_pairwise("slack.d_le_d12_d21_plus_1", radius, [](LatticeSite u, LatticeSite v) {
        return d(u + v) <= d12(u) + d21(v) + 1 && d(u + v) <= d21(u) + d12(v) + 1;
    }));

    rep.all_pass = true;
    for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

}  // namespace hexscat
