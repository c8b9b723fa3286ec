#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace hexscat {

// Vertex of the hexagonal lattice in its Z^2 encoding. The parity of
// n1+n2 selects the sublattice: even sites and odd sites each form a
// square lattice with basis (1,1), (-1,1).
struct LatticeSite {
    int n1 = 0;
    int n2 = 0;

    friend bool operator==(const LatticeSite&, const LatticeSite&) = default;
    friend auto operator<=>(const LatticeSite&, const LatticeSite&) = default;
};

inline LatticeSite operator+(LatticeSite a, LatticeSite b) { return {a.n1 + b.n1, a.n2 + b.n2}; }
inline LatticeSite operator-(LatticeSite a, LatticeSite b) { return {a.n1 - b.n1, a.n2 - b.n2}; }
inline LatticeSite operator-(LatticeSite a) { return {-a.n1, -a.n2}; }
inline LatticeSite operator*(int c, LatticeSite a) { return {c * a.n1, c * a.n2}; }

inline int l1_norm(LatticeSite n) { return (n.n1 < 0 ? -n.n1 : n.n1) + (n.n2 < 0 ? -n.n2 : n.n2); }

std::string to_string(LatticeSite n);

// The three combinatorial distances. D is the common diagonal one
// (d_11 = d_22); D12 and D21 are the off-diagonal quasi-metrics with
// D12(n) = D21(-n).
enum class DistKind { D, D12, D21 };

int dist(DistKind kind, LatticeSite n);

enum class Parity { even, odd };

struct HexCoords {
    Parity parity = Parity::even;
    int m1 = 0;
    int m2 = 0;

    friend bool operator==(const HexCoords&, const HexCoords&) = default;
};

// Bijection between each sublattice and Z^2:
//   even: n1 = m1 - m2, n2 = m1 + m2
//   odd:  n1 = m1 - m2, n2 = 1 + m1 + m2
HexCoords hex_coords(LatticeSite n);
LatticeSite site_from_hex(const HexCoords& h);

struct LemmaCheck {
    std::string name;
    bool pass = false;
    long long checked = 0;
    std::string counterexample;  // empty when pass
};

struct LatticeReport {
    int radius = 0;
    std::vector<LemmaCheck> checks;
    bool all_pass = false;
};

// Exhaustively checks, over all difference vectors u, v with components
// in [-radius, radius]:
//   - norm axioms for D (definiteness, symmetry, homogeneity, triangle),
//   - both quasi-triangle inequalities for D12 and D21,
//   - the +1-slack inequality D(u+v) <= D12(u) + D21(v) + 1 (both orders),
//   - the n2 lower bounds and the sandwich D-1 <= D12, D21 <= D,
//   - the reflection identity D12(n) = D21(-n).
LatticeReport verify_distance_lemmas(int radius);

}  // namespace hexscat
