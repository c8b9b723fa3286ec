#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "hexscat/lattice.hpp"

namespace hexscat {

struct PotentialEntry {
    double q1 = 0.0;
    double q2 = 0.0;

    friend bool operator==(const PotentialEntry&, const PotentialEntry&) = default;
};

// Compactly supported potential, two real components per site, with the
// a-priori l^1 support radius M carried explicitly (the reconstruction
// takes M as an input, it is not inferred from the data).
class PotentialField {
  public:
    PotentialField() = default;
    explicit PotentialField(int m) : m_(m) {}

    int M() const { return m_; }
    const std::map<LatticeSite, PotentialEntry>& entries() const { return e_; }

    PotentialEntry at(LatticeSite n) const {
        auto it = e_.find(n);
        return it == e_.end() ? PotentialEntry{} : it->second;
    }

    // Throws if the site leaves the l^1 ball of radius M.
    void set(LatticeSite n, double q1, double q2);

    bool empty() const;

    double max_abs() const;

    friend bool operator==(const PotentialField&, const PotentialField&) = default;

  private:
    int m_ = 0;
    std::map<LatticeSite, PotentialEntry> e_;
};

// File format: {"M": int, "sites": [{"n1":..,"n2":..,"q1":..,"q2":..}, ...]}.
// Omitted sites are zero; duplicate sites and sites outside the ball are
// load errors, as are non-finite values.
PotentialField load_potential(const std::string& path);
PotentialField parse_potential(const std::string& json_text);
void save_potential(const PotentialField& q, const std::string& path);
std::string potential_to_json(const PotentialField& q);

// {n1 -> q_comp(n1, p)} over the stored sites of row n2 = p.
std::map<int, double> potential_row(const PotentialField& q, int p, int comp);

// Integer values uniform in [-3,3] on every site of the l^1 ball,
// deterministic in the seed.
PotentialField random_potential(int m, std::uint64_t seed);

// Keeps q1 on rows n2 > keep_q1_above and q2 on rows n2 > keep_q2_above.
PotentialField truncate_rows(const PotentialField& q, int keep_q1_above, int keep_q2_above);

// Two-component finitely supported lattice function.
struct LatticeField2 {
    using C = std::complex<double>;
    std::map<LatticeSite, std::pair<C, C>> v;

    std::pair<C, C> at(LatticeSite n) const {
        auto it = v.find(n);
        return it == v.end() ? std::pair<C, C>{0.0, 0.0} : it->second;
    }
};

// Action of the free Hamiltonian:
//   (H0 f)_1(m) = f2(m) + f2(m1-1, m2) + f2(m1, m2-1)
//   (H0 f)_2(m) = f1(m) + f1(m1+1, m2) + f1(m1, m2+1)
LatticeField2 apply_h0(const LatticeField2& f);

// Dispersion p(xi) = |alpha(xi)| = sqrt(3 + 2cos xi1 + 2cos xi2 + 2cos(xi1-xi2)).
double p_of(double xi1, double xi2);

// Gradient of p; undefined at the Dirac points (throws there).
std::pair<double, double> grad_p(double xi1, double xi2);

struct SpecialSets {
    // Zeros of p (the Dirac points): +-(2pi/3, -2pi/3).
    std::array<std::pair<double, double>, 2> dirac;
    // Zeros of grad p: (0,0) with p = 3 and three points with p = 1.
    std::array<std::pair<double, double>, 4> critical;
};

SpecialSets special_sets();

// The level set {p = 1}: xi1 = -pi or xi2 = -pi or xi2 = xi1 +- pi (mod 2pi).
bool on_level_one(double xi1, double xi2, double tol);

}  // namespace hexscat
