#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "hexscat/lattice.hpp"

namespace hexscat {

// Gaussian integer, used as the exact coefficient type.
struct GaussInt {
    long long re = 0;
    long long im = 0;

    friend bool operator==(const GaussInt&, const GaussInt&) = default;
};

inline GaussInt operator+(GaussInt a, GaussInt b) { return {a.re + b.re, a.im + b.im}; }
inline GaussInt operator-(GaussInt a, GaussInt b) { return {a.re - b.re, a.im - b.im}; }
inline GaussInt operator*(GaussInt a, GaussInt b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline GaussInt conj(GaussInt a) { return {a.re, -a.im}; }
inline bool is_zero(GaussInt a) { return a.re == 0 && a.im == 0; }

// Trigonometric polynomial on T^2 with exact Gaussian-integer
// coefficients indexed by frequency in Z^2. Zero coefficients are not
// stored. Products are exact convolutions.
class TrigPoly {
  public:
    using CoeffMap = std::map<LatticeSite, GaussInt>;

    TrigPoly() = default;

    static TrigPoly one();
    // alpha(xi) = 1 + e^{i xi_1} + e^{i xi_2}
    static TrigPoly alpha();
    static TrigPoly conj_alpha();
    // r(xi) = |alpha(xi)|^2 = 3 + 2cos xi_1 + 2cos xi_2 + 2cos(xi_1 - xi_2)
    static TrigPoly r();

    GaussInt coeff(LatticeSite n) const;
    const CoeffMap& coeffs() const { return c_; }
    void set_coeff(LatticeSite n, GaussInt v);

    bool empty() const { return c_.empty(); }

    // conj(P) has coefficient conj(coeff(-n)) at n.
    TrigPoly conjugate() const;

    TrigPoly pow(int s) const;  // s >= 0, iterated multiplication

    // Max of the given distance over the support (-1 for the zero polynomial).
    int support_radius(DistKind kind) const;

    // Sum_n c_n exp(i(n1 z1 + n2 z2)) for a complex pair of angles.
    // Signals overflow if an exponent magnitude leaves the double range.
    std::complex<double> eval(std::complex<double> z1, std::complex<double> z2) const;
    std::complex<double> eval(double x1, double x2) const;

    friend TrigPoly operator*(const TrigPoly& p, const TrigPoly& q);
    friend TrigPoly operator+(const TrigPoly& p, const TrigPoly& q);

  private:
    CoeffMap c_;
};

struct SupportCheck {
    int s = 0;
    std::string poly;  // "r^s", "r^s*alpha", "r^s*conj_alpha"
    bool pass = false;
    int max_dist = -1;     // extremal distance actually attained on the support
    int bound = 0;         // the claimed bound (= s)
    std::string violation; // frequency outside the claimed set, if any
};

struct SupportReport {
    int smax = 0;
    std::vector<SupportCheck> checks;
    bool all_pass = false;
};

// For every s <= smax asserts that r^s is supported in {D <= s},
// r^s * alpha in {D12 <= s} and r^s * conj(alpha) in {D21 <= s},
// in exact integer arithmetic, and records the extremal frequencies.
SupportReport verify_support(int smax);

}  // namespace hexscat
