#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace hexscat {

// Maps a real scalar type to its complex companion and basic constants.
// Specialized for double here and for the high-precision type in
// bigscalar.hpp.
template <class R>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    using real = double;
    using complex = std::complex<double>;
    static double pi() { return std::numbers::pi; }
    static double eps() { return std::numeric_limits<double>::epsilon(); }
};

template <class R>
using complex_t = typename scalar_traits<R>::complex;

// Unqualified-call helpers so the same numeric code works for
// std::complex<double> and for multiprecision complex types (found by ADL).
namespace gm {

template <class C> auto re(const C& z) { using std::real; return real(z); }
template <class C> auto im(const C& z) { using std::imag; return imag(z); }
template <class C> C cj(const C& z) { using std::conj; return conj(z); }
template <class T> auto mag(const T& z) { using std::abs; return abs(z); }
template <class T> T sqrt_(const T& z) { using std::sqrt; return sqrt(z); }
template <class T> T exp_(const T& z) { using std::exp; return exp(z); }
template <class T> T log_(const T& z) { using std::log; return log(z); }
template <class T> T sinh_(const T& z) { using std::sinh; return sinh(z); }
template <class T> T cosh_(const T& z) { using std::cosh; return cosh(z); }
template <class T> T sin_(const T& z) { using std::sin; return sin(z); }
template <class T> T cos_(const T& z) { using std::cos; return cos(z); }
template <class T> T atan2_(const T& y, const T& x) { using std::atan2; return atan2(y, x); }

// Integer power by repeated multiplication; negative exponents invert.
template <class C>
C ipow(C base, long long e) {
    if (e < 0) {
        base = C(1) / base;
        e = -e;
    }
    C out(1);
    while (e > 0) {
        if (e & 1) out = out * base;
        base = base * base;
        e >>= 1;
    }
    return out;
}

}  // namespace gm

}  // namespace hexscat
