#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "hexscat/scalar.hpp"

namespace hexscat {

// Working precision of the reconstruction pipeline. The layer stripping
// reads row p of the potential off kernel values whose dominant known
// part exceeds the row-p signal by a factor ~ N^{4(M-p)}; at desk scale
// (M = 2, N up to ~10^4) that is a dynamic range of ~60 decimal digits,
// so the kernel evaluations feeding the inversion are carried at 100
// digits.
using bigfloat = boost::multiprecision::cpp_bin_float_100;
using bigcomplex = boost::multiprecision::cpp_complex_100;

template <>
struct scalar_traits<bigfloat> {
    using real = bigfloat;
    using complex = bigcomplex;
    static bigfloat pi() {
        static const bigfloat v = 4 * atan(bigfloat(1));
        return v;
    }
    static bigfloat eps() { return std::numeric_limits<bigfloat>::epsilon(); }
};

inline double to_double(const bigfloat& x) { return static_cast<double>(x); }
inline std::complex<double> to_cdouble(const bigcomplex& z) {
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

}  // namespace hexscat
