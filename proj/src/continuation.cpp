#include "hexscat/continuation.hpp"

#include <cmath>
#include <numbers>

namespace hexscat {

AsymptoticPrediction asymptotic_prediction(double n_large, double theta, Branch branch) {
    if (n_large < 10) throw std::domain_error("asymptotic_prediction: N must be >= 10");
    const auto tc = theta_constants<double>(theta);
    AsymptoticPrediction p;
    p.re_zeta1_mod_2pi = 0.0;
    p.re_zeta2_mod_2pi = std::numbers::pi;
    const double im1 = std::log(tc.b1);                            // 2 log(b + sqrt(b^2+1))
    const double im2 = 2.0 * std::log(n_large) + std::log(tc.a1);  // 2 log N + log(4 a^2)
    // On the positive branch the bounded component has Im > 0 and the
    // growing one Im < 0; the negative branch is the mirror image.
    const double sgn = branch == Branch::positive ? 1.0 : -1.0;
    p.im_zeta1 = sgn * im1;
    p.im_zeta2 = -sgn * im2;
    return p;
}

}  // namespace hexscat
