#include "hexscat/trigpoly.hpp"

#include <cmath>
#include <stdexcept>

namespace hexscat {

TrigPoly TrigPoly::one() {
    TrigPoly p;
    p.c_[{0, 0}] = {1, 0};
    return p;
}

TrigPoly TrigPoly::alpha() {
    TrigPoly p;
    p.c_[{0, 0}] = {1, 0};
    p.c_[{1, 0}] = {1, 0};
    p.c_[{0, 1}] = {1, 0};
    return p;
}

TrigPoly TrigPoly::conj_alpha() { return alpha().conjugate(); }

TrigPoly TrigPoly::r() { return alpha() * conj_alpha(); }

GaussInt TrigPoly::coeff(LatticeSite n) const {
    auto it = c_.find(n);
    return it == c_.end() ? GaussInt{} : it->second;
}

void TrigPoly::set_coeff(LatticeSite n, GaussInt v) {
    if (is_zero(v))
        c_.erase(n);
    else
        c_[n] = v;
}

TrigPoly TrigPoly::conjugate() const {
    TrigPoly out;
    for (const auto& [n, v] : c_) out.c_[-n] = conj(v);
    return out;
}

TrigPoly operator*(const TrigPoly& p, const TrigPoly& q) {
    TrigPoly out;
    for (const auto& [n, a] : p.c_)
        for (const auto& [m, b] : q.c_) {
            const LatticeSite k = n + m;
            const GaussInt v = out.coeff(k) + a * b;
            out.set_coeff(k, v);
        }
    return out;
}

TrigPoly operator+(const TrigPoly& p, const TrigPoly& q) {
    TrigPoly out = p;
    for (const auto& [n, b] : q.c_) out.set_coeff(n, out.coeff(n) + b);
    return out;
}

TrigPoly TrigPoly::pow(int s) const {
    if (s < 0) throw std::invalid_argument("TrigPoly::pow: negative exponent");
    TrigPoly out = one();
    for (int i = 0; i < s; ++i) out = out * (*this);
    return out;
}

int TrigPoly::support_radius(DistKind kind) const {
    int m = -1;
    for (const auto& [n, v] : c_) m = std::max(m, dist(kind, n));
    return m;
}

std::complex<double> TrigPoly::eval(std::complex<double> z1, std::complex<double> z2) const {
    std::complex<double> sum = 0.0;
    for (const auto& [n, v] : c_) {
        const std::complex<double> w =
            std::complex<double>(0, 1) * (double(n.n1) * z1 + double(n.n2) * z2);
        if (std::abs(w.real()) > 700.0)
            throw std::overflow_error("TrigPoly::eval: exponent out of range at frequency " +
                                      to_string(n));
        sum += std::complex<double>(double(v.re), double(v.im)) * std::exp(w);
    }
    return sum;
}

std::complex<double> TrigPoly::eval(double x1, double x2) const {
    return eval(std::complex<double>(x1, 0.0), std::complex<double>(x2, 0.0));
}

SupportReport verify_support(int smax) {
    if (smax < 0) throw std::invalid_argument("verify_support: smax must be >= 0");
    SupportReport rep;
    rep.smax = smax;

    const TrigPoly a = TrigPoly::alpha();
    const TrigPoly ca = TrigPoly::conj_alpha();
    const TrigPoly r = TrigPoly::r();

    TrigPoly rs = TrigPoly::one();
    for (int s = 0; s <= smax; ++s) {
        if (s > 0) rs = rs * r;

        const struct {
            const TrigPoly poly;
            DistKind kind;
            const char* name;
        } rows[] = {
            {rs, DistKind::D, "r^s"},
            {rs * a, DistKind::D12, "r^s*alpha"},
            {rs * ca, DistKind::D21, "r^s*conj_alpha"},
        };
        for (const auto& row : rows) {
            SupportCheck chk;
            chk.s = s;
            chk.poly = row.name;
            chk.bound = s;
            chk.pass = true;
            chk.max_dist = row.poly.support_radius(row.kind);
            for (const auto& [n, v] : row.poly.coeffs()) {
                if (dist(row.kind, n) > s) {
                    chk.pass = false;
                    chk.violation = to_string(n);
                    break;
                }
            }
            rep.checks.push_back(std::move(chk));
        }
    }

    rep.all_pass = true;
    for (const auto& c : rep.checks) rep.all_pass = rep.all_pass && c.pass;
    return rep;
}

}  // namespace hexscat
