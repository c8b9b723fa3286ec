#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hexscat/scalar.hpp"

namespace hexscat {

struct SingularSystemError : std::runtime_error {
    double cond_estimate;
    explicit SingularSystemError(const std::string& what, double cond)
        : std::runtime_error(what), cond_estimate(cond) {}
};

// Row-major dense square complex matrix with LU solves, sized for the
// finite-rank systems here (a few dozen unknowns).
template <class C>
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(int rows, int cols) : r_(rows), c_(cols), a_(size_t(rows) * cols, C(0)) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    C& operator()(int i, int j) { return a_[size_t(i) * c_ + j]; }
    const C& operator()(int i, int j) const { return a_[size_t(i) * c_ + j]; }

    static DenseMatrix identity(int n) {
        DenseMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = C(1);
        return m;
    }

    friend DenseMatrix operator*(const DenseMatrix& x, const DenseMatrix& y) {
        if (x.c_ != y.r_) throw std::invalid_argument("DenseMatrix: shape mismatch");
        DenseMatrix out(x.r_, y.c_);
        for (int i = 0; i < x.r_; ++i)
            for (int k = 0; k < x.c_; ++k) {
                const C v = x(i, k);
                for (int j = 0; j < y.c_; ++j) out(i, j) += v * y(k, j);
            }
        return out;
    }

    friend DenseMatrix operator-(const DenseMatrix& x, const DenseMatrix& y) {
        DenseMatrix out(x.r_, x.c_);
        for (size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] - y.a_[i];
        return out;
    }

    friend DenseMatrix operator+(const DenseMatrix& x, const DenseMatrix& y) {
        DenseMatrix out(x.r_, x.c_);
        for (size_t i = 0; i < x.a_.size(); ++i) out.a_[i] = x.a_[i] + y.a_[i];
        return out;
    }

    double inf_norm() const {
        double best = 0.0;
        for (int i = 0; i < r_; ++i) {
            double row = 0.0;
            for (int j = 0; j < c_; ++j) row += static_cast<double>(gm::mag((*this)(i, j)));
            best = std::max(best, row);
        }
        return best;
    }

  private:
    int r_ = 0, c_ = 0;
    std::vector<C> a_;
};

// LU factorization with partial pivoting.
template <class C>
class DenseLU {
  public:
    explicit DenseLU(DenseMatrix<C> a) : lu_(std::move(a)), piv_(lu_.rows()) {
        const int n = lu_.rows();
        if (lu_.cols() != n) throw std::invalid_argument("DenseLU: matrix not square");
        for (int i = 0; i < n; ++i) piv_[i] = i;
        for (int k = 0; k < n; ++k) {
            int p = k;
            auto best = gm::mag(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                auto m = gm::mag(lu_(i, k));
                if (m > best) {
                    best = m;
                    p = i;
                }
            }
            if (!(best > 0))
                throw SingularSystemError("DenseLU: exactly singular at column " + std::to_string(k),
                                          std::numeric_limits<double>::infinity());
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                std::swap(piv_[k], piv_[p]);
            }
            for (int i = k + 1; i < n; ++i) {
                lu_(i, k) = lu_(i, k) / lu_(k, k);
                const C f = lu_(i, k);
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    int size() const { return lu_.rows(); }

    // Solves A X = B (B has any number of columns).
    DenseMatrix<C> solve(const DenseMatrix<C>& b) const {
        const int n = size();
        if (b.rows() != n) throw std::invalid_argument("DenseLU::solve: shape mismatch");
        DenseMatrix<C> x(n, b.cols());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < b.cols(); ++j) x(i, j) = b(piv_[i], j);
        for (int k = 0; k < n; ++k)
            for (int i = k + 1; i < n; ++i) {
                const C f = lu_(i, k);
                for (int j = 0; j < b.cols(); ++j) x(i, j) -= f * x(k, j);
            }
        for (int k = n - 1; k >= 0; --k) {
            for (int j = 0; j < b.cols(); ++j) x(k, j) = x(k, j) / lu_(k, k);
            for (int i = 0; i < k; ++i) {
                const C f = lu_(i, k);
                for (int j = 0; j < b.cols(); ++j) x(i, j) -= f * x(k, j);
            }
        }
        return x;
    }

    DenseMatrix<C> inverse() const { return solve(DenseMatrix<C>::identity(size())); }

  private:
    DenseMatrix<C> lu_;
    std::vector<int> piv_;
};

// Infinity-norm condition number; forms the inverse, fine at these sizes.
template <class C>
double cond_inf(const DenseMatrix<C>& a) {
    DenseLU<C> lu(a);
    return a.inf_norm() * lu.inverse().inf_norm();
}

// Least squares via normal equations (well inside the working precision
// for the node counts and spreads used here). Returns the coefficient
// vector; reports the residual inf-norm and cond(A^H A) if requested.
template <class C>
std::vector<C> solve_least_squares(const DenseMatrix<C>& a, const std::vector<C>& rhs,
                                   double* residual_inf = nullptr, double* cond = nullptr) {
    const int m = a.rows(), n = a.cols();
    if (int(rhs.size()) != m) throw std::invalid_argument("solve_least_squares: shape mismatch");
    DenseMatrix<C> ata(n, n);
    DenseMatrix<C> atb(n, 1);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            C s(0);
            for (int k = 0; k < m; ++k) s += gm::cj(a(k, i)) * a(k, j);
            ata(i, j) = s;
        }
        C s(0);
        for (int k = 0; k < m; ++k) s += gm::cj(a(k, i)) * rhs[k];
        atb(i, 0) = s;
    }
    if (cond) *cond = cond_inf(ata);
    DenseLU<C> lu(ata);
    DenseMatrix<C> x = lu.solve(atb);
    std::vector<C> out(n);
    for (int i = 0; i < n; ++i) out[i] = x(i, 0);
    if (residual_inf) {
        double r = 0.0;
        for (int k = 0; k < m; ++k) {
            C s = -rhs[k];
            for (int j = 0; j < n; ++j) s += a(k, j) * out[j];
            r = std::max(r, static_cast<double>(gm::mag(s)));
        }
        *residual_inf = r;
    }
    return out;
}

}  // namespace hexscat
