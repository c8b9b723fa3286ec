#pragma once

#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hexscat/bigscalar.hpp"
#include "hexscat/kernels.hpp"
#include "hexscat/linalg.hpp"

namespace hexscat {

struct StageOrderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ReconstructionParams {
    int M = 2;
    double n_base = 1000.0;  // smallest node of z = 1 + iN
    int levels = 3;          // nodes n_base * 2^k, k = 0..levels-1
    int richardson_order = 2;
    int num_thetas = 9;      // theta = theta' samples, >= 2*M+1 distinct t values
    double t_min = 1.5;      // range of t = b1(theta) b1(theta')
    double t_max = 6.0;
    double tolerance = 1e-2;  // residual warning threshold
    double cond_cap = 1e12;
    // Defect-correction sweeps after the stripping pass: each sweep solves
    // the exact Born-kernel linear system against data corrected by the
    // full-solver B1 at the current iterate (contraction ~ |q| / n_base
    // per sweep). 0 disables the polish.
    int polish_iterations = 4;
    int threads = 0;  // 0: HEXSCAT_THREADS env or hardware concurrency
};

struct RowDiag {
    int p = 0;
    int comp = 0;
    double imag_residue = 0.0;     // max |Im| of the extracted row values
    double cond = 0.0;             // Vandermonde normal-equation condition
    double rich_indicator = 0.0;   // order-k vs order-(k-1) limit difference
    double solve_residual = 0.0;   // least-squares residual
    bool warning = false;
    std::string note;
};

struct ReconstructionResult {
    PotentialField field;
    std::vector<RowDiag> rows;
    bool ok = true;
    double forward_residual = 0.0;   // relative forward-map check at a probe point
    int polish_sweeps = 0;
    double polish_update = 0.0;      // last sweep's max value change
    double polish_imag_residue = 0.0;
};

// Kernel data supplied to the inversion: deterministic values of
// B(z, theta, theta') carried at the working precision of the pipeline
// (the inversion digs the low rows out from under contributions larger
// by ~N^{4(M-p)}, so double-precision data cannot feed it at M >= 1).
using BOracle =
    std::function<bigcomplex(const bigcomplex& z, double theta, double theta_prime, Block)>;

// Limit c0 of value(N) = c0 + c1/N + ... + c_order/N^order from samples
// at >= order+1 nodes; exact polynomial elimination at order+1 nodes,
// least squares beyond. indicator: |c0(order) - c0(order-1)|.
template <class C2>
C2 richardson_limit(const std::vector<std::pair<double, C2>>& samples, int order,
                    double* indicator = nullptr) {
    const int m = int(samples.size());
    if (m < order + 1)
        throw std::invalid_argument("richardson_limit: need at least order+1 samples");
    auto fit = [&](int ord) {
        DenseMatrix<C2> a(m, ord + 1);
        std::vector<C2> rhs(m);
        for (int i = 0; i < m; ++i) {
            const double x = 1.0 / samples[i].first;
            C2 p(1);
            for (int j = 0; j <= ord; ++j) {
                a(i, j) = p;
                p = p * C2(x);
            }
            rhs[i] = samples[i].second;
        }
        return solve_least_squares(a, rhs)[0];
    };
    const C2 c0 = fit(order);
    if (indicator) {
        if (order == 0) {
            *indicator = 0.0;
        } else {
            const C2 c0lo = fit(order - 1);
            *indicator = static_cast<double>(gm::mag(C2(c0 - c0lo)));
        }
    }
    return c0;
}

struct RowSolution {
    std::map<int, double> values;  // n1 -> extracted real value
    double imag_residue = 0.0;
    double cond = 0.0;
    double residual = 0.0;
};

// Solves sums_i = Sum_{|n1| <= width} t_i^{n1} c_{n1} for the row values:
// multiplying through by t^width turns the Laurent system into an
// ordinary Vandermonde least-squares problem.
template <class R>
RowSolution solve_row(const std::vector<R>& tvals, const std::vector<complex_t<R>>& sums,
                      int width, double cond_cap = 1e12) {
    using C = complex_t<R>;
    const int m = int(tvals.size());
    const int ncol = 2 * width + 1;
    if (int(sums.size()) != m) throw std::invalid_argument("solve_row: size mismatch");
    if (m < ncol) throw std::invalid_argument("solve_row: need at least 2*width+1 samples");
    for (int i = 0; i < m; ++i) {
        if (!(tvals[i] > 0)) throw std::invalid_argument("solve_row: t values must be positive");
        for (int j = 0; j < i; ++j)
            if (tvals[i] == tvals[j]) throw std::invalid_argument("solve_row: t values must be distinct");
    }
    DenseMatrix<C> a(m, ncol);
    std::vector<C> rhs(m);
    for (int i = 0; i < m; ++i) {
        const R tw = gm::ipow(tvals[i], width);
        R p(1);
        for (int j = 0; j < ncol; ++j) {
            a(i, j) = C(p);
            p = p * tvals[i];
        }
        rhs[i] = sums[i] * tw;
    }
    RowSolution sol;
    const auto coef = solve_least_squares(a, rhs, &sol.residual, &sol.cond);
    if (sol.cond > cond_cap)
        throw ConditioningError("solve_row: Vandermonde condition " + std::to_string(sol.cond) +
                                " exceeds cap");
    for (int j = 0; j < ncol; ++j) {
        sol.values[j - width] = static_cast<double>(gm::re(coef[j]));
        sol.imag_residue =
            std::max(sol.imag_residue, static_cast<double>(gm::mag(gm::im(coef[j]))));
    }
    return sol;
}

// theta = theta' grid, log-uniform in t = b1(theta)^2 over [t_min, t_max].
std::vector<double> theta_grid(int count, double t_min, double t_max);

struct ReconstructionState {
    PotentialField field;
    std::set<std::pair<int, int>> done;  // (row, comp)
    std::vector<RowDiag> rows;
};

// One induction stage: extracts component `comp` (2 then 1) of row p from
// the oracle minus the known terms of the already recovered rows, by
// Richardson extrapolation of D(N) / (N^{4p} (a1 a1')^p) and the row
// Vandermonde solve over t = b1(theta) b1(theta').
void recover_row(int p, int comp, ReconstructionState& state, const BOracle& oracle,
                 const ReconstructionParams& params,
                 std::shared_ptr<const SeriesTable<bigfloat>> table = nullptr);

// Full layer stripping, rows p = M down to -M, component 2 then 1.
ReconstructionResult reconstruct(const BOracle& oracle, const ReconstructionParams& params);

// Oracle backed by the forward map of a known potential (the round-trip
// test harness; shares one kernel evaluator across all calls).
BOracle make_forward_oracle(const PotentialField& truth,
                            std::shared_ptr<const SeriesTable<bigfloat>> table = nullptr);

// Table sized for every evaluation the reconstruction will perform.
std::shared_ptr<const SeriesTable<bigfloat>> make_reconstruction_table(
    const ReconstructionParams& params);

}  // namespace hexscat
