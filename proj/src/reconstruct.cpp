#include "hexscat/reconstruct.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

namespace hexscat {

std::vector<double> theta_grid(int count, double t_min, double t_max) {
    if (count < 1) throw std::invalid_argument("theta_grid: count must be >= 1");
    if (!(t_min > 1.0) || !(t_max > t_min))
        throw std::invalid_argument("theta_grid: need 1 < t_min < t_max");
    std::vector<double> thetas;
    thetas.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double f = count == 1 ? 0.0 : double(i) / (count - 1);
        const double t = t_min * std::pow(t_max / t_min, f);
        const double b1 = std::sqrt(t);
        // invert b1 = e^{2 theta}/(2 - e^{2 theta})
        const double theta = 0.5 * std::log(2.0 * b1 / (1.0 + b1));
        thetas.push_back(theta);
    }
    return thetas;
}

namespace {

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HEXSCAT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

// Runs tasks [0, count) on up to `threads` workers with a strided
// assignment; results must be written to preallocated slots so the
// combination order stays deterministic.
template <class Fn>
void parallel_for(int count, int threads, Fn&& fn) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t]() {
            for (int i = t; i < count; i += threads) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

int ball_width(int m, int p) { return m - std::abs(p); }

}  // namespace

std::shared_ptr<const SeriesTable<bigfloat>> make_reconstruction_table(
    const ReconstructionParams& params) {
    std::vector<LatticeSite> sites;
    for (int n2 = -params.M; n2 <= params.M; ++n2)
        for (int n1 = -(params.M - std::abs(n2)); n1 <= params.M - std::abs(n2); ++n1)
            sites.push_back({n1, n2});
    const double abs_z_min = std::hypot(1.0, params.n_base);
    const int order = suggest_table_order<bigfloat>(abs_z_min, sites);
    return std::make_shared<const SeriesTable<bigfloat>>(order);
}

BOracle make_forward_oracle(const PotentialField& truth,
                            std::shared_ptr<const SeriesTable<bigfloat>> table) {
    auto fwd = std::make_shared<ForwardMap<bigfloat>>(truth, std::move(table));
    return [fwd](const bigcomplex& z, double theta, double theta_prime, Block blk) {
        return fwd->b_total(z, theta, theta_prime, blk);
    };
}

void recover_row(int p, int comp, ReconstructionState& state, const BOracle& oracle,
                 const ReconstructionParams& params,
                 std::shared_ptr<const SeriesTable<bigfloat>> table) {
    if (comp != 1 && comp != 2) throw std::invalid_argument("recover_row: comp must be 1 or 2");
    if (std::abs(p) > params.M) throw std::invalid_argument("recover_row: row outside the ball");
    if (params.levels < params.richardson_order + 1)
        throw std::invalid_argument("recover_row: levels must exceed the Richardson order");
    // induction prerequisites: all rows above p, plus q2 of row p for comp 1
    for (int r = p + 1; r <= params.M; ++r)
        for (int c : {2, 1})
            if (!state.done.count({r, c}))
                throw StageOrderError("recover_row: row " + std::to_string(r) +
                                      " not recovered before row " + std::to_string(p));
    if (comp == 1 && !state.done.count({p, 2}))
        throw StageOrderError("recover_row: q2 of row " + std::to_string(p) +
                              " must precede q1");

    const int width = ball_width(params.M, p);
    const auto thetas = theta_grid(params.num_thetas, params.t_min, params.t_max);
    const int nn = params.levels;
    const int nth = int(thetas.size());

    const Block blk = comp == 2 ? Block::b22 : Block::b11;
    const TruncationSpec trunc = comp == 2 ? TruncationSpec{p, p} : TruncationSpec{p, p - 1};
    ForwardMap<bigfloat> knowns(truncate_rows(state.field, trunc.keep_q1_above,
                                              trunc.keep_q2_above),
                                table);

    // normalized remainders val[i*nn + k] = D(N_k; theta_i) / (N^{4p} a1^{2p})
    std::vector<bigcomplex> vals(size_t(nth) * nn);
    const int threads = resolve_threads(params.threads);
    parallel_for(nth * nn, threads, [&](int idx) {
        const int i = idx / nn;
        const int k = idx % nn;
        const double nval = params.n_base * std::pow(2.0, k);
        const bigcomplex z(bigfloat(1), bigfloat(nval));
        const double th = thetas[i];
        const bigcomplex d = oracle(z, th, th, blk) - knowns.b_total(z, th, th, blk);
        const auto tc = theta_constants<bigfloat>(bigfloat(th));
        const bigfloat scale = gm::ipow(bigfloat(nval), 4LL * p) * gm::ipow(tc.a1, 2LL * p);
        vals[idx] = d / scale;
    });

    std::vector<bigcomplex> limits(nth);
    double rich_ind = 0.0;
    for (int i = 0; i < nth; ++i) {
        std::vector<std::pair<double, bigcomplex>> samples;
        samples.reserve(nn);
        for (int k = 0; k < nn; ++k)
            samples.emplace_back(params.n_base * std::pow(2.0, k), vals[size_t(i) * nn + k]);
        double ind = 0.0;
        limits[i] = richardson_limit(samples, params.richardson_order, &ind);
        rich_ind = std::max(rich_ind, ind);
    }

    std::vector<bigfloat> tvals;
    tvals.reserve(nth);
    for (const double th : thetas) {
        const auto tc = theta_constants<bigfloat>(bigfloat(th));
        tvals.push_back(tc.b1 * tc.b1);  // t = b1(theta) b1(theta'), theta' = theta
    }
    RowSolution sol = solve_row<bigfloat>(tvals, limits, width, params.cond_cap);

    // the extracted limits are sums of (b1 b1')^{-n1} q(n1, p): the solver's
    // coefficient of t^e is the value at n1 = -e
    for (int n1 = -width; n1 <= width; ++n1) {
        const LatticeSite site{n1, p};
        const PotentialEntry old = state.field.at(site);
        const double v = sol.values.at(-n1);
        if (comp == 2)
            state.field.set(site, old.q1, v);
        else
            state.field.set(site, v, old.q2);
    }
    state.done.insert({p, comp});

    RowDiag diag;
    diag.p = p;
    diag.comp = comp;
    diag.imag_residue = sol.imag_residue;
    diag.cond = sol.cond;
    diag.rich_indicator = rich_ind;
    diag.solve_residual = sol.residual;
    double scale_ref = 0.0;
    for (const auto& [n1, v] : sol.values) scale_ref = std::max(scale_ref, std::abs(v));
    if (sol.imag_residue > params.tolerance * std::max(1.0, scale_ref)) {
        diag.warning = true;
        diag.note = "imaginary residue above tolerance";
    }
    state.rows.push_back(diag);
}

namespace {

// One defect-correction sweep: solve the exact Born-kernel least-squares
// system  sum_s K(s; z, theta, blk) q(s) = data - B1(q_prev)  over the
// whole (N, theta, block) grid. The kernel columns carry no 1/N model
// error, so the only approximation is the B1 evaluation at the previous
// iterate; the update contracts like |q| / N per sweep. Columns are
// magnitude-scaled before the normal equations (their natural sizes are
// graded by N^{4 n2}).
struct PolishGrid {
    std::vector<double> thetas;
    std::vector<double> ns;
    std::vector<bigcomplex> data11, data22;  // oracle values, cached
};

void polish_sweep(PotentialField& q_cur, const PolishGrid& grid,
                  const std::shared_ptr<const SeriesTable<bigfloat>>& table, int threads,
                  double& update_out, double& imag_out) {
    const int nth = int(grid.thetas.size());
    const int nn = int(grid.ns.size());
    std::vector<LatticeSite> sites;
    const int m = q_cur.M();
    for (int n2 = m; n2 >= -m; --n2)
        for (int n1 = -(m - std::abs(n2)); n1 <= m - std::abs(n2); ++n1)
            sites.push_back({n1, n2});
    const int ncol = 2 * int(sites.size());
    const int nrow = 2 * nth * nn;

    ForwardMap<bigfloat> fwd(q_cur, table);
    DenseMatrix<bigcomplex> a(nrow, ncol);
    std::vector<bigcomplex> rhs(size_t(nrow), bigcomplex(0));

    std::mutex fill_mu;
    parallel_for(nth * nn, threads, [&](int t) {
        const int i = t / nn;
        const int k = t % nn;
        const bigcomplex z(bigfloat(1), bigfloat(grid.ns[size_t(k)]));
        const double th = grid.thetas[size_t(i)];
        const BornWeights<bigfloat> w = fwd.born(z, th, th);
        const bigcomplex r11 = grid.data11[size_t(t)] - fwd.b1(z, th, th, Block::b11);
        const bigcomplex r22 = grid.data22[size_t(t)] - fwd.b1(z, th, th, Block::b22);
        std::lock_guard<std::mutex> lock(fill_mu);
        for (int s = 0; s < int(sites.size()); ++s) {
            const bigcomplex ph =
                gm::ipow(w.e1, sites[size_t(s)].n1) * gm::ipow(w.e2, sites[size_t(s)].n2);
            a(2 * t, 2 * s) = ph;                // q1 column, block 11
            a(2 * t, 2 * s + 1) = ph * w.w12;    // q2 column, block 11
            a(2 * t + 1, 2 * s) = ph * w.w21;    // q1 column, block 22
            a(2 * t + 1, 2 * s + 1) = ph;        // q2 column, block 22
        }
        rhs[size_t(2 * t)] = r11;
        rhs[size_t(2 * t) + 1] = r22;
    });

    // column equilibration
    std::vector<bigfloat> scale(size_t(ncol), bigfloat(0));
    for (int j = 0; j < ncol; ++j) {
        for (int i = 0; i < nrow; ++i) scale[size_t(j)] = std::max(scale[size_t(j)], gm::mag(a(i, j)));
        if (scale[size_t(j)] == 0) scale[size_t(j)] = 1;
        for (int i = 0; i < nrow; ++i) a(i, j) = a(i, j) / scale[size_t(j)];
    }
    const auto coef = solve_least_squares(a, rhs);

    double update = 0.0, imag_res = 0.0;
    for (int s = 0; s < int(sites.size()); ++s) {
        const bigcomplex q1 = coef[size_t(2 * s)] / scale[size_t(2 * s)];
        const bigcomplex q2 = coef[size_t(2 * s) + 1] / scale[size_t(2 * s) + 1];
        const PotentialEntry old = q_cur.at(sites[size_t(s)]);
        const double v1 = static_cast<double>(gm::re(q1));
        const double v2 = static_cast<double>(gm::re(q2));
        imag_res = std::max({imag_res, static_cast<double>(gm::mag(gm::im(q1))),
                             static_cast<double>(gm::mag(gm::im(q2)))});
        update = std::max({update, std::abs(v1 - old.q1), std::abs(v2 - old.q2)});
        q_cur.set(sites[size_t(s)], v1, v2);
    }
    update_out = update;
    imag_out = imag_res;
}

}  // namespace

ReconstructionResult reconstruct(const BOracle& oracle, const ReconstructionParams& params) {
    if (params.num_thetas < 2 * params.M + 1)
        throw std::invalid_argument("reconstruct: need at least 2M+1 theta samples");
    ReconstructionState state;
    state.field = PotentialField(params.M);
    auto table = make_reconstruction_table(params);
    for (int p = params.M; p >= -params.M; --p) {
        for (const int comp : {2, 1}) {
            try {
                recover_row(p, comp, state, oracle, params, table);
            } catch (const SingularSystemError& e) {
                // amplified extrapolation tails from the rows above can blow
                // up a lower-row stage; keep the partial state, record the
                // failure, and leave the row to the polish sweeps
                RowDiag diag;
                diag.p = p;
                diag.comp = comp;
                diag.warning = true;
                diag.note = std::string("stage failed: ") + e.what();
                state.rows.push_back(diag);
                state.done.insert({p, comp});
            }
        }
    }

    ReconstructionResult res;
    res.rows = state.rows;

    // defect-correction sweeps on the exact Born kernels (from scratch: the
    // stripping pass above recovers the top rows well, but its lower rows
    // carry N^4-amplified extrapolation tails and make a poor starting
    // point; zero is inside the contraction region regardless)
    if (params.polish_iterations > 0) {
        const int threads = resolve_threads(params.threads);
        PolishGrid grid;
        grid.thetas = theta_grid(params.num_thetas, params.t_min, params.t_max);
        for (int k = 0; k < params.levels; ++k)
            grid.ns.push_back(params.n_base * std::pow(2.0, k));
        const int npts = int(grid.thetas.size()) * int(grid.ns.size());
        grid.data11.resize(size_t(npts));
        grid.data22.resize(size_t(npts));
        parallel_for(npts, threads, [&](int t) {
            const int i = t / int(grid.ns.size());
            const int k = t % int(grid.ns.size());
            const bigcomplex z(bigfloat(1), bigfloat(grid.ns[size_t(k)]));
            grid.data11[size_t(t)] = oracle(z, grid.thetas[size_t(i)], grid.thetas[size_t(i)],
                                            Block::b11);
            grid.data22[size_t(t)] = oracle(z, grid.thetas[size_t(i)], grid.thetas[size_t(i)],
                                            Block::b22);
        });

        PotentialField polished(params.M);
        for (int it = 0; it < params.polish_iterations; ++it) {
            double update = 0.0, imag_res = 0.0;
            polish_sweep(polished, grid, table, threads, update, imag_res);
            res.polish_sweeps = it + 1;
            res.polish_update = update;
            res.polish_imag_residue = imag_res;
            if (update < 1e-13) break;
        }
        res.field = polished;
        res.ok = res.polish_update <= params.tolerance &&
                 res.polish_imag_residue <= params.tolerance;
    } else {
        res.field = state.field;
        for (const auto& d : res.rows) res.ok = res.ok && !d.warning;
    }

    // forward consistency probe at the smallest node and first theta
    {
        const auto thetas = theta_grid(params.num_thetas, params.t_min, params.t_max);
        const bigcomplex z(bigfloat(1), bigfloat(params.n_base));
        ForwardMap<bigfloat> fwd(res.field, table);
        const bigcomplex got = fwd.b_total(z, thetas[0], thetas[0], Block::b22);
        const bigcomplex want = oracle(z, thetas[0], thetas[0], Block::b22);
        const double denom = static_cast<double>(gm::mag(want)) + 1.0;
        res.forward_residual = static_cast<double>(gm::mag(bigcomplex(got - want))) / denom;
    }
    return res;
}

}  // namespace hexscat
