#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>

#include "hexscat/continuation.hpp"
#include "hexscat/kernels.hpp"
#include "hexscat/lattice.hpp"
#include "hexscat/reconstruct.hpp"
#include "hexscat/resolvent.hpp"
#include "hexscat/spectral.hpp"
#include "hexscat/trigpoly.hpp"

namespace {

using namespace hexscat;
using C = std::complex<double>;

std::string fmt_c(C z) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "%.15g%+.15gi", z.real(), z.imag());
    return buf;
}

int cmd_verify_lattice(int radius) {
    const LatticeReport rep = verify_distance_lemmas(radius);
    std::printf("distance lemmas, radius %d\n", radius);
    for (const auto& c : rep.checks) {
        std::printf("  %-28s %s  (%lld checks)%s%s\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.checked, c.pass ? "" : "  counterexample ",
                    c.counterexample.c_str());
    }
    std::printf("%s\n", rep.all_pass ? "all lemmas hold" : "VIOLATIONS FOUND");
    return rep.all_pass ? 0 : 1;
}

int cmd_verify_support(int smax) {
    const SupportReport rep = verify_support(smax);
    std::printf("Fourier support lemmas up to s = %d\n", smax);
    for (const auto& c : rep.checks) {
        std::printf("  s=%-2d %-16s %s  extremal dist %d (bound %d)%s%s\n", c.s, c.poly.c_str(),
                    c.pass ? "pass" : "FAIL", c.max_dist, c.bound,
                    c.pass ? "" : "  violation at ", c.violation.c_str());
    }
    std::printf("%s\n", rep.all_pass ? "all supports inside the claimed sets" : "VIOLATIONS FOUND");
    return rep.all_pass ? 0 : 1;
}

int cmd_r0(double zre, double zim, int n1, int n2, const std::string& method, int grid, int smax) {
    const C z(zre, zim);
    const LatticeSite n{n1, n2};
    Mat2<double> m;
    if (method == "series") {
        const int s = smax > 0 ? smax
                               : series_order_for(std::abs(z), dist(DistKind::D, n), 1e-14);
        m = r0_series<double>(z, n, std::max(s, dist(DistKind::D, n)));
    } else {
        m = grid > 0 ? r0_quad(z, n, grid) : r0_quad_auto(z, n);
    }
    std::printf("r0(z=%s, n=(%d,%d)) by %s\n", fmt_c(z).c_str(), n1, n2, method.c_str());
    std::printf("  [ %s   %s ]\n", fmt_c(m.m11).c_str(), fmt_c(m.m12).c_str());
    std::printf("  [ %s   %s ]\n", fmt_c(m.m21).c_str(), fmt_c(m.m22).c_str());
    return 0;
}

int cmd_zeta(double n_value, double theta, const std::string& branch) {
    const Branch br = branch == "neg" ? Branch::negative : Branch::positive;
    const auto tc = theta_constants<double>(theta);
    const auto ph = zeta<double>(C(1.0, n_value), tc, br);
    const auto pred = asymptotic_prediction(n_value, theta, br);
    const double two_pi = 2 * std::numbers::pi;
    auto wrap = [&](double x) {
        x = std::fmod(x, two_pi);
        if (x > std::numbers::pi) x -= two_pi;
        if (x <= -std::numbers::pi) x += two_pi;
        return x;
    };
    std::printf("zeta(1+%gi, theta=%g, %s branch)\n", n_value, theta, branch.c_str());
    std::printf("  zeta1 = %s\n", fmt_c({ph.zeta1.real(), ph.zeta1.imag()}).c_str());
    std::printf("  zeta2 = %s\n", fmt_c({ph.zeta2.real(), ph.zeta2.imag()}).c_str());
    std::printf("  predicted: Re zeta1 = %.15g (mod 2pi), Im zeta1 = %.15g\n",
                pred.re_zeta1_mod_2pi, pred.im_zeta1);
    std::printf("             Re zeta2 = %.15g (mod 2pi), Im zeta2 = %.15g\n",
                pred.re_zeta2_mod_2pi, pred.im_zeta2);
    std::printf("  deviation: %.3e %.3e %.3e %.3e\n",
                std::abs(wrap(ph.zeta1.real() - pred.re_zeta1_mod_2pi)),
                std::abs(ph.zeta1.imag() - pred.im_zeta1),
                std::abs(wrap(ph.zeta2.real() - pred.re_zeta2_mod_2pi)),
                std::abs(ph.zeta2.imag() - pred.im_zeta2));
    return 0;
}

int cmd_forward(const std::string& path, double zre, double zim, double theta, double theta_prime,
                int block) {
    const PotentialField q = load_potential(path);
    ForwardMap<double> fwd(q);
    const C z(zre, zim);
    const Block blk = block == 22 ? Block::b22 : Block::b11;
    const C b0 = fwd.b0(z, theta, theta_prime, blk);
    const C b1 = fwd.b1(z, theta, theta_prime, blk);
    std::printf("B0_%d  = %s\n", block, fmt_c(b0).c_str());
    std::printf("B1_%d  = %s\n", block, fmt_c(b1).c_str());
    std::printf("B_%d   = %s\n", block, fmt_c(b0 - b1).c_str());
    return 0;
}

int cmd_spectrum(int grid, const std::string& out) {
    if (grid < 16) throw std::invalid_argument("spectrum: grid must be >= 16");
    std::ofstream os(out);
    if (!os) throw std::runtime_error("cannot write " + out);
    os << "xi1,xi2,p,grad_norm\n";
    char buf[160];
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            const double x1 = -std::numbers::pi + 2 * std::numbers::pi * i / grid;
            const double x2 = -std::numbers::pi + 2 * std::numbers::pi * j / grid;
            const double p = p_of(x1, x2);
            double gnorm = -1.0;  // sentinel: gradient undefined at Dirac cells
            if (p >= 1e-12) {
                const auto [g1, g2] = grad_p(x1, x2);
                gnorm = std::hypot(g1, g2);
            }
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", x1, x2, p, gnorm);
            os << buf;
        }
    std::printf("wrote %dx%d dispersion samples to %s\n", grid, grid, out.c_str());
    return 0;
}

int cmd_gen_potential(int m, std::uint64_t seed, const std::string& out) {
    const PotentialField q = random_potential(m, seed);
    save_potential(q, out);
    std::printf("wrote random potential (M=%d, seed=%llu) to %s\n", m,
                static_cast<unsigned long long>(seed), out.c_str());
    return 0;
}

int cmd_reconstruct(const std::string& truth_path, int m_override, double n_base, int levels,
                    int thetas, int order, double tolerance, const std::string& out,
                    const std::string& report_path) {
    const PotentialField truth = load_potential(truth_path);
    ReconstructionParams params;
    params.M = m_override > 0 ? m_override : truth.M();
    params.n_base = n_base;
    params.levels = levels;
    params.num_thetas = thetas;
    params.richardson_order = order;
    params.tolerance = tolerance;

    auto table = make_reconstruction_table(params);
    const BOracle oracle = make_forward_oracle(truth, table);
    const ReconstructionResult res = reconstruct(oracle, params);

    double max_err = 0.0;
    for (int n2 = -params.M; n2 <= params.M; ++n2)
        for (int n1 = -(params.M - std::abs(n2)); n1 <= params.M - std::abs(n2); ++n1) {
            const auto got = res.field.at({n1, n2});
            const auto want = truth.at({n1, n2});
            max_err = std::max({max_err, std::abs(got.q1 - want.q1), std::abs(got.q2 - want.q2)});
        }

    if (!out.empty()) save_potential(res.field, out);
    if (!report_path.empty()) {
        nlohmann::ordered_json rep;
        rep["M"] = params.M;
        rep["n_base"] = params.n_base;
        rep["levels"] = params.levels;
        rep["richardson_order"] = params.richardson_order;
        rep["num_thetas"] = params.num_thetas;
        rep["max_abs_error"] = max_err;
        rep["forward_residual"] = res.forward_residual;
        rep["rows"] = nlohmann::ordered_json::array();
        for (const auto& d : res.rows) {
            nlohmann::ordered_json r;
            r["p"] = d.p;
            r["comp"] = d.comp;
            r["imag_residue"] = d.imag_residue;
            r["cond"] = d.cond;
            r["richardson_indicator"] = d.rich_indicator;
            r["solve_residual"] = d.solve_residual;
            r["warning"] = d.warning;
            if (!d.note.empty()) r["note"] = d.note;
            rep["rows"].push_back(std::move(r));
        }
        std::ofstream os(report_path);
        if (!os) throw std::runtime_error("cannot write " + report_path);
        os << rep.dump(2) << "\n";
    }
    std::printf("reconstructed %d rows; max abs error vs truth = %.3e, forward residual %.3e\n",
                2 * params.M + 1, max_err, res.forward_residual);
    return (res.ok && max_err <= tolerance) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hexscat: forward and inverse scattering for the hexagonal-lattice "
                 "discrete Schroedinger operator"};
    app.require_subcommand(1);

    auto* vl = app.add_subcommand("verify-lattice", "exhaustive distance-lemma checks");
    int radius = 12;
    vl->add_option("--radius", radius, "box half-width for difference vectors")
        ->capture_default_str();

    auto* vs = app.add_subcommand("verify-support", "exact Fourier-support lemma checks");
    int smax = 8;
    vs->add_option("--max-s", smax, "largest power of r")->capture_default_str();

    auto* r0 = app.add_subcommand("r0", "free-resolvent matrix element");
    double zre = 0.0, zim = 10.0;
    int n1 = 0, n2 = 0, grid = 0, r0_smax = 0;
    std::string method = "series";
    r0->add_option("--z-re", zre, "Re z")->capture_default_str();
    r0->add_option("--z-im", zim, "Im z")->capture_default_str();
    r0->add_option("--n1", n1, "site offset n1")->capture_default_str();
    r0->add_option("--n2", n2, "site offset n2")->capture_default_str();
    r0->add_option("--method", method, "quad or series")
        ->check(CLI::IsMember({"quad", "series"}))
        ->capture_default_str();
    r0->add_option("--grid", grid, "quadrature grid (0 = auto-double until stable)");
    r0->add_option("--smax", r0_smax, "series truncation (0 = from tolerance)");

    auto* zt = app.add_subcommand("zeta", "continued phases on the ray z = 1 + iN");
    double n_value = 1000.0, theta = 0.2;
    std::string branch = "pos";
    zt->add_option("--N", n_value, "imaginary part of z")->capture_default_str();
    zt->add_option("--theta", theta, "angle parameter in (0, log(2)/2)")->capture_default_str();
    zt->add_option("--branch", branch, "pos or neg")
        ->check(CLI::IsMember({"pos", "neg"}))
        ->capture_default_str();

    auto* fw = app.add_subcommand("forward", "kernels B0, B1, B of a potential");
    std::string fw_potential;
    double fw_zre = 1.0, fw_zim = 100.0, fw_theta = 0.2, fw_theta_prime = 0.25;
    int fw_block = 22;
    fw->add_option("--potential", fw_potential, "potential JSON file")->required();
    fw->add_option("--z-re", fw_zre, "Re z")->capture_default_str();
    fw->add_option("--z-im", fw_zim, "Im z")->capture_default_str();
    fw->add_option("--theta", fw_theta, "outgoing angle")->capture_default_str();
    fw->add_option("--theta-prime", fw_theta_prime, "incoming angle")->capture_default_str();
    fw->add_option("--block", fw_block, "11 or 22")
        ->check(CLI::IsMember({11, 22}))
        ->capture_default_str();

    auto* rc = app.add_subcommand("reconstruct", "layer-stripping round trip against a known "
                                                 "potential");
    std::string rc_potential, rc_out, rc_report;
    int rc_m = 0, rc_levels = 3, rc_thetas = 9, rc_order = 2;
    double rc_nbase = 1000.0, rc_tol = 1e-2;
    rc->add_option("--potential", rc_potential, "truth potential JSON file")->required();
    rc->add_option("--M", rc_m, "support radius (0 = from file)")->capture_default_str();
    rc->add_option("--n-base", rc_nbase, "smallest N of the node ladder")->capture_default_str();
    rc->add_option("--levels", rc_levels, "number of N nodes (n_base * 2^k)")
        ->capture_default_str();
    rc->add_option("--thetas", rc_thetas, "number of theta samples")->capture_default_str();
    rc->add_option("--order", rc_order, "Richardson order")->capture_default_str();
    rc->add_option("--tolerance", rc_tol, "acceptance threshold on max abs error")
        ->capture_default_str();
    rc->add_option("--out", rc_out, "write the recovered potential here");
    rc->add_option("--report", rc_report, "write per-row diagnostics here");

    auto* sp = app.add_subcommand("spectrum", "dispersion surface samples");
    int sp_grid = 64;
    std::string sp_out = "spectrum.csv";
    sp->add_option("--grid", sp_grid, "grid points per axis")->capture_default_str();
    sp->add_option("--out", sp_out, "output CSV")->capture_default_str();

    auto* gp = app.add_subcommand("gen-potential", "random integer potential on the l1 ball");
    int gp_m = 2;
    std::uint64_t gp_seed = 7;
    std::string gp_out = "potential.json";
    gp->add_option("--M", gp_m, "support radius")->capture_default_str();
    gp->add_option("--seed", gp_seed, "RNG seed")->capture_default_str();
    gp->add_option("--out", gp_out, "output JSON")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (vl->parsed()) return cmd_verify_lattice(radius);
        if (vs->parsed()) return cmd_verify_support(smax);
        if (r0->parsed()) return cmd_r0(zre, zim, n1, n2, method, grid, r0_smax);
        if (zt->parsed()) return cmd_zeta(n_value, theta, branch);
        if (fw->parsed())
            return cmd_forward(fw_potential, fw_zre, fw_zim, fw_theta, fw_theta_prime, fw_block);
        if (rc->parsed())
            return cmd_reconstruct(rc_potential, rc_m, rc_nbase, rc_levels, rc_thetas, rc_order,
                                   rc_tol, rc_out, rc_report);
        if (sp->parsed()) return cmd_spectrum(sp_grid, sp_out);
        if (gp->parsed()) return cmd_gen_potential(gp_m, gp_seed, gp_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
