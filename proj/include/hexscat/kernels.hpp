#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "hexscat/continuation.hpp"
#include "hexscat/resolvent.hpp"
#include "hexscat/spectral.hpp"

namespace hexscat {

// Only the two diagonal kernel blocks exist; the reconstruction never
// uses the off-diagonal ones.
enum class Block { b11 = 11, b22 = 22 };

template <class R>
struct Eta0 {
    using C = complex_t<R>;
    // entries (1,1) and (2,2) are exactly 1
    C off12{};  // alpha(zeta_-(z, theta'))/sqrt(8 z^2 + 1)
    C off21{};  // conj-series counterpart
};

// Forward scattering kernels B0, B1, B = B0 - B1 of a fixed potential,
// continued to complex z: the outgoing angle theta rides the positive
// branch zeta_+(z, theta), the incoming theta' the negative branch
// zeta_-(z, theta'). With this assignment both e^{i n zeta_+} and
// e^{-i m zeta_-} grow like N^{2 n_2} along z = 1 + iN, so the top row
// of the potential dominates the kernels. Resolvent blocks are cached
// per z and phases per (z, theta); the caches are mutex-guarded so
// requests can run in parallel.
// Exact Born-kernel data of one (z, theta, theta') request: the kernel of
// the linear map q -> B0 is  P(n) (q1 + w12 q2)  on block 11 and
// P(n) (w21 q1 + q2) on block 22, with P(n) = e1^{n1} e2^{n2}.
template <class R>
struct BornWeights {
    using C = complex_t<R>;
    C e1{}, e2{};  // e^{i(zeta_{+,j} - zeta_{-,j})}
    C w12{}, w21{};
};

template <class R>
BornWeights<R> born_weights(const complex_t<R>& z, const ContinuedPhase<R>& out_ph,
                            const ContinuedPhase<R>& in_ph) {
    BornWeights<R> w;
    w.e1 = out_ph.e1() * in_ph.e1_inv();
    w.e2 = out_ph.e2() * in_ph.e2_inv();
    w.w12 = amp_ratio<R>(out_ph, z, AlphaKind::alpha) * amp_ratio<R>(in_ph, z, AlphaKind::conj_alpha);
    w.w21 = amp_ratio<R>(out_ph, z, AlphaKind::conj_alpha) * amp_ratio<R>(in_ph, z, AlphaKind::alpha);
    return w;
}

template <class R>
class ForwardMap {
  public:
    using C = complex_t<R>;

    explicit ForwardMap(PotentialField q, std::shared_ptr<const SeriesTable<R>> table = nullptr)
        : q_(std::move(q)), table_(std::move(table)) {}

    const PotentialField& potential() const { return q_; }

    Eta0<R> eta0(const C& z, double theta_prime) const {
        const ContinuedPhase<R> in_ph = negate_phase(phase_pos(z, theta_prime));
        return {amp_ratio<R>(in_ph, z, AlphaKind::alpha),
                amp_ratio<R>(in_ph, z, AlphaKind::conj_alpha)};
    }

    // Exact Born weights for one request; cached phases underneath.
    BornWeights<R> born(const C& z, double theta, double theta_prime) const {
        const ContinuedPhase<R> out_ph = phase_pos(z, theta);
        const ContinuedPhase<R> in_ph = negate_phase(phase_pos(z, theta_prime));
        return born_weights<R>(z, out_ph, in_ph);
    }

    C b0(const C& z, double theta, double theta_prime, Block blk) const {
        if (q_.empty()) return C(0);
        const BornWeights<R> w = born(z, theta, theta_prime);
        C sum(0);
        for (const auto& [n, v] : q_.entries()) {
            const C ph = gm::ipow(w.e1, n.n1) * gm::ipow(w.e2, n.n2);
            if (blk == Block::b11)
                sum += ph * (C(R(v.q1)) + w.w12 * R(v.q2));
            else
                sum += ph * (w.w21 * R(v.q1) + C(R(v.q2)));
        }
        return sum;
    }

    C b1(const C& z, double theta, double theta_prime, Block blk) const {
        if (q_.empty()) return C(0);
        const ContinuedPhase<R> out_ph = phase_pos(z, theta);
        const ContinuedPhase<R> in_ph = negate_phase(phase_pos(z, theta_prime));
        const C eta12 = amp_ratio<R>(in_ph, z, AlphaKind::alpha);
        const C eta21 = amp_ratio<R>(in_ph, z, AlphaKind::conj_alpha);
        const C ra_out = amp_ratio<R>(out_ph, z, AlphaKind::alpha);
        const C rca_out = amp_ratio<R>(out_ph, z, AlphaKind::conj_alpha);
        const auto blkptr = block(z);

        C sum(0);
        for (const auto& [n, vn] : q_.entries()) {
            // core(n) = sum_m e^{-i m zeta_-} <P(n)|R|P(m)> qhat(m) eta0
            C core11(0), core12(0), core21(0), core22(0);
            for (const auto& [m, vm] : q_.entries()) {
                const C phm = gm::ipow(in_ph.e1_inv(), m.n1) * gm::ipow(in_ph.e2_inv(), m.n2);
                const Mat2<R> x = blkptr->block(n, m);
                const C a = phm * R(vm.q1);  // weight of column built from q1(m)
                const C b = phm * R(vm.q2);
                // qhat(m) eta0 = [[q1, q1*eta12], [q2*eta21, q2]]
                core11 += x.m11 * a + x.m12 * b * eta21;
                core12 += x.m11 * a * eta12 + x.m12 * b;
                core21 += x.m21 * a + x.m22 * b * eta21;
                core22 += x.m21 * a * eta12 + x.m22 * b;
            }
            const C phn = gm::ipow(out_ph.e1(), n.n1) * gm::ipow(out_ph.e2(), n.n2);
            if (blk == Block::b11)
                sum += phn * (R(vn.q1) * core11 + ra_out * R(vn.q2) * core21);
            else
                sum += phn * (rca_out * R(vn.q1) * core12 + R(vn.q2) * core22);
        }
        return sum;
    }

    C b_total(const C& z, double theta, double theta_prime, Block blk) const {
        return b0(z, theta, theta_prime, blk) - b1(z, theta, theta_prime, blk);
    }

    std::shared_ptr<const ResolventBlock<R>> block(const C& z) const {
        const auto key = zkey(z);
        std::lock_guard<std::mutex> lock(mu_);
        auto it = blocks_.find(key);
        if (it != blocks_.end()) return it->second;
        auto ptr = std::make_shared<const ResolventBlock<R>>(
            resolvent_block<R>(q_, z, {}, table_.get()));
        blocks_.emplace(key, ptr);
        return ptr;
    }

  private:
    static std::pair<double, double> zkey(const C& z) {
        return {static_cast<double>(gm::re(z)), static_cast<double>(gm::im(z))};
    }

    ContinuedPhase<R> phase_pos(const C& z, double theta) const {
        const std::tuple<double, double, double> key{static_cast<double>(gm::re(z)),
                                                     static_cast<double>(gm::im(z)), theta};
        std::lock_guard<std::mutex> lock(mu_);
        auto it = phases_.find(key);
        if (it != phases_.end()) return it->second;
        const auto tc = theta_constants<R>(R(theta));
        const ContinuedPhase<R> ph = zeta<R>(z, tc, Branch::positive);
        phases_.emplace(key, ph);
        return ph;
    }

    PotentialField q_;
    std::shared_ptr<const SeriesTable<R>> table_;
    mutable std::mutex mu_;
    mutable std::map<std::pair<double, double>, std::shared_ptr<const ResolventBlock<R>>> blocks_;
    mutable std::map<std::tuple<double, double, double>, ContinuedPhase<R>> phases_;
};

enum class StagePhase { q2_stage, q1_stage };

// The part of B(z, theta, theta') determined by the rows already
// recovered at stage p: exactly the forward kernel of the truncated
// potential q_(>p,>p) (q2 stage, block 22) or q_(>p,>p-1) (q1 stage,
// block 11). Covers both the Born partial sums over recovered rows and
// the truncated-resolvent contributions, including the row-p q2 pieces
// of the q1 stage.
template <class R>
complex_t<R> known_terms(int p, StagePhase phase, const PotentialField& recovered,
                         const complex_t<R>& z, double theta, double theta_prime,
                         std::shared_ptr<const SeriesTable<R>> table = nullptr) {
    const TruncationSpec t =
        phase == StagePhase::q2_stage ? TruncationSpec{p, p} : TruncationSpec{p, p - 1};
    ForwardMap<R> fwd(truncate_rows(recovered, t.keep_q1_above, t.keep_q2_above), std::move(table));
    const Block blk = phase == StagePhase::q2_stage ? Block::b22 : Block::b11;
    return fwd.b_total(z, theta, theta_prime, blk);
}

}  // namespace hexscat
