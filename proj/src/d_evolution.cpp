#include <cmath>
#include <stdexcept>

#include "khs/hybrid.hpp"

// Time derivative of the hybrid density in terms of the wavefunction. The
// expression has seven groups of near-cancelling terms; each is evaluated
// separately and exposed for residual attribution. Analytic objects (the
// gauge potential, Hamiltonian entries and their first two derivatives) are
// never differentiated spectrally; spectral derivatives act only on grid
// fields, which must decay at the boundary.

namespace khs {

namespace {

struct NodeAnalytic {
    // scalar Hamiltonian pieces sampled on nodes
    std::vector<double> h0v, h0q, h0p, h0qq, h0qp, h0pp;
    struct CouplingData {
        std::vector<double> v, vq, vp, vqq, vqp, vpp;
        QMat mat;
    };
    std::vector<CouplingData> cpl;
    // JA and its Jacobian
    std::vector<double> jaq, jap, djaq_dq, djaq_dp, djap_dq, djap_dp;
};

NodeAnalytic sample_analytic(const HybridHamiltonian& h, const GaugePotential& g,
                             const PhaseSpaceGrid& grid) {
    if (!h.h0.hessian)
        throw std::invalid_argument("d_evolution_rhs: scalar Hamiltonian needs a hessian");
    for (const auto& c : h.couplings)
        if (!c.v.hessian)
            throw std::invalid_argument("d_evolution_rhs: coupling terms need hessians");
    NodeAnalytic out;
    const std::size_t sz = grid.size();
    auto alloc = [&](std::vector<double>& v) { v.resize(sz); };
    alloc(out.h0v); alloc(out.h0q); alloc(out.h0p);
    alloc(out.h0qq); alloc(out.h0qp); alloc(out.h0pp);
    alloc(out.jaq); alloc(out.jap);
    alloc(out.djaq_dq); alloc(out.djaq_dp); alloc(out.djap_dq); alloc(out.djap_dp);
    out.cpl.resize(h.couplings.size());
    for (std::size_t j = 0; j < out.cpl.size(); ++j) {
        auto& c = out.cpl[j];
        alloc(c.v); alloc(c.vq); alloc(c.vp); alloc(c.vqq); alloc(c.vqp); alloc(c.vpp);
        c.mat = h.couplings[j].mat;
    }
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int jj = 0; jj < grid.np; ++jj) {
            const double p = grid.p(jj);
            const std::size_t id = grid.idx(i, jj);
            out.h0v[id] = h.h0(q, p);
            const auto g0 = h.h0.grad(q, p);
            out.h0q[id] = g0[0];
            out.h0p[id] = g0[1];
            const auto hs = h.h0.hessian(q, p);
            out.h0qq[id] = hs[0];
            out.h0qp[id] = hs[1];
            out.h0pp[id] = hs[2];
            const auto ja = g.ja(q, p);
            out.jaq[id] = ja[0];
            out.jap[id] = ja[1];
            const auto jac = g.jac(q, p);
            // JA = (A_p, -A_q)
            out.djaq_dq[id] = jac[2];
            out.djaq_dp[id] = jac[3];
            out.djap_dq[id] = -jac[0];
            out.djap_dp[id] = -jac[1];
            for (std::size_t j = 0; j < out.cpl.size(); ++j) {
                const auto& src = h.couplings[j].v;
                auto& c = out.cpl[j];
                c.v[id] = src(q, p);
                const auto gv = src.grad(q, p);
                c.vq[id] = gv[0];
                c.vp[id] = gv[1];
                const auto hv = src.hessian(q, p);
                c.vqq[id] = hv[0];
                c.vqp[id] = hv[1];
                c.vpp[id] = hv[2];
            }
        }
    }
    return out;
}

}  // namespace

const char* DEvolutionResult::group_name(int i) {
    static const char* names[7] = {
        "commutator_and_brackets", "gauge_gradient_brackets", "divergence_commutator",
        "bracket_commutator",      "mixed_divergence",        "gradient_coupling",
        "nested_brackets"};
    return names[i];
}

DEvolutionResult d_evolution_rhs(const HybridField& y_in, const HybridHamiltonian& h,
                                 const GaugePotential& g, const SpectralWorkspace& ws,
                                 double hbar, bool dealias) {
    const auto& grid = ws.grid();
    const int n = y_in.n;
    const std::size_t sz = grid.size();

    HybridField y = y_in;
    if (dealias)
        for (auto& c : y.comp) ws.dealias_23(c);

    const NodeAnalytic an = sample_analytic(h, g, grid);

    // per-node accessors over the sampled analytic data
    auto Hval = [&](int a, int b, std::size_t id) -> cplx {
        cplx v = (a == b) ? cplx{an.h0v[id], 0.0} : cplx{0.0, 0.0};
        for (const auto& c : an.cpl) v += c.v[id] * c.mat.at(a, b);
        return v;
    };
    auto Hq = [&](int a, int b, std::size_t id) -> cplx {
        cplx v = (a == b) ? cplx{an.h0q[id], 0.0} : cplx{0.0, 0.0};
        for (const auto& c : an.cpl) v += c.vq[id] * c.mat.at(a, b);
        return v;
    };
    auto Hp = [&](int a, int b, std::size_t id) -> cplx {
        cplx v = (a == b) ? cplx{an.h0p[id], 0.0} : cplx{0.0, 0.0};
        for (const auto& c : an.cpl) v += c.vp[id] * c.mat.at(a, b);
        return v;
    };
    auto Hqq = [&](int a, int b, std::size_t id) -> cplx {
        cplx v = (a == b) ? cplx{an.h0qq[id], 0.0} : cplx{0.0, 0.0};
        for (const auto& c : an.cpl) v += c.vqq[id] * c.mat.at(a, b);
        return v;
    };
    auto Hqp = [&](int a, int b, std::size_t id) -> cplx {
        cplx v = (a == b) ? cplx{an.h0qp[id], 0.0} : cplx{0.0, 0.0};
        for (const auto& c : an.cpl) v += c.vqp[id] * c.mat.at(a, b);
        return v;
    };
    auto Hpp = [&](int a, int b, std::size_t id) -> cplx {
        cplx v = (a == b) ? cplx{an.h0pp[id], 0.0} : cplx{0.0, 0.0};
        for (const auto& c : an.cpl) v += c.vpp[id] * c.mat.at(a, b);
        return v;
    };
    // C = JA . grad(H) and its analytic derivatives
    auto Cval = [&](int a, int b, std::size_t id) -> cplx {
        return an.jaq[id] * Hq(a, b, id) + an.jap[id] * Hp(a, b, id);
    };
    auto Cq = [&](int a, int b, std::size_t id) -> cplx {
        return an.djaq_dq[id] * Hq(a, b, id) + an.jaq[id] * Hqq(a, b, id) +
               an.djap_dq[id] * Hp(a, b, id) + an.jap[id] * Hqp(a, b, id);
    };
    auto Cp = [&](int a, int b, std::size_t id) -> cplx {
        return an.djaq_dp[id] * Hq(a, b, id) + an.jaq[id] * Hqp(a, b, id) +
               an.djap_dp[id] * Hp(a, b, id) + an.jap[id] * Hpp(a, b, id);
    };

    // spectral data
    std::vector<ScalarField> yq(n), yp(n);
    for (int a = 0; a < n; ++a) {
        yq[a] = ScalarField(grid);
        yp[a] = ScalarField(grid);
        ws.deriv_both(y.comp[a], yq[a], yp[a]);
    }
    // a_ab = Y_a conj(Y_b) and gradients
    std::vector<ScalarField> aab(n * n), aq(n * n), ap(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int e = a * n + b;
            aab[e] = ScalarField(grid);
            for (std::size_t id = 0; id < sz; ++id)
                aab[e].v[id] = y.comp[a].v[id] * std::conj(y.comp[b].v[id]);
            if (dealias) ws.dealias_23(aab[e]);
            aq[e] = ScalarField(grid);
            ap[e] = ScalarField(grid);
            ws.deriv_both(aab[e], aq[e], ap[e]);
        }
    // full density and gradients
    const HybridDensityField dfield = hybrid_density(y, g, ws, hbar);
    std::vector<ScalarField> dq(n * n), dp(n * n);
    for (int e = 0; e < n * n; ++e) {
        dq[e] = ScalarField(grid);
        dp[e] = ScalarField(grid);
        ws.deriv_both(dfield.entry[e], dq[e], dp[e]);
    }
    // Br_ab = {Y_a, conj Y_b}
    std::vector<ScalarField> br(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const int e = a * n + b;
            br[e] = ScalarField(grid);
            for (std::size_t id = 0; id < sz; ++id)
                br[e].v[id] = yq[a].v[id] * std::conj(yp[b].v[id]) -
                              yp[a].v[id] * std::conj(yq[b].v[id]);
        }

    DEvolutionResult res;
    res.groups.assign(7, HybridDensityField(grid, n));
    const cplx iu{0.0, 1.0};

    // G1: -(i/hbar)[H,D] + {H,D} - {D,H}
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto& dst = res.groups[0].at(a, b).v;
            for (std::size_t id = 0; id < sz; ++id) {
                cplx comm{0.0, 0.0}, brk{0.0, 0.0};
                for (int c = 0; c < n; ++c) {
                    const int cb = c * n + b, ac = a * n + c;
                    comm += Hval(a, c, id) * dfield.entry[cb].v[id] -
                            dfield.entry[ac].v[id] * Hval(c, b, id);
                    brk += Hq(a, c, id) * dp[cb].v[id] - Hp(a, c, id) * dq[cb].v[id];
                    brk -= dq[ac].v[id] * Hp(c, b, id) - dp[ac].v[id] * Hq(c, b, id);
                }
                dst[id] = -(iu / hbar) * comm + brk;
            }
        }

    // G2: sum_i {(JA)_i a, d_iH} - {d_iH, (JA)_i a}
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto& dst = res.groups[1].at(a, b).v;
            for (std::size_t id = 0; id < sz; ++id) {
                cplx acc{0.0, 0.0};
                for (int c = 0; c < n; ++c) {
                    const int ac = a * n + c, cb = c * n + b;
                    // i = q component: X = jaq * a
                    {
                        const cplx Xq_ac = an.djaq_dq[id] * aab[ac].v[id] +
                                           an.jaq[id] * aq[ac].v[id];
                        const cplx Xp_ac = an.djaq_dp[id] * aab[ac].v[id] +
                                           an.jaq[id] * ap[ac].v[id];
                        const cplx Xq_cb = an.djaq_dq[id] * aab[cb].v[id] +
                                           an.jaq[id] * aq[cb].v[id];
                        const cplx Xp_cb = an.djaq_dp[id] * aab[cb].v[id] +
                                           an.jaq[id] * ap[cb].v[id];
                        acc += Xq_ac * Hqp(c, b, id) - Xp_ac * Hqq(c, b, id);
                        acc -= Hqq(a, c, id) * Xp_cb - Hqp(a, c, id) * Xq_cb;
                    }
                    // i = p component: X = jap * a
                    {
                        const cplx Xq_ac = an.djap_dq[id] * aab[ac].v[id] +
                                           an.jap[id] * aq[ac].v[id];
                        const cplx Xp_ac = an.djap_dp[id] * aab[ac].v[id] +
                                           an.jap[id] * ap[ac].v[id];
                        const cplx Xq_cb = an.djap_dq[id] * aab[cb].v[id] +
                                           an.jap[id] * aq[cb].v[id];
                        const cplx Xp_cb = an.djap_dp[id] * aab[cb].v[id] +
                                           an.jap[id] * ap[cb].v[id];
                        acc += Xq_ac * Hpp(c, b, id) - Xp_ac * Hqp(c, b, id);
                        acc -= Hqp(a, c, id) * Xp_cb - Hpp(a, c, id) * Xq_cb;
                    }
                }
                dst[id] = acc;
            }
        }

    // G3: (i/hbar) div [C, (JA)_i a]
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            VectorField w(grid);
            for (std::size_t id = 0; id < sz; ++id) {
                cplx cq{0.0, 0.0}, cp{0.0, 0.0};
                for (int c = 0; c < n; ++c) {
                    const int cb = c * n + b, ac = a * n + c;
                    cq += Cval(a, c, id) * (an.jaq[id] * aab[cb].v[id]) -
                          (an.jaq[id] * aab[ac].v[id]) * Cval(c, b, id);
                    cp += Cval(a, c, id) * (an.jap[id] * aab[cb].v[id]) -
                          (an.jap[id] * aab[ac].v[id]) * Cval(c, b, id);
                }
                w.q_comp.v[id] = cq;
                w.p_comp.v[id] = cp;
            }
            ScalarField div = ws.divergence(w);
            auto& dst = res.groups[2].at(a, b).v;
            for (std::size_t id = 0; id < sz; ++id) dst[id] = (iu / hbar) * div.v[id];
        }

    // G4: [C, {Y, Ydag}]
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto& dst = res.groups[3].at(a, b).v;
            for (std::size_t id = 0; id < sz; ++id) {
                cplx acc{0.0, 0.0};
                for (int c = 0; c < n; ++c) {
                    acc += Cval(a, c, id) * br[c * n + b].v[id] -
                           br[a * n + c].v[id] * Cval(c, b, id);
                }
                dst[id] = acc;
            }
        }

    // G5: div( {H_ac, JA conj(Y_b)} Y_c - {JA Y_a, H_cb} conj(Y_c) )
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            VectorField w(grid);
            for (std::size_t id = 0; id < sz; ++id) {
                cplx wq{0.0, 0.0}, wp{0.0, 0.0};
                for (int c = 0; c < n; ++c) {
                    const cplx ycv = y.comp[c].v[id];
                    const cplx ybc = std::conj(y.comp[b].v[id]);
                    const cplx yac = y.comp[a].v[id];
                    const cplx dq_yb = std::conj(yq[b].v[id]);
                    const cplx dp_yb = std::conj(yp[b].v[id]);
                    // {H_ac, jaq conj(Y_b)}: d((jaq) conjYb) via product rule
                    const cplx t1q =
                        Hq(a, c, id) * (an.djaq_dp[id] * ybc + an.jaq[id] * dp_yb) -
                        Hp(a, c, id) * (an.djaq_dq[id] * ybc + an.jaq[id] * dq_yb);
                    const cplx t1p =
                        Hq(a, c, id) * (an.djap_dp[id] * ybc + an.jap[id] * dp_yb) -
                        Hp(a, c, id) * (an.djap_dq[id] * ybc + an.jap[id] * dq_yb);
                    // {jaq Y_a, H_cb}
                    const cplx t2q =
                        (an.djaq_dq[id] * yac + an.jaq[id] * yq[a].v[id]) * Hp(c, b, id) -
                        (an.djaq_dp[id] * yac + an.jaq[id] * yp[a].v[id]) * Hq(c, b, id);
                    const cplx t2p =
                        (an.djap_dq[id] * yac + an.jap[id] * yq[a].v[id]) * Hp(c, b, id) -
                        (an.djap_dp[id] * yac + an.jap[id] * yp[a].v[id]) * Hq(c, b, id);
                    wq += t1q * ycv - t2q * std::conj(y.comp[c].v[id]);
                    wp += t1p * ycv - t2p * std::conj(y.comp[c].v[id]);
                }
                w.q_comp.v[id] = wq;
                w.p_comp.v[id] = wp;
            }
            ScalarField div = ws.divergence(w);
            res.groups[4].at(a, b).v = div.v;
        }

    // G6: Y_c {C_ac, conj Y_b} - {Y_a, C_cb} conj(Y_c)
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto& dst = res.groups[5].at(a, b).v;
            for (std::size_t id = 0; id < sz; ++id) {
                cplx acc{0.0, 0.0};
                for (int c = 0; c < n; ++c) {
                    const cplx br1 = Cq(a, c, id) * std::conj(yp[b].v[id]) -
                                     Cp(a, c, id) * std::conj(yq[b].v[id]);
                    const cplx br2 = yq[a].v[id] * Cp(c, b, id) - yp[a].v[id] * Cq(c, b, id);
                    acc += y.comp[c].v[id] * br1 - br2 * std::conj(y.comp[c].v[id]);
                }
                dst[id] = acc;
            }
        }

    // G7: -i hbar {Y_c, {H_ac, conj Y_b}} + i hbar {{Y_a, H_cb}, conj Y_c}
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            auto& out = res.groups[6].at(a, b);
            for (int c = 0; c < n; ++c) {
                // S = {H_ac, conj Y_b}
                ScalarField s(grid), t(grid);
                for (std::size_t id = 0; id < sz; ++id) {
                    s.v[id] = Hq(a, c, id) * std::conj(yp[b].v[id]) -
                              Hp(a, c, id) * std::conj(yq[b].v[id]);
                    t.v[id] = yq[a].v[id] * Hp(c, b, id) - yp[a].v[id] * Hq(c, b, id);
                }
                ScalarField sq(grid), sp(grid), tq(grid), tp(grid);
                ws.deriv_both(s, sq, sp);
                ws.deriv_both(t, tq, tp);
                for (std::size_t id = 0; id < sz; ++id) {
                    const cplx outer1 =
                        yq[c].v[id] * sp.v[id] - yp[c].v[id] * sq.v[id];
                    const cplx outer2 =
                        tq.v[id] * std::conj(yp[c].v[id]) - tp.v[id] * std::conj(yq[c].v[id]);
                    out.v[id] += cplx{0.0, -hbar} * outer1 + cplx{0.0, hbar} * outer2;
                }
            }
        }

    res.total = HybridDensityField(grid, n);
    for (int e = 0; e < n * n; ++e)
        for (std::size_t id = 0; id < sz; ++id) {
            cplx s{0.0, 0.0};
            for (int gi = 0; gi < 7; ++gi) s += res.groups[gi].entry[e].v[id];
            res.total.entry[e].v[id] = s;
        }
    return res;
}

}  // namespace khs
