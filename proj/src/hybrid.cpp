#include "khs/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "khs/exact.hpp"

namespace khs {

// ---- HybridField -----------------------------------------------------------

double HybridField::norm() const {
    double s = 0.0;
    for (const auto& c : comp) {
        const double nn = norm_l2(c);
        s += nn * nn;
    }
    return std::sqrt(s);
}

HybridField add_scaled(const HybridField& a, cplx s, const HybridField& b) {
    HybridField out = a;
    for (int k = 0; k < a.n; ++k) axpy(out.comp[k], s, b.comp[k]);
    return out;
}

double l2_distance(const HybridField& a, const HybridField& b) {
    double s = 0.0;
    for (int k = 0; k < a.n; ++k) {
        const ScalarField d = sub(a.comp[k], b.comp[k]);
        const double nn = norm_l2(d);
        s += nn * nn;
    }
    return std::sqrt(s);
}

void normalize(HybridField& y) {
    const double nn = y.norm();
    if (nn == 0.0) throw std::invalid_argument("normalize: zero field");
    for (auto& c : y.comp) scale(c, 1.0 / nn);
}

// ---- HybridHamiltonian -----------------------------------------------------

QMat HybridHamiltonian::value_at(double q, double p) const {
    QMat out = h0(q, p) * QMat::identity(n);
    for (const auto& c : couplings) out = out + c.v(q, p) * c.mat;
    return out;
}

QMat HybridHamiltonian::grad_q_at(double q, double p) const {
    QMat out = h0.grad(q, p)[0] * QMat::identity(n);
    for (const auto& c : couplings) out = out + c.v.grad(q, p)[0] * c.mat;
    return out;
}

QMat HybridHamiltonian::grad_p_at(double q, double p) const {
    QMat out = h0.grad(q, p)[1] * QMat::identity(n);
    for (const auto& c : couplings) out = out + c.v.grad(q, p)[1] * c.mat;
    return out;
}

HybridHamiltonian HybridHamiltonian::scalar(HamiltonianTerm h, int n) {
    HybridHamiltonian out;
    out.n = n;
    out.h0 = std::move(h);
    return out;
}

HybridHamiltonian HybridHamiltonian::with_couplings(HamiltonianTerm h,
                                                    std::vector<Coupling> cpl) {
    HybridHamiltonian out;
    out.h0 = std::move(h);
    out.couplings = std::move(cpl);
    out.n = out.couplings.empty() ? 1 : out.couplings.front().mat.n;
    for (const auto& c : out.couplings) {
        if (c.mat.n != out.n)
            throw std::invalid_argument("HybridHamiltonian: coupling dimension mismatch");
        if (c.mat.herm_deviation() > 1e-12)
            throw std::invalid_argument("HybridHamiltonian: coupling matrix is not Hermitian");
    }
    return out;
}

HybridHamiltonian HybridHamiltonian::spin_oscillator(double mass, double omega,
                                                     const std::array<double, 3>& alpha,
                                                     HamiltonianTerm coupling_v) {
    HybridHamiltonian out;
    out.n = 2;
    out.h0 = harmonic_term(mass, omega);
    const double lam = std::sqrt(alpha[0] * alpha[0] + alpha[1] * alpha[1] + alpha[2] * alpha[2]);
    if (lam > 0.0) {
        Coupling c;
        c.v = std::move(coupling_v);
        c.mat = alpha_dot_sigma(alpha);
        out.couplings.push_back(std::move(c));
        out.single_coupling_alpha = alpha;
    }
    return out;
}

// ---- HybridDensityField ----------------------------------------------------

double HybridDensityField::max_herm_deviation() const {
    double d = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const auto& ab = at(a, b).v;
            const auto& ba = at(b, a).v;
            for (std::size_t i = 0; i < ab.size(); ++i)
                d = std::max(d, std::abs(ab[i] - std::conj(ba[i])));
        }
    return d;
}

double HybridDensityField::min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    const std::size_t sz = entry.front().v.size();
    if (n == 1) {
        for (std::size_t i = 0; i < sz; ++i) lo = std::min(lo, entry[0].v[i].real());
        return lo;
    }
    if (n == 2) {
        for (std::size_t i = 0; i < sz; ++i) {
            const double tr = (at(0, 0).v[i] + at(1, 1).v[i]).real();
            const double det =
                (at(0, 0).v[i] * at(1, 1).v[i] - at(0, 1).v[i] * at(1, 0).v[i]).real();
            const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
            lo = std::min(lo, tr / 2.0 - disc);
        }
        return lo;
    }
    QMat m(n);
    for (std::size_t i = 0; i < sz; ++i) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) m.at(a, b) = at(a, b).v[i];
        for (double e : m.eigenvalues_hermitian()) lo = std::min(lo, e);
    }
    return lo;
}

ScalarField HybridDensityField::trace_field() const {
    ScalarField out(grid());
    for (int a = 0; a < n; ++a) axpy(out, 1.0, at(a, a));
    return out;
}

// ---- DensityMatrix ---------------------------------------------------------

double DensityMatrix::min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    for (double e : rho.eigenvalues_hermitian()) lo = std::min(lo, e);
    return lo;
}

double purity(const DensityMatrix& rho) { return (rho.rho * rho.rho).trace().real(); }

std::array<double, 3> bloch_vector(const DensityMatrix& rho) {
    if (rho.rho.n != 2)
        throw std::invalid_argument("bloch_vector: defined for two-level systems only");
    const cplx r12 = rho.rho.at(0, 1);
    return {2.0 * r12.real(), 2.0 * r12.imag(), (rho.rho.at(0, 0) - rho.rho.at(1, 1)).real()};
}

// ---- HybridOperator --------------------------------------------------------

HybridOperator::HybridOperator(const HybridHamiltonian& h, const GaugePotential& g,
                               const SpectralWorkspace& ws, double hbar)
    : ws_(ws), hbar_(hbar), n_(h.n) {
    const auto& grid = ws.grid();
    const std::size_t sz = grid.size();
    h0q_.resize(sz);
    h0p_.resize(sz);
    phi0_.resize(sz);
    cpl_.resize(h.couplings.size());
    for (std::size_t j = 0; j < cpl_.size(); ++j) {
        cpl_[j].vq.resize(sz);
        cpl_[j].vp.resize(sz);
        cpl_[j].phiv.resize(sz);
        cpl_[j].mat = h.couplings[j].mat;
        if (cpl_[j].mat.herm_deviation() > 1e-12)
            throw std::invalid_argument("HybridOperator: non-Hermitian coupling matrix");
    }
    double vmax = 0.0;
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int jj = 0; jj < grid.np; ++jj) {
            const double p = grid.p(jj);
            const std::size_t id = grid.idx(i, jj);
            const auto ja = g.ja(q, p);
            const auto g0 = h.h0.grad(q, p);
            h0q_[id] = g0[0];
            h0p_[id] = g0[1];
            phi0_[id] = h.h0(q, p) + g0[0] * ja[0] + g0[1] * ja[1];
            double vel = std::hypot(g0[1], g0[0]);
            for (std::size_t j = 0; j < cpl_.size(); ++j) {
                const auto gv = h.couplings[j].v.grad(q, p);
                cpl_[j].vq[id] = gv[0];
                cpl_[j].vp[id] = gv[1];
                cpl_[j].phiv[id] = h.couplings[j].v(q, p) + gv[0] * ja[0] + gv[1] * ja[1];
                vel += cpl_[j].mat.herm_norm() * std::hypot(gv[1], gv[0]);
            }
            vmax = std::max(vmax, vel);
        }
    }
    max_velocity_ = vmax;
}

template <bool AsRhs>
HybridField HybridOperator::apply_impl(const HybridField& y) const {
    if (y.n != n_) throw std::invalid_argument("HybridOperator: component count mismatch");
    require_same_grid(y.grid(), ws_.grid(), "HybridOperator");
    const std::size_t sz = ws_.grid().size();
    std::vector<ScalarField> yq(n_), yp(n_);
    for (int a = 0; a < n_; ++a) {
        yq[a] = ScalarField(y.grid());
        yp[a] = ScalarField(y.grid());
        ws_.deriv_both(y.comp[a], yq[a], yp[a]);
    }
    HybridField out(y.grid(), n_);
    const cplx ih{0.0, hbar_};
    const cplx mi_over_h{0.0, -1.0 / hbar_};
    for (int a = 0; a < n_; ++a) {
        auto& dst = out.comp[a].v;
        for (std::size_t id = 0; id < sz; ++id) {
            // scalar part
            cplx lv = ih * (h0q_[id] * yp[a].v[id] - h0p_[id] * yq[a].v[id]) +
                      phi0_[id] * y.comp[a].v[id];
            // couplings: L_{V_j} applied to (M_j Y)_a
            for (const auto& c : cpl_) {
                cplx mv{0.0, 0.0}, mq{0.0, 0.0}, mp{0.0, 0.0};
                for (int b = 0; b < n_; ++b) {
                    const cplx w = c.mat.at(a, b);
                    mv += w * y.comp[b].v[id];
                    mq += w * yq[b].v[id];
                    mp += w * yp[b].v[id];
                }
                lv += ih * (c.vq[id] * mp - c.vp[id] * mq) + c.phiv[id] * mv;
            }
            dst[id] = AsRhs ? mi_over_h * lv : lv;
        }
    }
    return out;
}

HybridField HybridOperator::apply(const HybridField& y) const { return apply_impl<false>(y); }
HybridField HybridOperator::rhs(const HybridField& y) const { return apply_impl<true>(y); }

HybridField apply_hybrid_liouvillian(const HybridHamiltonian& h, const GaugePotential& g,
                                     const SpectralWorkspace& ws, const HybridField& y,
                                     double hbar) {
    return HybridOperator(h, g, ws, hbar).apply(y);
}

double cfl_max_dt(const HybridOperator& op, double safety) {
    const auto& g = op.workspace().grid();
    return safety * std::min(g.dq, g.dp) / std::max(op.max_velocity(), 1e-300);
}

HybridField step_rk4_hybrid(const HybridOperator& op, const HybridField& y, double dt,
                            double cfl_safety) {
    if (dt == 0.0) return y;
    const double bound = cfl_max_dt(op, cfl_safety);
    if (std::abs(dt) > bound) {
        std::ostringstream os;
        os << "step_rk4_hybrid: dt=" << dt << " exceeds CFL bound " << bound;
        throw std::invalid_argument(os.str());
    }
    HybridField k1 = op.rhs(y);
    HybridField k2 = op.rhs(add_scaled(y, 0.5 * dt, k1));
    HybridField k3 = op.rhs(add_scaled(y, 0.5 * dt, k2));
    HybridField k4 = op.rhs(add_scaled(y, dt, k3));
    HybridField out = add_scaled(y, dt / 6.0, k1);
    out = add_scaled(out, dt / 3.0, k2);
    out = add_scaled(out, dt / 3.0, k3);
    out = add_scaled(out, dt / 6.0, k4);
    return out;
}

// ---- densities -------------------------------------------------------------

HybridDensityField hybrid_density(const HybridField& y, const GaugePotential& g,
                                  const SpectralWorkspace& ws, double hbar) {
    const auto& grid = y.grid();
    const int n = y.n;
    std::vector<ScalarField> yq(n), yp(n);
    for (int a = 0; a < n; ++a) {
        yq[a] = ScalarField(grid);
        yp[a] = ScalarField(grid);
        ws.deriv_both(y.comp[a], yq[a], yp[a]);
    }
    HybridDensityField out(grid, n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            ScalarField prod(grid);
            for (std::size_t i = 0; i < prod.v.size(); ++i)
                prod.v[i] = y.comp[a].v[i] * std::conj(y.comp[b].v[i]);
            ScalarField pq(grid), pp(grid);
            ws.deriv_both(prod, pq, pp);
            auto& dst = out.at(a, b).v;
            for (int i = 0; i < grid.nq; ++i) {
                const double q = grid.q(i);
                for (int j = 0; j < grid.np; ++j) {
                    const std::size_t id = grid.idx(i, j);
                    const auto ja = g.ja(q, grid.p(j));
                    const cplx br = yq[a].v[id] * std::conj(yp[b].v[id]) -
                                    yp[a].v[id] * std::conj(yq[b].v[id]);
                    // - div(JA prod) = prod - JA . grad(prod)
                    dst[id] = 2.0 * prod.v[id] - ja[0] * pq.v[id] - ja[1] * pp.v[id] +
                              cplx{0.0, hbar} * br;
                }
            }
        }
    }
    return out;
}

HybridDensityField hybrid_density_divergence_form(const HybridField& y, const GaugePotential& g,
                                                  const SpectralWorkspace& ws, double hbar) {
    const auto& grid = y.grid();
    const int n = y.n;
    HybridDensityField out(grid, n);
    for (int b = 0; b < n; ++b) {
        const ScalarField ybc = conjugate(y.comp[b]);
        const VectorField zm = apply_z_minus(ybc, g, ws, hbar);
        for (int a = 0; a < n; ++a) {
            VectorField flux(grid);
            flux.q_comp = multiply(y.comp[a], zm.q_comp);
            flux.p_comp = multiply(y.comp[a], zm.p_comp);
            ScalarField div = ws.divergence(flux);
            auto& dst = out.at(a, b).v;
            for (std::size_t i = 0; i < dst.size(); ++i)
                dst[i] = y.comp[a].v[i] * std::conj(y.comp[b].v[i]) + div.v[i];
        }
    }
    return out;
}

ScalarField clebsch_density(const ScalarField& psi, const GaugePotential& g,
                            const SpectralWorkspace& ws, double hbar, bool dealias) {
    HybridField wrap(psi.grid, 1);
    wrap.comp[0] = psi;
    if (dealias) ws.dealias_23(wrap.comp[0]);
    ScalarField out = hybrid_density(wrap, g, ws, hbar).at(0, 0);
    for (auto& z : out.v) z = cplx{z.real(), 0.0};
    return out;
}

DensityMatrix quantum_density(const HybridField& y) {
    DensityMatrix out;
    out.rho = QMat(y.n);
    for (int a = 0; a < y.n; ++a)
        for (int b = 0; b < y.n; ++b) out.rho.at(a, b) = inner_product(y.comp[b], y.comp[a]);
    return out;
}

ScalarField classical_density(const HybridField& y, const GaugePotential& g,
                              const SpectralWorkspace& ws, double hbar) {
    return hybrid_density(y, g, ws, hbar).trace_field();
}

double hybrid_expectation(const HybridHamiltonian& a_op, const HybridField& y,
                          const GaugePotential& g, const SpectralWorkspace& ws, double hbar) {
    for (const auto& c : a_op.couplings)
        if (c.mat.herm_deviation() > 1e-12)
            throw std::invalid_argument("hybrid_expectation: non-Hermitian observable");
    const HybridDensityField d = hybrid_density(y, g, ws, hbar);
    const auto& grid = y.grid();
    ScalarField integrand(grid);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const std::size_t id = grid.idx(i, j);
            const QMat av = a_op.value_at(q, p);
            cplx tr{0.0, 0.0};
            for (int a = 0; a < y.n; ++a)
                for (int b = 0; b < y.n; ++b) tr += av.at(a, b) * d.at(b, a).v[id];
            integrand.v[id] = tr;
        }
    }
    return integrate(integrand).real();
}

cplx hybrid_expectation_inner(const HybridHamiltonian& a_op, const HybridField& y,
                              const GaugePotential& g, const SpectralWorkspace& ws,
                              double hbar) {
    const HybridField ly = apply_hybrid_liouvillian(a_op, g, ws, y, hbar);
    cplx s{0.0, 0.0};
    for (int a = 0; a < y.n; ++a) s += inner_product(y.comp[a], ly.comp[a]);
    return s;
}

// ---- branch propagation ----------------------------------------------------

HybridField branch_propagate(const HybridHamiltonian& h, const GaugePotential& g,
                             const SpectralWorkspace& ws, const HybridField& y0, double t,
                             double hbar) {
    if (h.n != 2 || h.couplings.size() != 1 || !h.single_coupling_alpha)
        throw std::invalid_argument(
            "branch_propagate: Hamiltonian must be H0 + V(q) (alpha . sigma) with n = 2");
    const auto diag = diagonalize_coupling(*h.single_coupling_alpha);
    const double lam = diag.lambda;

    // rotate into the eigenbasis of the coupling
    HybridField yt(y0.grid(), 2);
    for (std::size_t i = 0; i < y0.comp[0].v.size(); ++i) {
        for (int k = 0; k < 2; ++k)
            yt.comp[k].v[i] =
                diag.u.at(k, 0) * y0.comp[0].v[i] + diag.u.at(k, 1) * y0.comp[1].v[i];
    }

    for (int k = 0; k < 2; ++k) {
        const double sgn = (k == 0) ? 1.0 : -1.0;
        const bool quadratic = h.h0.oscillator && h.couplings[0].v.is_quadratic_homogeneous &&
                               std::abs(h.couplings[0].v(1.0, 0.0) - 0.5) < 1e-12 &&
                               std::abs(h.couplings[0].v(0.0, 1.0)) < 1e-12;
        if (quadratic && g.kind == GaugePotential::Kind::HarmonicOscillator) {
            const double mass = h.h0.oscillator->mass;
            const double w2 = h.h0.oscillator->omega * h.h0.oscillator->omega + sgn * lam / mass;
            if (w2 <= 0.0)
                throw std::invalid_argument("branch_propagate: imaginary branch frequency");
            yt.comp[k] = propagate_characteristics(harmonic_term(mass, std::sqrt(w2)), g,
                                                   yt.comp[k], t);
        } else {
            // generic branch Hamiltonian H0 + sgn*lam*V via RK4
            HamiltonianTerm hb;
            const HamiltonianTerm h0 = h.h0;
            const HamiltonianTerm v = h.couplings[0].v;
            hb.value = [h0, v, sgn, lam](double q, double p) {
                return h0(q, p) + sgn * lam * v(q, p);
            };
            hb.gradient = [h0, v, sgn, lam](double q, double p) {
                auto a = h0.grad(q, p);
                auto b = v.grad(q, p);
                return std::array<double, 2>{a[0] + sgn * lam * b[0], a[1] + sgn * lam * b[1]};
            };
            KvhOperator op(hb, g, ws, hbar);
            const double dt_max = cfl_max_dt(op);
            const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(t) / dt_max)));
            const double dt = t / steps;
            for (int s = 0; s < steps; ++s) yt.comp[k] = step_rk4(op, yt.comp[k], dt);
        }
    }

    HybridField out(y0.grid(), 2);
    for (std::size_t i = 0; i < out.comp[0].v.size(); ++i) {
        for (int a = 0; a < 2; ++a)
            out.comp[a].v[i] = std::conj(diag.u.at(0, a)) * yt.comp[0].v[i] +
                               std::conj(diag.u.at(1, a)) * yt.comp[1].v[i];
    }
    return out;
}

// ---- AG comparison dynamics -------------------------------------------------

HybridDensityField ag_rhs(const HybridDensityField& d, const HybridHamiltonian& h,
                          const SpectralWorkspace& ws, double hbar) {
    const auto& grid = d.grid();
    const int n = d.n;
    std::vector<ScalarField> dq(n * n), dp(n * n);
    for (int e = 0; e < n * n; ++e) {
        dq[e] = ScalarField(grid);
        dp[e] = ScalarField(grid);
        ws.deriv_both(d.entry[e], dq[e], dp[e]);
    }
    HybridDensityField out(grid, n);
    const cplx mi_over_h{0.0, -1.0 / hbar};
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const std::size_t id = grid.idx(i, j);
            const QMat hv = h.value_at(q, p);
            const QMat hq = h.grad_q_at(q, p);
            const QMat hp = h.grad_p_at(q, p);
            for (int a = 0; a < n; ++a) {
                for (int b = 0; b < n; ++b) {
                    cplx comm{0.0, 0.0}, sym{0.0, 0.0};
                    for (int c = 0; c < n; ++c) {
                        const std::size_t cb = static_cast<std::size_t>(c) * n + b;
                        const std::size_t ac = static_cast<std::size_t>(a) * n + c;
                        comm += hv.at(a, c) * d.entry[cb].v[id] -
                                d.entry[ac].v[id] * hv.at(c, b);
                        // {H,D} - {D,H}
                        sym += hq.at(a, c) * dp[cb].v[id] - hp.at(a, c) * dq[cb].v[id];
                        sym -= dq[ac].v[id] * hp.at(c, b) - dp[ac].v[id] * hq.at(c, b);
                    }
                    out.at(a, b).v[id] = mi_over_h * comm + 0.5 * sym;
                }
            }
        }
    }
    return out;
}

HybridDensityField step_rk4_ag(const HybridDensityField& d, const HybridHamiltonian& h,
                               const SpectralWorkspace& ws, double hbar, double dt) {
    auto lin = [&](const HybridDensityField& x, double s, const HybridDensityField& k) {
        HybridDensityField out = x;
        for (std::size_t e = 0; e < out.entry.size(); ++e) axpy(out.entry[e], s, k.entry[e]);
        return out;
    };
    HybridDensityField k1 = ag_rhs(d, h, ws, hbar);
    HybridDensityField k2 = ag_rhs(lin(d, 0.5 * dt, k1), h, ws, hbar);
    HybridDensityField k3 = ag_rhs(lin(d, 0.5 * dt, k2), h, ws, hbar);
    HybridDensityField k4 = ag_rhs(lin(d, dt, k3), h, ws, hbar);
    HybridDensityField out = lin(d, dt / 6.0, k1);
    out = lin(out, dt / 3.0, k2);
    out = lin(out, dt / 3.0, k3);
    out = lin(out, dt / 6.0, k4);
    return out;
}

// ---- partial trace identities ------------------------------------------------

PartialTraceReport partial_trace_check(const std::vector<HybridField>& snapshots, double dt,
                                       const HybridHamiltonian& h, const GaugePotential& g,
                                       const SpectralWorkspace& ws, double hbar) {
    if (snapshots.size() < 3)
        throw std::invalid_argument("partial_trace_check: need at least 3 snapshots");
    PartialTraceReport rep;
    const auto& grid = ws.grid();
    const int n = snapshots.front().n;
    for (std::size_t s = 1; s + 1 < snapshots.size(); ++s) {
        const HybridDensityField d = hybrid_density(snapshots[s], g, ws, hbar);
        // quantum side: d rho/dt = (1/i hbar) int [H, D]
        const DensityMatrix rp = quantum_density(snapshots[s + 1]);
        const DensityMatrix rm = quantum_density(snapshots[s - 1]);
        std::vector<ScalarField> comm(static_cast<std::size_t>(n) * n, ScalarField(grid));
        std::vector<ScalarField> trbr(1, ScalarField(grid));
        std::vector<ScalarField> dqf(n * n), dpf(n * n);
        for (int e = 0; e < n * n; ++e) {
            dqf[e] = ScalarField(grid);
            dpf[e] = ScalarField(grid);
            ws.deriv_both(d.entry[e], dqf[e], dpf[e]);
        }
        for (int i = 0; i < grid.nq; ++i) {
            const double q = grid.q(i);
            for (int j = 0; j < grid.np; ++j) {
                const double p = grid.p(j);
                const std::size_t id = grid.idx(i, j);
                const QMat hv = h.value_at(q, p);
                const QMat hq = h.grad_q_at(q, p);
                const QMat hp = h.grad_p_at(q, p);
                cplx tr{0.0, 0.0};
                for (int a = 0; a < n; ++a) {
                    for (int b = 0; b < n; ++b) {
                        cplx c{0.0, 0.0};
                        for (int cdx = 0; cdx < n; ++cdx) {
                            const std::size_t cb = static_cast<std::size_t>(cdx) * n + b;
                            const std::size_t ac = static_cast<std::size_t>(a) * n + cdx;
                            c += hv.at(a, cdx) * d.entry[cb].v[id] -
                                 d.entry[ac].v[id] * hv.at(cdx, b);
                        }
                        comm[static_cast<std::size_t>(a) * n + b].v[id] = c;
                    }
                    // Tr {H, D} contribution row a
                    for (int cdx = 0; cdx < n; ++cdx) {
                        const std::size_t ca = static_cast<std::size_t>(cdx) * n + a;
                        tr += hq.at(a, cdx) * dpf[ca].v[id] - hp.at(a, cdx) * dqf[ca].v[id];
                    }
                }
                trbr[0].v[id] = tr;
            }
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                const cplx fd =
                    (rp.rho.at(a, b) - rm.rho.at(a, b)) / (2.0 * dt);
                const cplx rhs =
                    integrate(comm[static_cast<std::size_t>(a) * n + b]) / cplx{0.0, hbar};
                rep.max_quantum_residual = std::max(rep.max_quantum_residual, std::abs(fd - rhs));
            }
        const ScalarField rho_p = classical_density(snapshots[s + 1], g, ws, hbar);
        const ScalarField rho_m = classical_density(snapshots[s - 1], g, ws, hbar);
        for (std::size_t id = 0; id < trbr[0].v.size(); ++id) {
            const double fd = (rho_p.v[id].real() - rho_m.v[id].real()) / (2.0 * dt);
            rep.max_classical_residual =
                std::max(rep.max_classical_residual, std::abs(fd - trbr[0].v[id].real()));
        }
    }
    return rep;
}

}  // namespace khs
