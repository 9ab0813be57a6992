#include "khs/kvh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "khs/interp.hpp"

namespace khs {

KvhOperator::KvhOperator(const HamiltonianTerm& h, const GaugePotential& g,
                         const SpectralWorkspace& ws, double hbar)
    : ws_(ws), hbar_(hbar) {
    const auto& grid = ws.grid();
    hq_.resize(grid.size());
    hp_.resize(grid.size());
    phi_.resize(grid.size());
    double vmax = 0.0;
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const std::size_t id = grid.idx(i, j);
            const auto gr = h.grad(q, p);
            const auto ja = g.ja(q, p);
            hq_[id] = gr[0];
            hp_[id] = gr[1];
            phi_[id] = h(q, p) + gr[0] * ja[0] + gr[1] * ja[1];
            vmax = std::max(vmax, std::hypot(gr[1], gr[0]));
        }
    }
    max_velocity_ = vmax;
}

ScalarField KvhOperator::apply(const ScalarField& psi) const {
    require_same_grid(psi.grid, ws_.grid(), "KvhOperator::apply");
    ScalarField dq(psi.grid), dp(psi.grid);
    ws_.deriv_both(psi, dq, dp);
    ScalarField out(psi.grid);
    const cplx ih{0.0, hbar_};
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = ih * (hq_[i] * dp.v[i] - hp_[i] * dq.v[i]) + phi_[i] * psi.v[i];
    return out;
}

ScalarField KvhOperator::rhs(const ScalarField& psi) const {
    ScalarField dq(psi.grid), dp(psi.grid);
    ws_.deriv_both(psi, dq, dp);
    ScalarField out(psi.grid);
    const cplx mi_over_h{0.0, -1.0 / hbar_};
    for (std::size_t i = 0; i < out.v.size(); ++i) {
        const cplx bracket = hq_[i] * dp.v[i] - hp_[i] * dq.v[i];
        // -(i/hbar)(i hbar bracket + phi psi) = bracket - (i/hbar) phi psi
        out.v[i] = bracket + mi_over_h * (phi_[i] * psi.v[i]);
    }
    return out;
}

ScalarField apply_covariant_liouvillian(const HamiltonianTerm& h, const GaugePotential& g,
                                        const SpectralWorkspace& ws, const ScalarField& psi,
                                        double hbar) {
    KvhOperator op(h, g, ws, hbar);
    return op.apply(psi);
}

ScalarField covariant_liouvillian_zform(const HamiltonianTerm& h, const GaugePotential& g,
                                        const SpectralWorkspace& ws, const ScalarField& psi,
                                        double hbar) {
    VectorField zp = apply_z_plus(psi, g, ws, hbar);
    const auto& grid = psi.grid;
    ScalarField out(grid);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const std::size_t id = grid.idx(i, j);
            const auto gr = h.grad(q, p);
            out.v[id] = h(q, p) * psi.v[id] - gr[0] * zp.q_comp.v[id] - gr[1] * zp.p_comp.v[id];
        }
    }
    return out;
}

// clebsch_density lives in hybrid.cpp: it is the n = 1 trace of the hybrid
// density and shares that kernel bit for bit.

ScalarField clebsch_density_divergence_form(const ScalarField& psi, const GaugePotential& g,
                                            const SpectralWorkspace& ws, double hbar) {
    VectorField j = apply_z_plus(psi, g, ws, hbar);
    const ScalarField psic = conjugate(psi);
    VectorField flux(psi.grid);
    flux.q_comp = multiply(psic, j.q_comp);
    flux.p_comp = multiply(psic, j.p_comp);
    ScalarField div = ws.divergence(flux);
    ScalarField out = abs_squared(psi);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = out.v[i].real() + div.v[i].real();
    return out;
}

double kvh_energy(const ScalarField& psi, const HamiltonianTerm& h, const GaugePotential& g,
                  const SpectralWorkspace& ws, double hbar) {
    ScalarField rho = clebsch_density(psi, g, ws, hbar);
    const auto& grid = psi.grid;
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const std::size_t id = grid.idx(i, j);
            rho.v[id] *= h(q, grid.p(j));
        }
    }
    return integrate(rho).real();
}

cplx kvh_energy_inner(const ScalarField& psi, const HamiltonianTerm& h, const GaugePotential& g,
                      const SpectralWorkspace& ws, double hbar) {
    return inner_product(psi, apply_covariant_liouvillian(h, g, ws, psi, hbar));
}

double cfl_max_dt(const KvhOperator& op, double safety) {
    const auto& g = op.workspace().grid();
    const double v = std::max(op.max_velocity(), 1e-300);
    return safety * std::min(g.dq, g.dp) / v;
}

namespace {
void check_cfl(double dt, double bound) {
    if (dt > bound) {
        std::ostringstream os;
        os << "step_rk4: dt=" << dt << " exceeds CFL bound " << bound;
        throw std::invalid_argument(os.str());
    }
}
}  // namespace

ScalarField step_rk4(const KvhOperator& op, const ScalarField& psi, double dt,
                     double cfl_safety) {
    if (dt == 0.0) return psi;
    check_cfl(std::abs(dt), cfl_max_dt(op, cfl_safety));
    ScalarField k1 = op.rhs(psi);
    ScalarField y = psi;
    axpy(y, 0.5 * dt, k1);
    ScalarField k2 = op.rhs(y);
    y = psi;
    axpy(y, 0.5 * dt, k2);
    ScalarField k3 = op.rhs(y);
    y = psi;
    axpy(y, dt, k3);
    ScalarField k4 = op.rhs(y);
    ScalarField out = psi;
    axpy(out, dt / 6.0, k1);
    axpy(out, dt / 3.0, k2);
    axpy(out, dt / 3.0, k3);
    axpy(out, dt / 6.0, k4);
    return out;
}

ScalarField propagate_characteristics(const HamiltonianTerm& h, const GaugePotential& g,
                                      const ScalarField& psi0, double t) {
    if (!h.oscillator)
        throw std::invalid_argument(
            "propagate_characteristics: Hamiltonian is not a quadratic oscillator");
    if (g.kind != GaugePotential::Kind::HarmonicOscillator)
        throw std::invalid_argument(
            "propagate_characteristics: requires the harmonic-oscillator gauge");
    const double mass = h.oscillator->mass;
    const double w = h.oscillator->omega;
    const double c = std::cos(w * t);
    const double s = std::sin(w * t);
    const auto& grid = psi0.grid;
    ScalarField out(grid);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const double qb = q * c - p * s / (mass * w);
            const double pb = p * c + mass * w * q * s;
            out.v[grid.idx(i, j)] = bicubic_periodic(psi0, qb, pb);
        }
    }
    return out;
}

PolarFields polar_fields(const ScalarField& psi, double threshold, double hbar) {
    PolarFields out;
    out.density = abs_squared(psi);
    out.phase = ScalarField(psi.grid);
    out.mask.assign(psi.size(), 0);
    double dmax = 0.0;
    for (const cplx& z : out.density.v) dmax = std::max(dmax, z.real());
    const double cut = threshold * dmax;
    for (std::size_t i = 0; i < psi.v.size(); ++i) {
        if (out.density.v[i].real() > cut) {
            out.mask[i] = 1;
            out.phase.v[i] = hbar * std::arg(psi.v[i]);
        }
    }
    return out;
}

}  // namespace khs
