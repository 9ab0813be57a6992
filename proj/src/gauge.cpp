#include "khs/gauge.hpp"

#include <cmath>
#include <stdexcept>

#include "khs/spectral.hpp"

namespace khs {

GaugePotential GaugePotential::liouville() {
    GaugePotential g;
    g.kind = Kind::Liouville;
    g.eval = [](double, double p) { return std::array<double, 2>{p, 0.0}; };
    g.jac = [](double, double) { return std::array<double, 4>{0.0, 1.0, 0.0, 0.0}; };
    return g;
}

GaugePotential GaugePotential::harmonic_oscillator() {
    GaugePotential g;
    g.kind = Kind::HarmonicOscillator;
    g.eval = [](double q, double p) { return std::array<double, 2>{0.5 * p, -0.5 * q}; };
    g.jac = [](double, double) { return std::array<double, 4>{0.0, 0.5, -0.5, 0.0}; };
    return g;
}

GaugePotential GaugePotential::custom(Eval eval, Jacobian jac, const PhaseSpaceGrid& probe) {
    GaugePotential g;
    g.kind = Kind::Custom;
    g.eval = std::move(eval);
    g.jac = std::move(jac);
    for (int i = 0; i < probe.nq; ++i) {
        for (int j = 0; j < probe.np; ++j) {
            const double c = g.curl(probe.q(i), probe.p(j));
            if (std::abs(c + 1.0) > 1e-10)
                throw std::invalid_argument(
                    "GaugePotential::custom: curl constraint dq(Ap)-dp(Aq) = -1 violated");
        }
    }
    return g;
}

GaugePotential GaugePotential::from_name(const std::string& name) {
    if (name == "liouville") return liouville();
    if (name == "harmonic") return harmonic_oscillator();
    throw std::invalid_argument("unknown gauge '" + name + "' (expected liouville|harmonic)");
}

VectorField evaluate_gauge(const GaugePotential& g, const PhaseSpaceGrid& grid) {
    VectorField out(grid);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const auto a = g.a(q, grid.p(j));
            out.q_comp.v[grid.idx(i, j)] = a[0];
            out.p_comp.v[grid.idx(i, j)] = a[1];
        }
    }
    return out;
}

ScalarField phase_function(const HamiltonianTerm& h, const GaugePotential& g,
                           const PhaseSpaceGrid& grid) {
    ScalarField out(grid);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const auto gr = h.grad(q, p);
            const auto ja = g.ja(q, p);
            out.v[grid.idx(i, j)] = h(q, p) + gr[0] * ja[0] + gr[1] * ja[1];
        }
    }
    return out;
}

VectorField apply_z_plus(const ScalarField& f, const GaugePotential& g,
                         const SpectralWorkspace& ws, double hbar) {
    require_same_grid(f.grid, ws.grid(), "apply_z_plus");
    ScalarField fq(f.grid), fp(f.grid);
    ws.deriv_both(f, fq, fp);
    VectorField out(f.grid);
    const auto& grid = f.grid;
    const cplx mih{0.0, -hbar};
    const cplx ih{0.0, hbar};
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const std::size_t id = grid.idx(i, j);
            const auto a = g.a(q, grid.p(j));
            out.q_comp.v[id] = mih * fp.v[id] - a[1] * f.v[id];
            out.p_comp.v[id] = ih * fq.v[id] + a[0] * f.v[id];
        }
    }
    return out;
}

VectorField apply_z_minus(const ScalarField& f, const GaugePotential& g,
                          const SpectralWorkspace& ws, double hbar) {
    require_same_grid(f.grid, ws.grid(), "apply_z_minus");
    ScalarField fq(f.grid), fp(f.grid);
    ws.deriv_both(f, fq, fp);
    VectorField out(f.grid);
    const auto& grid = f.grid;
    const cplx ih{0.0, hbar};
    const cplx mih{0.0, -hbar};
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const std::size_t id = grid.idx(i, j);
            const auto a = g.a(q, grid.p(j));
            out.q_comp.v[id] = ih * fp.v[id] - a[1] * f.v[id];
            out.p_comp.v[id] = mih * fq.v[id] + a[0] * f.v[id];
        }
    }
    return out;
}

}  // namespace khs
