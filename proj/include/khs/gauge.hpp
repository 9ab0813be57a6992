#ifndef KHS_GAUGE_HPP
#define KHS_GAUGE_HPP

#include <array>
#include <functional>
#include <string>

#include "khs/field.hpp"
#include "khs/hamiltonian.hpp"

namespace khs {

/// Symplectic potential A(z) with dq(A_p) - dp(A_q) = -1 everywhere, so that
/// the standard symplectic structure is recovered. A is always evaluated
/// analytically; it is never differentiated spectrally (A need not be
/// periodic on the grid).
struct GaugePotential {
    enum class Kind { Liouville, HarmonicOscillator, Custom };

    using Eval = std::function<std::array<double, 2>(double, double)>;
    // returns (dAq/dq, dAq/dp, dAp/dq, dAp/dp)
    using Jacobian = std::function<std::array<double, 4>(double, double)>;

    Kind kind = Kind::Liouville;
    Eval eval;
    Jacobian jac;

    std::array<double, 2> a(double q, double p) const { return eval(q, p); }
    /// J A = (A_p, -A_q)
    std::array<double, 2> ja(double q, double p) const {
        auto v = eval(q, p);
        return {v[1], -v[0]};
    }
    double curl(double q, double p) const {
        auto j = jac(q, p);
        return j[2] - j[1];  // dq(Ap) - dp(Aq)
    }

    static GaugePotential liouville();
    static GaugePotential harmonic_oscillator();
    /// Custom gauge; the curl constraint is verified on the nodes of `probe`
    /// to 1e-10 and construction fails otherwise.
    static GaugePotential custom(Eval eval, Jacobian jac, const PhaseSpaceGrid& probe);

    static GaugePotential from_name(const std::string& name);
};

/// Sample A on the grid nodes.
VectorField evaluate_gauge(const GaugePotential& g, const PhaseSpaceGrid& grid);

/// Scalar multiplier phi_H = H + grad(H) . JA in the gauge-fixed wave
/// equation (minus the classical Lagrangian in the Liouville gauge).
ScalarField phase_function(const HamiltonianTerm& h, const GaugePotential& g,
                           const PhaseSpaceGrid& grid);

class SpectralWorkspace;

/// Z+ F = J(-i hbar grad - A) F = (-i hbar dp(F) - Ap F, i hbar dq(F) + Aq F)
VectorField apply_z_plus(const ScalarField& f, const GaugePotential& g,
                         const SpectralWorkspace& ws, double hbar);

/// Z- F = J(+i hbar grad - A) F = (+i hbar dp(F) - Ap F, -i hbar dq(F) + Aq F)
VectorField apply_z_minus(const ScalarField& f, const GaugePotential& g,
                          const SpectralWorkspace& ws, double hbar);

}  // namespace khs

#endif
