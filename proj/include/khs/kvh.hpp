#ifndef KHS_KVH_HPP
#define KHS_KVH_HPP

#include <cstdint>
#include <vector>

#include "khs/gauge.hpp"
#include "khs/hamiltonian.hpp"
#include "khs/spectral.hpp"

namespace khs {

/// Precomputed coefficient grids for one (H, gauge) pair, so that repeated
/// applications inside a time loop avoid re-evaluating the analytic closures.
class KvhOperator {
public:
    KvhOperator(const HamiltonianTerm& h, const GaugePotential& g, const SpectralWorkspace& ws,
                double hbar);

    /// L_H psi = i hbar {H, psi} + phi_H psi
    ScalarField apply(const ScalarField& psi) const;

    /// d psi/dt = -(i/hbar) L_H psi
    ScalarField rhs(const ScalarField& psi) const;

    /// Largest |X_H| over the nodes; CFL limit is safety*min(dq,dp)/max|X_H|.
    double max_velocity() const { return max_velocity_; }
    double hbar() const { return hbar_; }
    const SpectralWorkspace& workspace() const { return ws_; }

private:
    const SpectralWorkspace& ws_;
    double hbar_;
    double max_velocity_;
    std::vector<double> hq_, hp_;   // analytic dH/dq, dH/dp on nodes
    std::vector<double> phi_;       // phase multiplier
};

/// Covariant Liouvillian via the bracket + phase form.
ScalarField apply_covariant_liouvillian(const HamiltonianTerm& h, const GaugePotential& g,
                                        const SpectralWorkspace& ws, const ScalarField& psi,
                                        double hbar);

/// Same operator through H psi - grad(H) . Z+ psi; used to cross-check the
/// bracket form.
ScalarField covariant_liouvillian_zform(const HamiltonianTerm& h, const GaugePotential& g,
                                        const SpectralWorkspace& ws, const ScalarField& psi,
                                        double hbar);

/// rho = |psi|^2 - div(JA |psi|^2) + hbar Im{psi*, psi}, with the JA
/// divergence expanded analytically (div JA = -1 from the curl constraint).
ScalarField clebsch_density(const ScalarField& psi, const GaugePotential& g,
                            const SpectralWorkspace& ws, double hbar, bool dealias = false);

/// rho = |psi|^2 + div(psi* Z+ psi) with a fully spectral divergence;
/// verification route, valid for decaying fields.
ScalarField clebsch_density_divergence_form(const ScalarField& psi, const GaugePotential& g,
                                            const SpectralWorkspace& ws, double hbar);

/// Physical energy integral(H * clebsch_density). For decaying states this
/// equals Re<psi, L_H psi>.
double kvh_energy(const ScalarField& psi, const HamiltonianTerm& h, const GaugePotential& g,
                  const SpectralWorkspace& ws, double hbar);

/// <psi, L_H psi> (complex; Hermiticity makes it real for decaying fields).
cplx kvh_energy_inner(const ScalarField& psi, const HamiltonianTerm& h, const GaugePotential& g,
                      const SpectralWorkspace& ws, double hbar);

double cfl_max_dt(const KvhOperator& op, double safety = 0.5);

/// One classical RK4 step of the method-of-lines system. Throws if dt exceeds
/// the CFL bound; the message carries the computed limit.
ScalarField step_rk4(const KvhOperator& op, const ScalarField& psi, double dt,
                     double cfl_safety = 0.5);

/// Semi-Lagrangian solution for quadratic oscillator Hamiltonians in the
/// harmonic-oscillator gauge: backward-rotate each node and sample psi0 by
/// periodic bicubic interpolation (the phase factor vanishes in this gauge).
ScalarField propagate_characteristics(const HamiltonianTerm& h, const GaugePotential& g,
                                      const ScalarField& psi0, double t);

struct PolarFields {
    ScalarField density;       // |psi|^2, real-valued
    ScalarField phase;         // hbar * arg(psi), principal branch, real-valued
    std::vector<std::uint8_t> mask;  // 1 where |psi|^2 > threshold * max
};

PolarFields polar_fields(const ScalarField& psi, double threshold, double hbar);

}  // namespace khs

#endif
