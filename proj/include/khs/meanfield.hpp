#ifndef KHS_MEANFIELD_HPP
#define KHS_MEANFIELD_HPP

#include "khs/hybrid.hpp"

namespace khs {

/// Factorized hybrid state: classical wavefunction times an n-level quantum
/// vector.
struct MeanFieldState {
    ScalarField classical;
    std::vector<cplx> quantum;

    double classical_norm() const { return norm_l2(classical); }
    double quantum_norm() const;
};

struct MeanFieldRhs {
    ScalarField d_classical;
    std::vector<cplx> d_quantum;
};

/// Coupled equations of the factorization closure: the classical factor sees
/// the quantum expectation of H as an effective scalar Hamiltonian, the
/// quantum factor evolves under the matrix integral(Psi* L_H Psi).
MeanFieldRhs meanfield_rhs(const MeanFieldState& st, const HybridHamiltonian& h,
                           const GaugePotential& g, const SpectralWorkspace& ws, double hbar);

/// The Hermitian generator integral(Psi* L_H Psi) acting on the quantum factor.
QMat meanfield_quantum_generator(const ScalarField& psi, const HybridHamiltonian& h,
                                 const GaugePotential& g, const SpectralWorkspace& ws,
                                 double hbar);

MeanFieldState step_meanfield_rk4(const MeanFieldState& st, const HybridHamiltonian& h,
                                  const GaugePotential& g, const SpectralWorkspace& ws,
                                  double hbar, double dt, double cfl_safety = 0.5);

/// Total energy integral(Psi* <psi|L_H psi> Psi).
double meanfield_energy(const MeanFieldState& st, const HybridHamiltonian& h,
                        const GaugePotential& g, const SpectralWorkspace& ws, double hbar);

}  // namespace khs

#endif
