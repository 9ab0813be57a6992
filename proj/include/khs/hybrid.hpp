#ifndef KHS_HYBRID_HPP
#define KHS_HYBRID_HPP

#include <array>
#include <optional>
#include <vector>

#include "khs/kvh.hpp"
#include "khs/qmat.hpp"

namespace khs {

/// n-component complex wavefunction on the phase-space grid.
struct HybridField {
    int n = 0;
    std::vector<ScalarField> comp;

    HybridField() = default;
    HybridField(const PhaseSpaceGrid& g, int dim) : n(dim), comp(dim, ScalarField(g)) {}

    const PhaseSpaceGrid& grid() const { return comp.at(0).grid; }
    double norm() const;   // sqrt(sum_a ||comp_a||^2)
};

HybridField add_scaled(const HybridField& a, cplx s, const HybridField& b);
double l2_distance(const HybridField& a, const HybridField& b);
void normalize(HybridField& y);

/// Hybrid Hamiltonian: scalar part plus couplings V_j(z) * M_j with constant
/// Hermitian matrices M_j.
struct HybridHamiltonian {
    int n = 1;
    HamiltonianTerm h0;
    struct Coupling {
        HamiltonianTerm v;
        QMat mat;
    };
    std::vector<Coupling> couplings;

    /// Set when the Hamiltonian is H0 + V(q) (alpha . sigma) with n = 2.
    std::optional<std::array<double, 3>> single_coupling_alpha;

    QMat value_at(double q, double p) const;
    QMat grad_q_at(double q, double p) const;
    QMat grad_p_at(double q, double p) const;

    static HybridHamiltonian scalar(HamiltonianTerm h, int n = 1);
    /// H0(m, omega) + V(q) (alpha . sigma); throws unless the matrices are
    /// Hermitian to 1e-12.
    static HybridHamiltonian spin_oscillator(double mass, double omega,
                                             const std::array<double, 3>& alpha,
                                             HamiltonianTerm coupling_v);
    static HybridHamiltonian with_couplings(HamiltonianTerm h, std::vector<Coupling> cpl);
};

/// n x n matrix-valued field (row-major entries, each a ScalarField).
struct HybridDensityField {
    int n = 0;
    std::vector<ScalarField> entry;

    HybridDensityField() = default;
    HybridDensityField(const PhaseSpaceGrid& g, int dim)
        : n(dim), entry(static_cast<std::size_t>(dim) * dim, ScalarField(g)) {}

    ScalarField& at(int a, int b) { return entry[static_cast<std::size_t>(a) * n + b]; }
    const ScalarField& at(int a, int b) const {
        return entry[static_cast<std::size_t>(a) * n + b];
    }
    const PhaseSpaceGrid& grid() const { return entry.at(0).grid; }

    double max_herm_deviation() const;
    /// Min over nodes of the smallest eigenvalue (closed form for n = 2).
    double min_eigenvalue() const;
    ScalarField trace_field() const;
};

struct DensityMatrix {
    QMat rho;
    double min_eigenvalue() const;
};

double purity(const DensityMatrix& rho);
/// Bloch components for n = 2: (2 Re rho12, 2 Im rho12, rho11 - rho22).
std::array<double, 3> bloch_vector(const DensityMatrix& rho);

/// Precomputed hybrid Liouvillian for time stepping.
class HybridOperator {
public:
    HybridOperator(const HybridHamiltonian& h, const GaugePotential& g,
                   const SpectralWorkspace& ws, double hbar);

    HybridField apply(const HybridField& y) const;  // L_H Y
    HybridField rhs(const HybridField& y) const;    // -(i/hbar) L_H Y
    double max_velocity() const { return max_velocity_; }
    double hbar() const { return hbar_; }
    const SpectralWorkspace& workspace() const { return ws_; }
    int dim() const { return n_; }

private:
    const SpectralWorkspace& ws_;
    double hbar_;
    int n_;
    std::vector<double> h0q_, h0p_, phi0_;
    struct CouplingCoef {
        std::vector<double> vq, vp, phiv;
        QMat mat;
    };
    std::vector<CouplingCoef> cpl_;
    double max_velocity_ = 0.0;

    template <bool AsRhs>
    HybridField apply_impl(const HybridField& y) const;
};

HybridField apply_hybrid_liouvillian(const HybridHamiltonian& h, const GaugePotential& g,
                                     const SpectralWorkspace& ws, const HybridField& y,
                                     double hbar);

double cfl_max_dt(const HybridOperator& op, double safety = 0.5);
HybridField step_rk4_hybrid(const HybridOperator& op, const HybridField& y, double dt,
                            double cfl_safety = 0.5);

/// D(z) = Y Y^dag - div(JA Y Y^dag) + i hbar {Y, Y^dag}, divergence of the
/// gauge term expanded analytically.
HybridDensityField hybrid_density(const HybridField& y, const GaugePotential& g,
                                  const SpectralWorkspace& ws, double hbar);

/// D(z) = Y Y^dag + div(Y Zminus Y^dag) with a spectral divergence; valid for
/// decaying fields, used to cross-check the production form.
HybridDensityField hybrid_density_divergence_form(const HybridField& y, const GaugePotential& g,
                                                  const SpectralWorkspace& ws, double hbar);

DensityMatrix quantum_density(const HybridField& y);
ScalarField classical_density(const HybridField& y, const GaugePotential& g,
                              const SpectralWorkspace& ws, double hbar);

/// Re Tr integral(A_op D); agrees with <Y | L_A Y> for decaying states.
double hybrid_expectation(const HybridHamiltonian& a_op, const HybridField& y,
                          const GaugePotential& g, const SpectralWorkspace& ws, double hbar);
cplx hybrid_expectation_inner(const HybridHamiltonian& a_op, const HybridField& y,
                              const GaugePotential& g, const SpectralWorkspace& ws, double hbar);

/// Rotate to the coupling eigenbasis, transport each branch under
/// H0 +- lambda V (characteristics when the shape allows, RK4 otherwise),
/// rotate back.
HybridField branch_propagate(const HybridHamiltonian& h, const GaugePotential& g,
                             const SpectralWorkspace& ws, const HybridField& y0, double t,
                             double hbar);

/// Time derivative of the hybrid density expressed in terms of Y; the groups
/// are exposed separately so near-cancelling contributions can be inspected.
struct DEvolutionResult {
    HybridDensityField total;
    std::vector<HybridDensityField> groups;  // 7 displayed groups
    static const char* group_name(int i);
};

DEvolutionResult d_evolution_rhs(const HybridField& y, const HybridHamiltonian& h,
                                 const GaugePotential& g, const SpectralWorkspace& ws,
                                 double hbar, bool dealias = true);

/// Comparison dynamics: dD/dt = -(i/hbar)[H,D] + ({H,D} - {D,H})/2.
HybridDensityField ag_rhs(const HybridDensityField& d, const HybridHamiltonian& h,
                          const SpectralWorkspace& ws, double hbar);
HybridDensityField step_rk4_ag(const HybridDensityField& d, const HybridHamiltonian& h,
                               const SpectralWorkspace& ws, double hbar, double dt);

struct PartialTraceReport {
    double max_quantum_residual = 0.0;   // d rho_hat/dt vs (1/i hbar) int [H, D]
    double max_classical_residual = 0.0; // d rho/dt vs Tr {H, D}
};

/// Centered finite differences on a uniformly spaced snapshot series.
PartialTraceReport partial_trace_check(const std::vector<HybridField>& snapshots, double dt,
                                       const HybridHamiltonian& h, const GaugePotential& g,
                                       const SpectralWorkspace& ws, double hbar);

}  // namespace khs

#endif
