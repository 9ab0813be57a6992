#ifndef KHS_EXACT_HPP
#define KHS_EXACT_HPP

#include <array>
#include <functional>
#include <memory>

#include "khs/field.hpp"
#include "khs/hamiltonian.hpp"
#include "khs/qmat.hpp"

namespace khs {

struct HybridField;
struct DensityMatrix;

/// Parameters of the solvable model: oscillator (m, omega), coupling vector
/// alpha, inverse temperature beta, action unit hbar.
struct ExactModelParams {
    double m = 1.0;
    double omega = 1.0;
    std::array<double, 3> alpha{0.0, 0.0, 0.0};
    double beta = 1.0;
    double hbar = 1.0;

    double lambda() const {
        return std::sqrt(alpha[0] * alpha[0] + alpha[1] * alpha[1] + alpha[2] * alpha[2]);
    }
    double omega_plus() const;
    double omega_minus() const;  // throws when omega^2 - lambda/m <= 0
    void validate() const;
};

struct DiagonalizationResult {
    double lambda = 0.0;
    QMat u;  // u (alpha.sigma) u^dagger = lambda sigma_3
};

/// Unitary diagonalization of alpha.sigma. Convention: the +lambda
/// eigenvector sits in the first row and each row's first nonzero entry is
/// made real positive. Throws for |alpha| = 0.
DiagonalizationResult diagonalize_coupling(const std::array<double, 3>& alpha);

/// (1 - (1+s) e^-s) / s^2 with a series fallback near s = 0.
double thermal_profile(double s);
double thermal_profile_deriv(double s);

/// Amplitude of the thermal wavefunction sqrt((omega beta / 2 pi) g(beta H0)).
double thermal_amplitude(const ExactModelParams& pr, double q, double p);
double thermal_amplitude_deriv_s(const ExactModelParams& pr, double s);

/// Thermal column state on the grid; requires the grid to resolve the
/// thermal widths (at least 4 nodes per sigma in each direction).
HybridField thermal_initial_state(const ExactModelParams& pr, const PhaseSpaceGrid& grid);

/// Zero-phase amplitude whose phase-space density reproduces a radial target
/// rho(s), s = beta H0. Solves s u' + 2u = rho by the integrating-factor
/// closed form u(s) = integral_0^1 xi rho(s xi) d xi.
ScalarField amplitude_from_density(const std::function<double(double)>& rho_of_s,
                                   const ExactModelParams& pr, const PhaseSpaceGrid& grid);

/// Closed-form scalar component with an analytic gradient.
struct ClosedFormField {
    std::function<cplx(double, double)> value;
    std::function<std::array<cplx, 2>(double, double)> gradient;
};

/// Gaussian that is isotropic in the branch-scaled coordinates
/// (sqrt(m w) q, p / sqrt(m w)); rigid under the branch flow, so it stays
/// resolved for all time.
ClosedFormField scaled_gaussian(double mass, double w, double center_q, double center_p,
                                double sigma);

/// Backward characteristic map of the oscillator branch with frequency w:
/// returns (m00, m01, m10, m11) of z -> M z.
std::array<double, 4> branch_rotation(double mass, double w, double t);

/// Exact solution of the hybrid wave equation for H0 + V(q) alpha.sigma in
/// the harmonic-oscillator gauge, evaluated pointwise from closed-form
/// initial data. All derivatives are analytic (chain rule through the linear
/// branch flows), so densities carry no spectral error.
class HybridExactSolution {
public:
    /// Initial data given in the lab frame (two components).
    HybridExactSolution(const ExactModelParams& pr,
                        const std::array<ClosedFormField, 2>& upsilon0);
    /// Initial data given per branch (already rotated by u).
    static HybridExactSolution from_branch_data(const ExactModelParams& pr,
                                                const std::array<ClosedFormField, 2>& branch0);

    const ExactModelParams& params() const { return pr_; }
    const QMat& u() const { return u_; }

    std::array<cplx, 2> value(double q, double p, double t) const;
    /// gradient[a] = (d/dq, d/dp) of component a
    std::array<std::array<cplx, 2>, 2> gradient(double q, double p, double t) const;

    /// Hybrid density D(z,t), built from the analytic value/gradient pair.
    QMat density(double q, double p, double t) const;
    double classical_density(double q, double p, double t) const;

    HybridField sample(const PhaseSpaceGrid& grid, double t) const;

private:
    HybridExactSolution() = default;
    ExactModelParams pr_;
    QMat u_;
    std::array<ClosedFormField, 2> branch0_;
    double w_[2] = {0.0, 0.0};
};

/// Pointwise exact evolution from grid initial data: rotate the node
/// backward per branch and sample by periodic bicubic interpolation.
std::array<cplx, 2> hybrid_exact_grid(const ExactModelParams& pr, const HybridField& y0,
                                      double q, double p, double t);

/// Tensor quadrature over the plane in (x = beta H0, theta) coordinates:
/// integral f dz = 1/(beta omega) * int dtheta int dx f(z(x,theta)).
/// Geometric panels resolve branch-squeezed scales; xmax must cover the
/// integrand's decay.
class PolarQuadrature {
public:
    PolarQuadrature(const ExactModelParams& pr, int ntheta, double xmax, double xmin,
                    int npanels);
    cplx integrate(const std::function<cplx(double, double)>& f) const;
    double integrate_real(const std::function<double(double, double)>& f) const;

private:
    double beta_omega_;
    std::vector<double> cos_, sin_;   // theta nodes
    std::vector<double> x_, wx_;      // radial nodes/weights
    double m_, omega_, beta_;
};

/// Observables of the thermal fig-1 configuration evaluated without grid
/// truncation: the heavy 1/s^2 amplitude tails are integrated with per-angle
/// analytic tail corrections.
class ExactThermalObservables {
public:
    ExactThermalObservables(const ExactModelParams& pr, int ntheta = 512);

    /// Overlap integral of the two branch-rotated thermal amplitudes.
    double branch_overlap(double t) const;
    DensityMatrix quantum_density(double t) const;
    double norm_squared(double t) const;  // quadrature of Tr(Y Y^dag), tails included
    /// Total energy Tr integral(H D) through the analytic density pipeline.
    double energy(double t) const;

    const HybridExactSolution& solution() const { return sol_; }

private:
    ExactModelParams pr_;
    QMat u_;
    std::array<cplx, 2> w_;  // branch amplitudes of the initial column state
    HybridExactSolution sol_;
    int ntheta_;
    std::unique_ptr<PolarQuadrature> energy_quad_;
};

/// Exact solution of the comparison master equation for initial data
/// D0(z) = rho0(beta H0) * K with constant Hermitian K.
class AgExactSolution {
public:
    AgExactSolution(const ExactModelParams& pr, std::function<double(double)> rho0_of_s,
                    const QMat& k0);
    static AgExactSolution thermal(const ExactModelParams& pr);

    QMat value(double q, double p, double t) const;
    double phase(double q, double p, double t) const;
    double classical_density(double q, double p, double t) const;

    /// Quantum marginal for the Boltzmann profile via the angular reduction
    /// (the radial integral is analytic); exact at any t.
    DensityMatrix quantum_marginal(double t, int ntheta = 2048) const;
    double purity(double t, int ntheta = 2048) const;

    /// Brute-force z-grid quadrature of the marginal, for cross-validation;
    /// n must resolve the phase oscillation at the requested time.
    DensityMatrix quantum_marginal_quadrature(double t, int n, double half_width) const;

    /// Tr integral(H D); only the branch-diagonal entries contribute, so the
    /// oscillatory off-diagonal phase never enters the quadrature.
    double total_energy(double t) const;

private:
    ExactModelParams pr_;
    std::function<double(double)> rho0_;
    QMat k0_, u_, p_;  // p = u k0 u^dagger
    double w_[2] = {0.0, 0.0};
    std::unique_ptr<PolarQuadrature> energy_quad_;
};

}  // namespace khs

#endif
