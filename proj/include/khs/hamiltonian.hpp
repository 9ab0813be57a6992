#ifndef KHS_HAMILTONIAN_HPP
#define KHS_HAMILTONIAN_HPP

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "khs/field.hpp"

namespace khs {

/// Real Hamiltonian function on phase space with an analytic gradient.
struct HamiltonianTerm {
    std::function<double(double, double)> value;
    std::function<std::array<double, 2>(double, double)> gradient;
    /// (d2/dq2, d2/dqdp, d2/dp2); required by the density-evolution kernels.
    std::function<std::array<double, 3>(double, double)> hessian;
    bool is_quadratic_homogeneous = false;

    /// Set for p^2/2m + m w^2 q^2/2 terms so characteristic solvers can
    /// recover the oscillator frequency.
    struct OscillatorShape {
        double mass;
        double omega;
    };
    std::optional<OscillatorShape> oscillator;

    double operator()(double q, double p) const { return value(q, p); }
    std::array<double, 2> grad(double q, double p) const { return gradient(q, p); }
};

HamiltonianTerm constant_term(double c);
HamiltonianTerm kinetic_term(double mass);                    // p^2/2m
HamiltonianTerm harmonic_term(double mass, double omega);     // p^2/2m + m w^2 q^2/2
HamiltonianTerm half_q_squared();                             // q^2/2

/// Polynomial in (q,p): sum of c * q^a p^b monomials, analytic gradient.
struct Monomial {
    int a;
    int b;
    double c;
};
HamiltonianTerm polynomial_term(std::vector<Monomial> monomials);

/// Construction-time invariant: gradient must match central differences of
/// the value to 1e-6 relative at a handful of probe points.
void spot_check_gradient(const HamiltonianTerm& h, double scale);

}  // namespace khs

#endif
