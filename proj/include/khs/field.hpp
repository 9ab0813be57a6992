#ifndef KHS_FIELD_HPP
#define KHS_FIELD_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "khs/grid.hpp"

namespace khs {

using cplx = std::complex<double>;

/// Complex scalar field sampled on a PhaseSpaceGrid.
struct ScalarField {
    PhaseSpaceGrid grid;
    std::vector<cplx> v;

    ScalarField() = default;
    explicit ScalarField(const PhaseSpaceGrid& g) : grid(g), v(g.size(), cplx{0.0, 0.0}) {}

    cplx& at(int iq, int ip) { return v[grid.idx(iq, ip)]; }
    const cplx& at(int iq, int ip) const { return v[grid.idx(iq, ip)]; }
    std::size_t size() const { return v.size(); }
};

struct VectorField {
    ScalarField q_comp;
    ScalarField p_comp;

    VectorField() = default;
    explicit VectorField(const PhaseSpaceGrid& g) : q_comp(g), p_comp(g) {}
    const PhaseSpaceGrid& grid() const { return q_comp.grid; }
};

/// Sample a pointwise function f(q,p) onto a field.
ScalarField sample_field(const PhaseSpaceGrid& g, const std::function<cplx(double, double)>& f);
ScalarField sample_real_field(const PhaseSpaceGrid& g,
                              const std::function<double(double, double)>& f);

// ---- deterministic reductions -------------------------------------------

/// Pairwise sum, fixed association order independent of threading.
cplx pairwise_sum(const cplx* data, std::size_t n);
double pairwise_sum(const double* data, std::size_t n);

/// Uniform quadrature sum(f) * dq * dp with pairwise reduction.
cplx integrate(const ScalarField& f);

/// integrate(conj(a) * b)
cplx inner_product(const ScalarField& a, const ScalarField& b);

double norm_l2(const ScalarField& f);
double max_abs(const ScalarField& f);

/// Largest |f| over the outermost node ring; used for the decay warning.
double boundary_ring_max(const ScalarField& f);

// ---- elementwise helpers --------------------------------------------------

void axpy(ScalarField& y, cplx a, const ScalarField& x);  // y += a*x
void scale(ScalarField& f, cplx a);
ScalarField multiply(const ScalarField& a, const ScalarField& b);
ScalarField conjugate(const ScalarField& a);
ScalarField abs_squared(const ScalarField& a);  // real values stored in cplx
ScalarField add(const ScalarField& a, const ScalarField& b);
ScalarField sub(const ScalarField& a, const ScalarField& b);
ScalarField scaled(const ScalarField& a, cplx s);

double max_abs_diff(const ScalarField& a, const ScalarField& b);
double max_imag(const ScalarField& a);

bool all_finite(const ScalarField& f);

}  // namespace khs

#endif
