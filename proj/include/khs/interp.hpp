#ifndef KHS_INTERP_HPP
#define KHS_INTERP_HPP

#include "khs/field.hpp"

namespace khs {

/// Piecewise-cubic Lagrange interpolation (4x4 tensor stencil) with periodic
/// wrap. Exact at grid nodes, fourth-order accurate for smooth fields.
cplx bicubic_periodic(const ScalarField& f, double q, double p);

}  // namespace khs

#endif
