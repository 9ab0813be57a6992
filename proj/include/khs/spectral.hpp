#ifndef KHS_SPECTRAL_HPP
#define KHS_SPECTRAL_HPP

#include <memory>
#include <vector>

#include "khs/field.hpp"
#include "khs/grid.hpp"

namespace khs {

/// FFT-based calculus on one grid. Owns the FFTW plans; derivative of the
/// Nyquist mode is zeroed so derivatives of real fields stay real.
class SpectralWorkspace {
public:
    explicit SpectralWorkspace(const PhaseSpaceGrid& g);
    ~SpectralWorkspace();
    SpectralWorkspace(const SpectralWorkspace&) = delete;
    SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

    const PhaseSpaceGrid& grid() const { return grid_; }

    std::vector<cplx> forward(const ScalarField& f) const;
    ScalarField inverse(const std::vector<cplx>& hat) const;

    ScalarField deriv_q(const ScalarField& f) const;
    ScalarField deriv_p(const ScalarField& f) const;
    void deriv_both(const ScalarField& f, ScalarField& dq_out, ScalarField& dp_out) const;

    VectorField gradient(const ScalarField& f) const;
    ScalarField divergence(const VectorField& v) const;

    /// {f,g} = dq(f) dp(g) - dp(f) dq(g); optional 2/3-rule dealiasing of the
    /// two products.
    ScalarField poisson_bracket(const ScalarField& f, const ScalarField& g,
                                bool dealias = false) const;

    /// Zero all modes with |k| above 2/3 of the maximum in either direction.
    void dealias_23(ScalarField& f) const;
    ScalarField multiply_dealiased(const ScalarField& a, const ScalarField& b) const;

    const std::vector<double>& kq() const { return kq_; }
    const std::vector<double>& kp() const { return kp_; }

private:
    PhaseSpaceGrid grid_;
    std::vector<double> kq_, kp_;
    void* plan_fwd_ = nullptr;
    void* plan_bwd_ = nullptr;
};

}  // namespace khs

#endif
