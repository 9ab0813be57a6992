#include "khs/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>

namespace khs {

namespace {
std::vector<double> wavenumbers(int n, double length) {
    std::vector<double> k(n);
    const double base = 2.0 * std::numbers::pi / length;
    for (int i = 0; i < n / 2; ++i) k[i] = base * i;
    for (int i = n / 2; i < n; ++i) k[i] = base * (i - n);
    k[n / 2] = 0.0;  // Nyquist derivative convention
    return k;
}
}  // namespace

SpectralWorkspace::SpectralWorkspace(const PhaseSpaceGrid& g)
    : grid_(g), kq_(wavenumbers(g.nq, 2.0 * g.lq)), kp_(wavenumbers(g.np, 2.0 * g.lp)) {
    std::vector<cplx> dummy(g.size());
    auto* ptr = reinterpret_cast<fftw_complex*>(dummy.data());
    // FFTW_UNALIGNED lets the plans run on any caller buffer; FFTW_ESTIMATE
    // keeps plan selection independent of runtime timing.
    plan_fwd_ = fftw_plan_dft_2d(g.nq, g.np, ptr, ptr, FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    plan_bwd_ = fftw_plan_dft_2d(g.nq, g.np, ptr, ptr, FFTW_BACKWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
}

SpectralWorkspace::~SpectralWorkspace() {
    if (plan_fwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
    if (plan_bwd_) fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
}

std::vector<cplx> SpectralWorkspace::forward(const ScalarField& f) const {
    require_same_grid(f.grid, grid_, "SpectralWorkspace::forward");
    std::vector<cplx> hat = f.v;
    auto* ptr = reinterpret_cast<fftw_complex*>(hat.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_fwd_), ptr, ptr);
    return hat;
}

ScalarField SpectralWorkspace::inverse(const std::vector<cplx>& hat) const {
    ScalarField out(grid_);
    out.v = hat;
    auto* ptr = reinterpret_cast<fftw_complex*>(out.v.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan_bwd_), ptr, ptr);
    const double inv = 1.0 / static_cast<double>(grid_.size());
    for (auto& z : out.v) z *= inv;
    return out;
}

ScalarField SpectralWorkspace::deriv_q(const ScalarField& f) const {
    std::vector<cplx> hat = forward(f);
    for (int i = 0; i < grid_.nq; ++i) {
        const cplx ik{0.0, kq_[i]};
        for (int j = 0; j < grid_.np; ++j) hat[grid_.idx(i, j)] *= ik;
    }
    return inverse(hat);
}

ScalarField SpectralWorkspace::deriv_p(const ScalarField& f) const {
    std::vector<cplx> hat = forward(f);
    for (int i = 0; i < grid_.nq; ++i) {
        for (int j = 0; j < grid_.np; ++j) hat[grid_.idx(i, j)] *= cplx{0.0, kp_[j]};
    }
    return inverse(hat);
}

void SpectralWorkspace::deriv_both(const ScalarField& f, ScalarField& dq_out,
                                   ScalarField& dp_out) const {
    std::vector<cplx> hat = forward(f);
    std::vector<cplx> hq(hat.size()), hp(hat.size());
    for (int i = 0; i < grid_.nq; ++i) {
        for (int j = 0; j < grid_.np; ++j) {
            const std::size_t id = grid_.idx(i, j);
            hq[id] = hat[id] * cplx{0.0, kq_[i]};
            hp[id] = hat[id] * cplx{0.0, kp_[j]};
        }
    }
    dq_out = inverse(hq);
    dp_out = inverse(hp);
}

VectorField SpectralWorkspace::gradient(const ScalarField& f) const {
    VectorField out(grid_);
    deriv_both(f, out.q_comp, out.p_comp);
    return out;
}

ScalarField SpectralWorkspace::divergence(const VectorField& v) const {
    require_same_grid(v.q_comp.grid, v.p_comp.grid, "divergence");
    ScalarField dq = deriv_q(v.q_comp);
    ScalarField dp = deriv_p(v.p_comp);
    for (std::size_t i = 0; i < dq.v.size(); ++i) dq.v[i] += dp.v[i];
    return dq;
}

ScalarField SpectralWorkspace::poisson_bracket(const ScalarField& f, const ScalarField& g,
                                               bool dealias) const {
    require_same_grid(f.grid, g.grid, "poisson_bracket");
    ScalarField fq(grid_), fp(grid_), gq(grid_), gp(grid_);
    deriv_both(f, fq, fp);
    deriv_both(g, gq, gp);
    if (dealias) {
        dealias_23(fq);
        dealias_23(fp);
        dealias_23(gq);
        dealias_23(gp);
    }
    ScalarField out(grid_);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] = fq.v[i] * gp.v[i] - fp.v[i] * gq.v[i];
    if (dealias) dealias_23(out);
    return out;
}

void SpectralWorkspace::dealias_23(ScalarField& f) const {
    std::vector<cplx> hat = forward(f);
    const int cq = grid_.nq / 3;
    const int cp = grid_.np / 3;
    for (int i = 0; i < grid_.nq; ++i) {
        const int mi = (i <= grid_.nq / 2) ? i : grid_.nq - i;
        for (int j = 0; j < grid_.np; ++j) {
            const int mj = (j <= grid_.np / 2) ? j : grid_.np - j;
            if (mi > cq || mj > cp) hat[grid_.idx(i, j)] = cplx{0.0, 0.0};
        }
    }
    f = inverse(hat);
}

ScalarField SpectralWorkspace::multiply_dealiased(const ScalarField& a,
                                                  const ScalarField& b) const {
    ScalarField da = a, db = b;
    dealias_23(da);
    dealias_23(db);
    ScalarField out = multiply(da, db);
    dealias_23(out);
    return out;
}

}  // namespace khs
