#include "khs/meanfield.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace khs {

double MeanFieldState::quantum_norm() const {
    double s = 0.0;
    for (const cplx& z : quantum) s += std::norm(z);
    return std::sqrt(s);
}

namespace {
// <psi| M |psi> for Hermitian M (real by construction).
double quantum_expectation(const std::vector<cplx>& psi, const QMat& m) {
    cplx s{0.0, 0.0};
    for (int a = 0; a < m.n; ++a)
        for (int b = 0; b < m.n; ++b) s += std::conj(psi[a]) * m.at(a, b) * psi[b];
    return s.real();
}

// effective scalar Hamiltonian h0 + sum_j <psi|M_j psi> V_j
HamiltonianTerm effective_hamiltonian(const MeanFieldState& st, const HybridHamiltonian& h) {
    HamiltonianTerm eff;
    const HamiltonianTerm h0 = h.h0;
    std::vector<std::pair<double, HamiltonianTerm>> weighted;
    for (const auto& c : h.couplings)
        weighted.emplace_back(quantum_expectation(st.quantum, c.mat), c.v);
    eff.value = [h0, weighted](double q, double p) {
        double s = h0(q, p);
        for (const auto& [w, v] : weighted) s += w * v(q, p);
        return s;
    };
    eff.gradient = [h0, weighted](double q, double p) {
        auto g = h0.grad(q, p);
        for (const auto& [w, v] : weighted) {
            const auto gv = v.grad(q, p);
            g[0] += w * gv[0];
            g[1] += w * gv[1];
        }
        return g;
    };
    return eff;
}
}  // namespace

QMat meanfield_quantum_generator(const ScalarField& psi, const HybridHamiltonian& h,
                                 const GaugePotential& g, const SpectralWorkspace& ws,
                                 double hbar) {
    // G = e0 I + sum_j e_j M_j with e = <psi_cl, L_term psi_cl>
    QMat gen = kvh_energy_inner(psi, h.h0, g, ws, hbar) * QMat::identity(h.n);
    for (const auto& c : h.couplings)
        gen = gen + kvh_energy_inner(psi, c.v, g, ws, hbar) * c.mat;
    return gen;
}

MeanFieldRhs meanfield_rhs(const MeanFieldState& st, const HybridHamiltonian& h,
                           const GaugePotential& g, const SpectralWorkspace& ws, double hbar) {
    if (static_cast<int>(st.quantum.size()) != h.n)
        throw std::invalid_argument("meanfield_rhs: quantum dimension mismatch");
    MeanFieldRhs out;
    KvhOperator op(effective_hamiltonian(st, h), g, ws, hbar);
    out.d_classical = op.rhs(st.classical);

    const QMat gen = meanfield_quantum_generator(st.classical, h, g, ws, hbar);
    out.d_quantum.assign(h.n, cplx{0.0, 0.0});
    const cplx mi_over_h{0.0, -1.0 / hbar};
    for (int a = 0; a < h.n; ++a) {
        cplx s{0.0, 0.0};
        for (int b = 0; b < h.n; ++b) s += gen.at(a, b) * st.quantum[b];
        out.d_quantum[a] = mi_over_h * s;
    }
    return out;
}

MeanFieldState step_meanfield_rk4(const MeanFieldState& st, const HybridHamiltonian& h,
                                  const GaugePotential& g, const SpectralWorkspace& ws,
                                  double hbar, double dt, double cfl_safety) {
    if (dt == 0.0) return st;
    {
        KvhOperator probe(effective_hamiltonian(st, h), g, ws, hbar);
        const double bound = cfl_max_dt(probe, cfl_safety);
        if (std::abs(dt) > bound) {
            std::ostringstream os;
            os << "step_meanfield_rk4: dt=" << dt << " exceeds CFL bound " << bound;
            throw std::invalid_argument(os.str());
        }
    }
    auto lin = [&](const MeanFieldState& x, double s, const MeanFieldRhs& k) {
        MeanFieldState out = x;
        axpy(out.classical, s, k.d_classical);
        for (std::size_t a = 0; a < out.quantum.size(); ++a)
            out.quantum[a] += s * k.d_quantum[a];
        return out;
    };
    const MeanFieldRhs k1 = meanfield_rhs(st, h, g, ws, hbar);
    const MeanFieldRhs k2 = meanfield_rhs(lin(st, 0.5 * dt, k1), h, g, ws, hbar);
    const MeanFieldRhs k3 = meanfield_rhs(lin(st, 0.5 * dt, k2), h, g, ws, hbar);
    const MeanFieldRhs k4 = meanfield_rhs(lin(st, dt, k3), h, g, ws, hbar);
    MeanFieldState out = lin(st, dt / 6.0, k1);
    out = lin(out, dt / 3.0, k2);
    out = lin(out, dt / 3.0, k3);
    out = lin(out, dt / 6.0, k4);
    return out;
}

double meanfield_energy(const MeanFieldState& st, const HybridHamiltonian& h,
                        const GaugePotential& g, const SpectralWorkspace& ws, double hbar) {
    return kvh_energy(st.classical, effective_hamiltonian(st, h), g, ws, hbar);
}

}  // namespace khs
