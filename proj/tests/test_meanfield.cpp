#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "khs/exact.hpp"
#include "khs/meanfield.hpp"
#include "test_helpers.hpp"

using namespace khs;
constexpr double kPi = std::numbers::pi;

namespace {
ExactModelParams fig_params() {
    ExactModelParams pr;
    pr.alpha = {0.95, 0.0, 0.0};
    pr.beta = 1e5;
    return pr;
}

HybridHamiltonian spin_osc(const ExactModelParams& pr) {
    return HybridHamiltonian::spin_oscillator(pr.m, pr.omega, pr.alpha, half_q_squared());
}

MeanFieldState gaussian_state(const PhaseSpaceGrid& g, double sd, std::vector<cplx> psi) {
    MeanFieldState st;
    st.classical = khs::test::gaussian_field(g, 2 * sd, 2 * sd, 4 * sd, -2 * sd);
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j)
            st.classical.v[g.idx(i, j)] *=
                std::exp(cplx{0.0, (0.5 * g.q(i) + 0.3 * g.p(j)) / sd});
    scale(st.classical, 1.0 / norm_l2(st.classical));
    double n = 0;
    for (auto& z : psi) n += std::norm(z);
    for (auto& z : psi) z /= std::sqrt(n);
    st.quantum = std::move(psi);
    return st;
}
}  // namespace

TEST_CASE("scalar hamiltonian decouples the two factors") {
    ExactModelParams pr = fig_params();
    pr.alpha = {0.0, 0.0, 0.0};
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 40 * sd, 40 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    auto st = gaussian_state(g, sd, {cplx{0.8, 0.0}, cplx{0.0, 0.6}});
    const auto st0 = st;
    for (int s = 0; s < 200; ++s) st = step_meanfield_rk4(st, hh, gauge, ws, pr.hbar, 1e-3);

    // quantum factor evolves by a pure phase
    cplx overlap{0.0, 0.0};
    double n = 0.0;
    for (std::size_t a = 0; a < st.quantum.size(); ++a) {
        overlap += std::conj(st0.quantum[a]) * st.quantum[a];
        n += std::norm(st.quantum[a]);
    }
    CHECK(std::abs(std::abs(overlap) - 1.0) < 1e-10);
    CHECK(std::abs(n - 1.0) < 1e-12);

    // classical factor follows the scalar flow
    const KvhOperator op(harmonic_term(pr.m, pr.omega), gauge, ws, pr.hbar);
    auto psi = st0.classical;
    for (int s = 0; s < 200; ++s) psi = step_rk4(op, psi, 1e-3);
    CHECK(max_abs_diff(psi, st.classical) < 1e-12);
}

TEST_CASE("spin-up state feels no transverse coupling") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 40 * sd, 40 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    const auto st = gaussian_state(g, sd, {cplx{1.0, 0.0}, cplx{0.0, 0.0}});
    // <up| alpha.sigma |up> = alpha_3 = 0, so the effective flow is the bare
    // oscillator
    const auto rhs = meanfield_rhs(st, hh, gauge, ws, pr.hbar);
    const KvhOperator op(harmonic_term(pr.m, pr.omega), gauge, ws, pr.hbar);
    const auto ref = op.rhs(st.classical);
    CHECK(max_abs_diff(rhs.d_classical, ref) < 1e-14 * std::max(1.0, max_abs(ref)));

    const QMat gen = meanfield_quantum_generator(st.classical, hh, gauge, ws, pr.hbar);
    CHECK(gen.herm_deviation() < 1e-10 * std::max(1.0, gen.max_abs()));
}

TEST_CASE("stepping: identity at dt = 0 and stationary radial state") {
    ExactModelParams pr = fig_params();
    pr.alpha = {0.0, 0.0, 0.0};
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 40 * sd, 40 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    MeanFieldState st;
    st.classical = khs::test::gaussian_field(g, 3 * sd, 3 * sd);
    scale(st.classical, 1.0 / norm_l2(st.classical));
    st.quantum = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};

    const auto same = step_meanfield_rk4(st, hh, gauge, ws, pr.hbar, 0.0);
    CHECK(max_abs_diff(same.classical, st.classical) == 0.0);

    auto cur = st;
    for (int s = 0; s < 2500; ++s) cur = step_meanfield_rk4(cur, hh, gauge, ws, pr.hbar, 4e-3);
    // radial gaussian is stationary under the decoupled rotation
    CHECK(max_abs_diff(cur.classical, st.classical) < 1e-8);
    CHECK(std::abs(cur.quantum[0] * std::conj(cur.quantum[0]) - 1.0) < 1e-12);
}

TEST_CASE("purity of the factorized quantum state is pinned at one") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 40 * sd, 40 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    auto st = gaussian_state(g, sd, {cplx{0.8, 0.1}, cplx{-0.2, 0.55}});
    for (int s = 0; s < 500; ++s) {
        st = step_meanfield_rk4(st, hh, gauge, ws, pr.hbar, 1e-3);
        if (s % 100 == 0) {
            DensityMatrix rho;
            rho.rho = QMat(2);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b)
                    rho.rho.at(a, b) = st.quantum[a] * std::conj(st.quantum[b]);
            CHECK(std::abs(purity(rho) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("energy is conserved along the coupled flow") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 40 * sd, 40 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    auto st = gaussian_state(g, sd, {cplx{0.7, 0.0}, cplx{0.5, 0.4}});
    const double e0 = meanfield_energy(st, hh, gauge, ws, pr.hbar);
    for (int s = 0; s < 1000; ++s) st = step_meanfield_rk4(st, hh, gauge, ws, pr.hbar, 1e-3);
    const double e1 = meanfield_energy(st, hh, gauge, ws, pr.hbar);
    CHECK(std::abs(e1 - e0) < 1e-8 * std::max(std::abs(e0), 1e-6));
    CHECK(std::abs(norm_l2(st.classical) - 1.0) < 1e-9);
}

TEST_CASE("closure densities obey the coupled density equations") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 40 * sd, 40 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    const auto st0 = gaussian_state(g, sd, {cplx{0.7, 0.0}, cplx{0.5, 0.4}});
    // march to a generic time
    auto mid = st0;
    for (int s = 0; s < 300; ++s) mid = step_meanfield_rk4(mid, hh, gauge, ws, pr.hbar, 1e-3);

    auto rho_class = [&](const MeanFieldState& s) {
        return clebsch_density(s.classical, gauge, ws, pr.hbar);
    };
    auto rho_quant = [&](const MeanFieldState& s) {
        QMat r(2);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) r.at(a, b) = s.quantum[a] * std::conj(s.quantum[b]);
        return r;
    };

    std::vector<double> cres, qres;
    for (const double dt : {2e-3, 1e-3}) {
        const int sub = static_cast<int>(std::round(dt / 1e-3));
        auto plus = mid, minus = mid;
        for (int s = 0; s < sub; ++s) plus = step_meanfield_rk4(plus, hh, gauge, ws, pr.hbar, 1e-3);
        for (int s = 0; s < sub; ++s)
            minus = step_meanfield_rk4(minus, hh, gauge, ws, pr.hbar, -1e-3);

        // classical side: d rho/dt = {Tr(rho_hat H), rho}
        const auto rp = rho_class(plus), rm = rho_class(minus), r0 = rho_class(mid);
        const QMat rq = rho_quant(mid);
        const auto grad_r = ws.gradient(r0);
        double worst_c = 0.0;
        for (int i = 0; i < g.nq; ++i)
            for (int j = 0; j < g.np; ++j) {
                const std::size_t id = g.idx(i, j);
                const double q = g.q(i), p = g.p(j);
                // Tr(rho_hat H)(z) = h0 + sum_j <M_j> V_j with analytic grads
                auto gh = hh.h0.grad(q, p);
                double wq = gh[0], wp = gh[1];
                for (const auto& cc : hh.couplings) {
                    cplx m{0.0, 0.0};
                    for (int a = 0; a < 2; ++a)
                        for (int b = 0; b < 2; ++b) m += cc.mat.at(a, b) * rq.at(b, a);
                    const auto gv = cc.v.grad(q, p);
                    wq += m.real() * gv[0];
                    wp += m.real() * gv[1];
                }
                const double br =
                    wq * grad_r.p_comp.v[id].real() - wp * grad_r.q_comp.v[id].real();
                const double fd = (rp.v[id].real() - rm.v[id].real()) / (2 * dt);
                worst_c = std::max(worst_c, std::abs(fd - br));
            }
        cres.push_back(worst_c);

        // quantum side: i hbar d rho_hat/dt = [integral(rho H), rho_hat]
        const QMat gen = meanfield_quantum_generator(mid.classical, hh, gauge, ws, pr.hbar);
        const QMat qp = rho_quant(plus), qm = rho_quant(minus);
        const QMat comm = commutator(gen, rho_quant(mid));
        double worst_q = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const cplx fd = (qp.at(a, b) - qm.at(a, b)) / (2 * dt);
                worst_q = std::max(worst_q,
                                   std::abs(fd - comm.at(a, b) / cplx{0.0, pr.hbar}));
            }
        qres.push_back(worst_q);
    }
    CHECK(cres[0] / cres[1] == doctest::Approx(4.0).epsilon(0.15));
    CHECK(qres[0] / qres[1] == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("thermal column state freezes the mean-field bloch vector") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(256, 256, 20 * sd, 20 * sd);
    SpectralWorkspace ws(g);
    const auto gauge = GaugePotential::harmonic_oscillator();
    const auto hh = spin_osc(pr);

    MeanFieldState st;
    const auto y0 = thermal_initial_state(pr, g);
    st.classical = y0.comp[0];
    scale(st.classical, 1.0 / norm_l2(st.classical));
    st.quantum = {cplx{1.0, 0.0}, cplx{0.0, 0.0}};

    // <up|sigma_1|up> = 0 keeps the effective hamiltonian scalar, and the
    // quantum generator is zero for the real radial classical factor, so the
    // bloch vector cannot move
    auto cur = st;
    double worst = 0.0;
    for (int s = 0; s < 100; ++s) {
        cur = step_meanfield_rk4(cur, hh, gauge, ws, pr.hbar, 1e-3);
        const double nx = 2 * (cur.quantum[0] * std::conj(cur.quantum[1])).real();
        const double ny = 2 * (cur.quantum[0] * std::conj(cur.quantum[1])).imag();
        const double nz =
            std::norm(cur.quantum[0]) - std::norm(cur.quantum[1]);
        worst = std::max({worst, std::abs(nx), std::abs(ny), std::abs(nz - 1.0)});
    }
    CHECK(worst < 1e-8);
}
