#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "khs/exact.hpp"
#include "khs/hybrid.hpp"
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
}  // namespace

TEST_CASE("coupling diagonalization: reference cases and convention") {
    auto d = diagonalize_coupling({0.0, 0.0, 2.0});
    CHECK(d.lambda == doctest::Approx(2.0));
    CHECK(std::abs(d.u.at(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(d.u.at(0, 1)) < 1e-14);
    CHECK(std::abs(d.u.at(1, 1) - 1.0) < 1e-14);

    d = diagonalize_coupling({0.95, 0.0, 0.0});
    CHECK(d.lambda == doctest::Approx(0.95));
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(d.u.at(0, 0) - r) < 1e-14);
    CHECK(std::abs(d.u.at(0, 1) - r) < 1e-14);
    CHECK(std::abs(d.u.at(1, 0) - r) < 1e-14);
    CHECK(std::abs(d.u.at(1, 1) + r) < 1e-14);

    CHECK_THROWS_AS(diagonalize_coupling({0.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("coupling diagonalization: randomized property") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<double, 3> a{u(rng), u(rng), u(rng)};
        if (std::abs(a[0]) + std::abs(a[1]) + std::abs(a[2]) < 1e-3) continue;
        const auto d = diagonalize_coupling(a);
        CHECK(d.lambda ==
              doctest::Approx(std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2])));
        const QMat lhs = d.u * alpha_dot_sigma(a) * d.u.dagger();
        QMat target = d.lambda * QMat::pauli(3);
        CHECK((lhs - target).max_abs() < 1e-12);
        const QMat uu = d.u * d.u.dagger();
        CHECK((uu - QMat::identity(2)).max_abs() < 1e-12);
        // rows lead with a real positive entry
        for (int row = 0; row < 2; ++row) {
            const cplx lead = (std::abs(d.u.at(row, 0)) > 1e-14) ? d.u.at(row, 0)
                                                                 : d.u.at(row, 1);
            CHECK(std::abs(lead.imag()) < 1e-12);
            CHECK(lead.real() > 0.0);
        }
    }
    // degenerate orientation alpha = (0,0,-lam)
    const auto dz = diagonalize_coupling({0.0, 0.0, -1.3});
    const QMat lhs = dz.u * alpha_dot_sigma({0.0, 0.0, -1.3}) * dz.u.dagger();
    CHECK((lhs - 1.3 * QMat::pauli(3)).max_abs() < 1e-12);
}

TEST_CASE("branch frequencies of the reference coupling") {
    const auto pr = fig_params();
    CHECK(pr.omega_plus() == doctest::Approx(1.3964240043768943).epsilon(1e-12));
    CHECK(pr.omega_minus() == doctest::Approx(0.22360679774997896).epsilon(1e-12));
    ExactModelParams bad = pr;
    bad.alpha = {1.5, 0.0, 0.0};
    CHECK_THROWS_AS(bad.omega_minus(), std::domain_error);
}

TEST_CASE("thermal profile: series limit and derivative") {
    CHECK(thermal_profile(0.0) == doctest::Approx(0.5).epsilon(1e-14));
    // continuity across the series/closed-form switch
    CHECK(thermal_profile(0.5 - 1e-9) == doctest::Approx(thermal_profile(0.5 + 1e-9)));
    CHECK(thermal_profile_deriv(0.0) == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    for (double s : {0.1, 0.3, 0.7, 2.0, 10.0}) {
        const double e = 1e-6;
        const double fd = (thermal_profile(s + e) - thermal_profile(s - e)) / (2 * e);
        CHECK(thermal_profile_deriv(s) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("thermal state: origin values and marginals") {
    const auto pr = fig_params();
    // |Y(0,0)|^2 = omega beta / 4 pi
    const double a0 = thermal_amplitude(pr, 0.0, 0.0);
    CHECK(a0 * a0 == doctest::Approx(pr.omega * pr.beta / (4 * kPi)).epsilon(1e-12));

    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(256, 256, 20 * sd, 20 * sd);
    const auto y0 = thermal_initial_state(pr, g);
    auto yn = y0;
    normalize(yn);
    const auto rho = quantum_density(yn);
    CHECK(rho.rho.at(0, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(rho.rho.at(1, 1)) < 1e-14);
    CHECK(std::abs(rho.rho.at(0, 1)) < 1e-14);

    // errors: unresolved grid, bad beta
    const auto coarse = make_grid(32, 32, 20 * sd, 20 * sd);
    CHECK_THROWS_AS(thermal_initial_state(pr, coarse), std::invalid_argument);
    ExactModelParams bad = pr;
    bad.beta = -1.0;
    CHECK_THROWS_AS(thermal_initial_state(bad, g), std::invalid_argument);
}

TEST_CASE("amplitude_from_density reproduces the thermal closed form") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 20 * sd, 20 * sd);
    const double c = pr.omega * pr.beta / (2 * kPi);
    const auto amp = amplitude_from_density([&](double s) { return c * std::exp(-s); }, pr, g);
    double worst = 0.0;
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) {
            const double ref = thermal_amplitude(pr, g.q(i), g.p(j));
            worst = std::max(worst,
                             std::abs(amp.v[g.idx(i, j)].real() - ref) / ref);
        }
    CHECK(worst < 1e-10);

    const auto zero = amplitude_from_density([](double) { return 0.0; }, pr, g);
    CHECK(max_abs(zero) == 0.0);

    CHECK_THROWS_AS(amplitude_from_density([](double s) { return 0.5 - s; }, pr, g),
                    std::invalid_argument);
}

TEST_CASE("amplitude_from_density on a hard-edged disc target") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(128, 128, 20 * sd, 20 * sd);
    const double edge = 30.0;  // s <= edge
    const auto amp =
        amplitude_from_density([&](double s) { return s <= edge ? 1.0 : 0.0; }, pr, g);
    // closed form: u(s) = min(s,edge)^2 / (2 s^2)
    double worst = 0.0;
    for (int i = 0; i < g.nq; ++i)
        for (int j = 0; j < g.np; ++j) {
            const double q = g.q(i), p = g.p(j);
            const double s = pr.beta * (q * q + p * p) / 2;
            const double u = (s < 1e-30) ? 0.5 : std::min(s, edge) * std::min(s, edge) /
                                                     (2 * s * s);
            worst = std::max(worst, std::abs(amp.v[g.idx(i, j)].real() - std::sqrt(u)));
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("exact hybrid solution: identity at t = 0 and stationarity at alpha = 0") {
    auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);

    ExactModelParams pr0 = pr;
    pr0.alpha = {0.0, 0.0, 0.0};
    ExactThermalObservables obs0(pr0, 128);
    const auto& sol0 = obs0.solution();
    for (double t : {0.0, 1.7, 6.3}) {
        for (double q : {0.0, 2 * sd, -5 * sd}) {
            const auto v = sol0.value(q, 3 * sd, t);
            const auto v0 = sol0.value(q, 3 * sd, 0.0);
            CHECK(std::abs(v[0] - v0[0]) < 1e-10 * std::abs(v0[0]));
            CHECK(std::abs(v[1]) < 1e-14);
        }
    }

    ExactThermalObservables obs(pr, 128);
    const auto& sol = obs.solution();
    const auto vat = sol.value(2 * sd, -sd, 0.0);
    CHECK(std::abs(vat[0] - thermal_amplitude(pr, 2 * sd, -sd)) < 1e-12 * std::abs(vat[0]));
    CHECK(std::abs(vat[1]) < 1e-14);
}

TEST_CASE("slow branch recurs after its own period") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    std::array<ClosedFormField, 2> branch{
        ClosedFormField{[](double, double) { return cplx{0.0, 0.0}; },
                        [](double, double) {
                            return std::array<cplx, 2>{cplx{0.0, 0.0}, cplx{0.0, 0.0}};
                        }},
        scaled_gaussian(pr.m, pr.omega_minus(), 5 * sd, -2 * sd, 2 * sd)};
    const auto sol = HybridExactSolution::from_branch_data(pr, branch);
    const double period = 2 * kPi / pr.omega_minus();
    for (double q : {0.0, 3 * sd}) {
        const auto a = sol.value(q, 4 * sd, 0.0);
        const auto b = sol.value(q, 4 * sd, period);
        CHECK(std::abs(a[0] - b[0]) < 1e-12);
        CHECK(std::abs(a[1] - b[1]) < 1e-12);
    }
}

TEST_CASE("exact density pipeline: initial state and norm invariance") {
    const auto pr = fig_params();
    ExactThermalObservables obs(pr);
    const double sd = 1.0 / std::sqrt(pr.beta);
    // D(z, 0) = boltzmann * diag(1, 0)
    for (double q : {0.0, sd, 3 * sd}) {
        const QMat d0 = obs.solution().density(q, -2 * sd, 0.0);
        const double rho =
            pr.omega * pr.beta / (2 * kPi) *
            std::exp(-pr.beta * (q * q + 4 * sd * sd) / 2);
        CHECK(d0.at(0, 0).real() == doctest::Approx(rho).epsilon(1e-9));
        CHECK(std::abs(d0.at(1, 1)) < 1e-9 * rho);
        CHECK(std::abs(d0.at(0, 1)) < 1e-9 * rho);
    }
    // norm of the exact state is time-invariant through the tail-aware route
    const double n0 = obs.norm_squared(0.0);
    CHECK(n0 == doctest::Approx(1.0).epsilon(1e-10));
    for (double t : {2.4, 5.7, 8.8})
        CHECK(std::abs(obs.norm_squared(t) - n0) < 1e-9);
}

TEST_CASE("exact thermal observables: purity and bloch trajectory") {
    const auto pr = fig_params();
    ExactThermalObservables obs(pr, 512);
    const auto r0 = obs.quantum_density(0.0);
    CHECK(purity(r0) == doctest::Approx(1.0).epsilon(1e-10));
    auto n0 = bloch_vector(r0);
    CHECK(std::abs(n0[0]) < 1e-10);
    CHECK(std::abs(n0[1]) < 1e-10);
    CHECK(n0[2] == doctest::Approx(1.0).epsilon(1e-10));

    // regression against an independently computed fine-quadrature overlap
    CHECK(obs.branch_overlap(2.4) == doctest::Approx(0.723228).epsilon(2e-5));
    CHECK(purity(obs.quantum_density(2.4)) == doctest::Approx(0.761529).epsilon(5e-5));
    CHECK(purity(obs.quantum_density(5.7)) == doctest::Approx(0.584069).epsilon(5e-4));
    CHECK(purity(obs.quantum_density(8.8)) == doctest::Approx(0.636370).epsilon(5e-4));

    // bloch stays in the n_x = 0 plane and on the z axis for this model
    for (double t : {1.1, 4.2, 7.9}) {
        const auto n = bloch_vector(obs.quantum_density(t));
        CHECK(std::abs(n[0]) < 1e-9);
        CHECK(std::abs(n[1]) < 1e-9);
    }

    // cross-check the overlap against a large truncated grid quadrature
    const double sd = 1.0 / std::sqrt(pr.beta);
    const int n = 1024;
    const double l = 60 * sd, d = 2 * l / n;
    const auto mp = branch_rotation(pr.m, pr.omega_plus(), 2.4);
    const auto mm = branch_rotation(pr.m, pr.omega_minus(), 2.4);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double q = -l + d * i;
        for (int j = 0; j < n; ++j) {
            const double p = -l + d * j;
            acc += thermal_amplitude(pr, mp[0] * q + mp[1] * p, mp[2] * q + mp[3] * p) *
                   thermal_amplitude(pr, mm[0] * q + mm[1] * p, mm[2] * q + mm[3] * p);
        }
    }
    acc *= d * d;
    // truncation of the 1/s amplitude tails limits the grid value
    CHECK(obs.branch_overlap(2.4) == doctest::Approx(acc).epsilon(5e-3));
}

TEST_CASE("exact comparison dynamics: phase values and limits") {
    const auto pr = fig_params();
    const auto ag = AgExactSolution::thermal(pr);
    CHECK(ag.phase(0.0, 0.0, 3.7) == 0.0);
    // m = omega = hbar = 1, lambda = 0.95, z = (1,0), t = pi
    CHECK(ag.phase(1.0, 0.0, kPi) == doctest::Approx(-0.95 * kPi / 2).epsilon(1e-12));
    CHECK(ag.phase(1.0, 0.0, kPi) == doctest::Approx(-1.4922565104551517).epsilon(1e-10));
}

TEST_CASE("exact comparison dynamics: t = 0 identity and hermiticity") {
    const auto pr = fig_params();
    const auto ag = AgExactSolution::thermal(pr);
    const double sd = 1.0 / std::sqrt(pr.beta);
    for (double q : {0.0, 2 * sd}) {
        const QMat v = ag.value(q, -3 * sd, 0.0);
        const double rho = pr.omega * pr.beta / (2 * kPi) *
                           std::exp(-pr.beta * (q * q + 9 * sd * sd) / 2);
        CHECK(v.at(0, 0).real() == doctest::Approx(rho).epsilon(1e-12));
        CHECK(std::abs(v.at(1, 1)) < 1e-14 * rho);
        CHECK(v.herm_deviation() < 1e-14 * rho);
    }
    for (double t : {0.9, 12.0}) {
        const QMat v = ag.value(2 * sd, sd, t);
        CHECK(v.herm_deviation() < 1e-12 * std::max(1.0, v.max_abs()));
    }
}

TEST_CASE("comparison quantum marginal: reduction vs quadrature") {
    const auto pr = fig_params();
    const auto ag = AgExactSolution::thermal(pr);
    CHECK(ag.purity(0.0) == doctest::Approx(1.0).epsilon(1e-12));

    const double sd = 1.0 / std::sqrt(pr.beta);
    for (double t : {50.0, 2000.0}) {
        const auto red = ag.quantum_marginal(t);
        const auto quad = ag.quantum_marginal_quadrature(t, 768, 40 * sd);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                CHECK(std::abs(red.rho.at(a, b) - quad.rho.at(a, b)) < 1e-7);
    }

    // relaxation values fixed by the angular reduction
    CHECK(ag.purity(2000.0) == doctest::Approx(0.999820).epsilon(1e-4));
    CHECK(ag.purity(5e5) == doctest::Approx(0.521220).epsilon(1e-4));
    CHECK(ag.purity(1e6) == doctest::Approx(0.505479).epsilon(1e-4));
}

TEST_CASE("hybrid and comparison dynamics share the classical density") {
    const auto pr = fig_params();
    ExactThermalObservables obs(pr, 128);
    const auto ag = AgExactSolution::thermal(pr);
    const double sd = 1.0 / std::sqrt(pr.beta);
    double worst = 0.0;
    const double rho_max = pr.omega * pr.beta / (2 * kPi);
    for (double t : {0.0, 2.4, 5.7, 8.8}) {
        for (double q : {0.0, 1.5 * sd, -4 * sd, 9 * sd}) {
            for (double p : {0.5 * sd, -2 * sd, 6 * sd}) {
                const double a = obs.solution().classical_density(q, p, t);
                const double b = ag.classical_density(q, p, t);
                worst = std::max(worst, std::abs(a - b) / rho_max);
            }
        }
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("grid-sampled exact evolution matches the closed form on smooth data") {
    const auto pr = fig_params();
    const double sd = 1.0 / std::sqrt(pr.beta);
    const auto g = make_grid(256, 256, 56 * sd, 56 * sd);
    std::array<ClosedFormField, 2> lab{scaled_gaussian(pr.m, pr.omega_plus(), 5 * sd, 0.0, 8 * sd),
                                       scaled_gaussian(pr.m, pr.omega_minus(), -4 * sd, 3 * sd, 8 * sd)};
    const HybridExactSolution sol(pr, lab);
    const auto y0 = sol.sample(g, 0.0);
    const double t = 0.8;
    double worst = 0.0;
    for (int i = 60; i < 200; i += 7)
        for (int j = 60; j < 200; j += 7) {
            const auto a = hybrid_exact_grid(pr, y0, g.q(i), g.p(j), t);
            const auto b = sol.value(g.q(i), g.p(j), t);
            worst = std::max(worst, std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]));
        }
    CHECK(worst < 1e-5);
}
