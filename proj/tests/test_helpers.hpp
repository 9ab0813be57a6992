#ifndef KHS_TEST_HELPERS_HPP
#define KHS_TEST_HELPERS_HPP

#include <cmath>
#include <random>

#include "khs/field.hpp"
#include "khs/gauge.hpp"
#include "khs/hamiltonian.hpp"

namespace khs::test {

/// Random band-limited field: a handful of low-k Fourier modes under a
/// Gaussian envelope that is < 1e-14 at the boundary, so spectral identities
/// that integrate by parts hold to round-off.
inline ScalarField random_band_limited(const PhaseSpaceGrid& g, std::mt19937_64& rng,
                                       int max_mode = 4, double envelope_sigma_frac = 0.11) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> mode(-max_mode, max_mode);
    struct Mode {
        double kq, kp;
        cplx a;
    };
    std::vector<Mode> modes;
    for (int t = 0; t < 6; ++t) {
        const double pi = 3.14159265358979323846;
        modes.push_back({mode(rng) * pi / g.lq, mode(rng) * pi / g.lp, cplx{amp(rng), amp(rng)}});
    }
    const double wq = envelope_sigma_frac * g.lq;
    const double wp = envelope_sigma_frac * g.lp;
    ScalarField out(g);
    for (int i = 0; i < g.nq; ++i) {
        const double q = g.q(i);
        for (int j = 0; j < g.np; ++j) {
            const double p = g.p(j);
            cplx s{0.0, 0.0};
            for (const auto& m : modes)
                s += m.a * std::exp(cplx{0.0, m.kq * q + m.kp * p});
            out.v[g.idx(i, j)] =
                s * std::exp(-q * q / (2 * wq * wq) - p * p / (2 * wp * wp));
        }
    }
    return out;
}

/// Random polynomial Hamiltonian of total degree <= deg with O(1)
/// coefficients in units of the grid half-widths.
inline HamiltonianTerm random_polynomial(const PhaseSpaceGrid& g, std::mt19937_64& rng,
                                         int deg = 3) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<Monomial> mono;
    for (int a = 0; a <= deg; ++a)
        for (int b = 0; a + b <= deg; ++b)
            mono.push_back({a, b, coef(rng) / std::pow(g.lq, a) / std::pow(g.lp, b)});
    return polynomial_term(std::move(mono));
}

inline ScalarField gaussian_field(const PhaseSpaceGrid& g, double sigma_q, double sigma_p,
                                  double cq = 0.0, double cp = 0.0) {
    return sample_field(g, [=](double q, double p) {
        const double dq = q - cq, dp = p - cp;
        return cplx{std::exp(-dq * dq / (4 * sigma_q * sigma_q) -
                             dp * dp / (4 * sigma_p * sigma_p)),
                    0.0};
    });
}

}  // namespace khs::test

#endif
