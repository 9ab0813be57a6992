#include "khs/hamiltonian.hpp"

#include <cmath>
#include <memory>
#include <stdexcept>

namespace khs {

HamiltonianTerm constant_term(double c) {
    HamiltonianTerm h;
    h.value = [c](double, double) { return c; };
    h.gradient = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
    h.hessian = [](double, double) { return std::array<double, 3>{0.0, 0.0, 0.0}; };
    return h;
}

HamiltonianTerm kinetic_term(double mass) {
    HamiltonianTerm h;
    h.value = [mass](double, double p) { return p * p / (2.0 * mass); };
    h.gradient = [mass](double, double p) { return std::array<double, 2>{0.0, p / mass}; };
    h.hessian = [mass](double, double) { return std::array<double, 3>{0.0, 0.0, 1.0 / mass}; };
    h.is_quadratic_homogeneous = true;
    return h;
}

HamiltonianTerm harmonic_term(double mass, double omega) {
    HamiltonianTerm h;
    h.value = [mass, omega](double q, double p) {
        return p * p / (2.0 * mass) + 0.5 * mass * omega * omega * q * q;
    };
    h.gradient = [mass, omega](double q, double p) {
        return std::array<double, 2>{mass * omega * omega * q, p / mass};
    };
    h.hessian = [mass, omega](double, double) {
        return std::array<double, 3>{mass * omega * omega, 0.0, 1.0 / mass};
    };
    h.is_quadratic_homogeneous = true;
    h.oscillator = HamiltonianTerm::OscillatorShape{mass, omega};
    return h;
}

HamiltonianTerm half_q_squared() {
    HamiltonianTerm h;
    h.value = [](double q, double) { return 0.5 * q * q; };
    h.gradient = [](double q, double) { return std::array<double, 2>{q, 0.0}; };
    h.hessian = [](double, double) { return std::array<double, 3>{1.0, 0.0, 0.0}; };
    h.is_quadratic_homogeneous = true;
    return h;
}

HamiltonianTerm polynomial_term(std::vector<Monomial> monomials) {
    HamiltonianTerm h;
    auto mono = std::make_shared<std::vector<Monomial>>(std::move(monomials));
    h.value = [mono](double q, double p) {
        double s = 0.0;
        for (const auto& m : *mono) s += m.c * std::pow(q, m.a) * std::pow(p, m.b);
        return s;
    };
    h.gradient = [mono](double q, double p) {
        double gq = 0.0, gp = 0.0;
        for (const auto& m : *mono) {
            if (m.a > 0) gq += m.c * m.a * std::pow(q, m.a - 1) * std::pow(p, m.b);
            if (m.b > 0) gp += m.c * m.b * std::pow(q, m.a) * std::pow(p, m.b - 1);
        }
        return std::array<double, 2>{gq, gp};
    };
    h.hessian = [mono](double q, double p) {
        double hqq = 0.0, hqp = 0.0, hpp = 0.0;
        for (const auto& m : *mono) {
            if (m.a > 1) hqq += m.c * m.a * (m.a - 1) * std::pow(q, m.a - 2) * std::pow(p, m.b);
            if (m.a > 0 && m.b > 0)
                hqp += m.c * m.a * m.b * std::pow(q, m.a - 1) * std::pow(p, m.b - 1);
            if (m.b > 1) hpp += m.c * m.b * (m.b - 1) * std::pow(q, m.a) * std::pow(p, m.b - 2);
        }
        return std::array<double, 3>{hqq, hqp, hpp};
    };
    return h;
}

void spot_check_gradient(const HamiltonianTerm& h, double scale) {
    const double eps = 1e-5 * scale;
    const double pts[4][2] = {{0.3 * scale, -0.2 * scale},
                              {-0.7 * scale, 0.5 * scale},
                              {0.05 * scale, 0.9 * scale},
                              {-0.4 * scale, -0.6 * scale}};
    for (const auto& pt : pts) {
        const double q = pt[0], p = pt[1];
        const auto g = h.grad(q, p);
        const double fq = (h(q + eps, p) - h(q - eps, p)) / (2 * eps);
        const double fp = (h(q, p + eps) - h(q, p - eps)) / (2 * eps);
        const double ref = std::max({std::abs(g[0]), std::abs(g[1]), 1e-12});
        if (std::abs(fq - g[0]) > 1e-6 * ref + 1e-9 ||
            std::abs(fp - g[1]) > 1e-6 * ref + 1e-9)
            throw std::invalid_argument("HamiltonianTerm: gradient disagrees with finite differences");
    }
}

}  // namespace khs
