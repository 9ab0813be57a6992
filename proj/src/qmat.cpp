#include "khs/qmat.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace khs {

using cd = std::complex<double>;

QMat QMat::identity(int dim) {
    QMat out(dim);
    for (int a = 0; a < dim; ++a) out.at(a, a) = 1.0;
    return out;
}

QMat QMat::pauli(int j) {
    QMat s(2);
    switch (j) {
        case 1: s.at(0, 1) = 1.0; s.at(1, 0) = 1.0; break;
        case 2: s.at(0, 1) = cd{0.0, -1.0}; s.at(1, 0) = cd{0.0, 1.0}; break;
        case 3: s.at(0, 0) = 1.0; s.at(1, 1) = -1.0; break;
        default: throw std::invalid_argument("pauli: index must be 1, 2 or 3");
    }
    return s;
}

QMat QMat::dagger() const {
    QMat out(n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out.at(a, b) = std::conj(at(b, a));
    return out;
}

cd QMat::trace() const {
    cd t{0.0, 0.0};
    for (int a = 0; a < n; ++a) t += at(a, a);
    return t;
}

double QMat::herm_deviation() const {
    double d = 0.0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) d = std::max(d, std::abs(at(a, b) - std::conj(at(b, a))));
    return d;
}

double QMat::max_abs() const {
    double d = 0.0;
    for (const auto& z : m) d = std::max(d, std::abs(z));
    return d;
}

std::vector<double> QMat::eigenvalues_hermitian() const {
    if (n == 1) return {at(0, 0).real()};
    if (n == 2) {
        const double tr = (at(0, 0) + at(1, 1)).real();
        const double det = (at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0)).real();
        const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
        return {tr / 2.0 - disc, tr / 2.0 + disc};
    }
    Eigen::MatrixXcd em(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) em(a, b) = at(a, b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(em);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    return ev;
}

double QMat::herm_norm() const {
    double m2 = 0.0;
    for (double e : eigenvalues_hermitian()) m2 = std::max(m2, std::abs(e));
    return m2;
}

QMat operator*(const QMat& a, const QMat& b) {
    QMat out(a.n);
    for (int i = 0; i < a.n; ++i)
        for (int k = 0; k < a.n; ++k) {
            cd s{0.0, 0.0};
            for (int j = 0; j < a.n; ++j) s += a.at(i, j) * b.at(j, k);
            out.at(i, k) = s;
        }
    return out;
}

QMat operator+(const QMat& a, const QMat& b) {
    QMat out = a;
    for (std::size_t i = 0; i < out.m.size(); ++i) out.m[i] += b.m[i];
    return out;
}

QMat operator-(const QMat& a, const QMat& b) {
    QMat out = a;
    for (std::size_t i = 0; i < out.m.size(); ++i) out.m[i] -= b.m[i];
    return out;
}

QMat operator*(cd s, const QMat& a) {
    QMat out = a;
    for (auto& z : out.m) z *= s;
    return out;
}

QMat commutator(const QMat& a, const QMat& b) { return a * b - b * a; }

QMat alpha_dot_sigma(const std::array<double, 3>& alpha) {
    QMat out(2);
    out.at(0, 0) = alpha[2];
    out.at(1, 1) = -alpha[2];
    out.at(0, 1) = cd{alpha[0], -alpha[1]};
    out.at(1, 0) = cd{alpha[0], alpha[1]};
    return out;
}

}  // namespace khs
