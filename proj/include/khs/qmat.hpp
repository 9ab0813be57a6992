#ifndef KHS_QMAT_HPP
#define KHS_QMAT_HPP

#include <array>
#include <complex>
#include <vector>

namespace khs {

/// Small dense complex matrix for the quantum factor (n is 1 or 2 in all
/// shipped models, but nothing relies on that).
struct QMat {
    int n = 0;
    std::vector<std::complex<double>> m;

    QMat() = default;
    explicit QMat(int dim) : n(dim), m(static_cast<std::size_t>(dim) * dim, {0.0, 0.0}) {}

    std::complex<double>& at(int a, int b) { return m[static_cast<std::size_t>(a) * n + b]; }
    const std::complex<double>& at(int a, int b) const {
        return m[static_cast<std::size_t>(a) * n + b];
    }

    static QMat identity(int dim);
    static QMat pauli(int j);  // j = 1,2,3

    QMat dagger() const;
    std::complex<double> trace() const;
    double herm_deviation() const;      // max |M - M^dagger|
    double max_abs() const;
    /// Operator 2-norm for Hermitian matrices (max |eigenvalue|).
    double herm_norm() const;
    std::vector<double> eigenvalues_hermitian() const;
};

QMat operator*(const QMat& a, const QMat& b);
QMat operator+(const QMat& a, const QMat& b);
QMat operator-(const QMat& a, const QMat& b);
QMat operator*(std::complex<double> s, const QMat& a);
QMat commutator(const QMat& a, const QMat& b);

/// alpha . sigma for a real 3-vector of coupling constants.
QMat alpha_dot_sigma(const std::array<double, 3>& alpha);

}  // namespace khs

#endif
