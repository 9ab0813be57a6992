#include "khs/field.hpp"

#include <algorithm>
#include <limits>

namespace khs {

ScalarField sample_field(const PhaseSpaceGrid& g, const std::function<cplx(double, double)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g.nq; ++i) {
        const double q = g.q(i);
        for (int j = 0; j < g.np; ++j) out.v[g.idx(i, j)] = f(q, g.p(j));
    }
    return out;
}

ScalarField sample_real_field(const PhaseSpaceGrid& g,
                              const std::function<double(double, double)>& f) {
    ScalarField out(g);
    for (int i = 0; i < g.nq; ++i) {
        const double q = g.q(i);
        for (int j = 0; j < g.np; ++j) out.v[g.idx(i, j)] = cplx{f(q, g.p(j)), 0.0};
    }
    return out;
}

namespace {
template <class T>
T pairwise_impl(const T* data, std::size_t n) {
    if (n <= 32) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += data[i];
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_impl(data, h) + pairwise_impl(data + h, n - h);
}
}  // namespace

cplx pairwise_sum(const cplx* data, std::size_t n) { return pairwise_impl(data, n); }
double pairwise_sum(const double* data, std::size_t n) { return pairwise_impl(data, n); }

cplx integrate(const ScalarField& f) {
    return pairwise_sum(f.v.data(), f.v.size()) * f.grid.cell_area();
}

cplx inner_product(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "inner_product");
    std::vector<cplx> prod(a.size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = std::conj(a.v[i]) * b.v[i];
    return pairwise_sum(prod.data(), prod.size()) * a.grid.cell_area();
}

double norm_l2(const ScalarField& f) {
    std::vector<double> sq(f.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::norm(f.v[i]);
    return std::sqrt(pairwise_sum(sq.data(), sq.size()) * f.grid.cell_area());
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (const cplx& z : f.v) m = std::max(m, std::abs(z));
    return m;
}

double boundary_ring_max(const ScalarField& f) {
    const auto& g = f.grid;
    double m = 0.0;
    for (int j = 0; j < g.np; ++j) {
        m = std::max(m, std::abs(f.at(0, j)));
        m = std::max(m, std::abs(f.at(g.nq - 1, j)));
    }
    for (int i = 0; i < g.nq; ++i) {
        m = std::max(m, std::abs(f.at(i, 0)));
        m = std::max(m, std::abs(f.at(i, g.np - 1)));
    }
    return m;
}

void axpy(ScalarField& y, cplx a, const ScalarField& x) {
    require_same_grid(y.grid, x.grid, "axpy");
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += a * x.v[i];
}

void scale(ScalarField& f, cplx a) {
    for (auto& z : f.v) z *= a;
}

ScalarField multiply(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "multiply");
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

ScalarField conjugate(const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::conj(a.v[i]);
    return out;
}

ScalarField abs_squared(const ScalarField& a) {
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = cplx{std::norm(a.v[i]), 0.0};
    return out;
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "add");
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
    return out;
}

ScalarField sub(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "sub");
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

ScalarField scaled(const ScalarField& a, cplx s) {
    ScalarField out = a;
    scale(out, s);
    return out;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

double max_imag(const ScalarField& a) {
    double m = 0.0;
    for (const cplx& z : a.v) m = std::max(m, std::abs(z.imag()));
    return m;
}

bool all_finite(const ScalarField& f) {
    for (const cplx& z : f.v)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace khs
