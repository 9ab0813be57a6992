#include "khs/exact.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "khs/hybrid.hpp"
#include "khs/interp.hpp"

namespace khs {

namespace {
constexpr double kPi = std::numbers::pi;

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr int kGaussN = 16;
constexpr double kGx[kGaussN] = {
    -0.9894009349916499, -0.9445750230732326, -0.8656312023878318, -0.7554044083550030,
    -0.6178762444026438, -0.4580167776572274, -0.2816035507792589, -0.0950125098376374,
    0.0950125098376374,  0.2816035507792589,  0.4580167776572274,  0.6178762444026438,
    0.7554044083550030,  0.8656312023878318,  0.9445750230732326,  0.9894009349916499};
constexpr double kGw[kGaussN] = {
    0.0271524594117541, 0.0622535239386479, 0.0951585116824928, 0.1246289712555339,
    0.1495959888165767, 0.1691565193950025, 0.1826034150449236, 0.1894506104550685,
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
}  // namespace

double ExactModelParams::omega_plus() const {
    return std::sqrt(omega * omega + lambda() / m);
}

double ExactModelParams::omega_minus() const {
    const double w2 = omega * omega - lambda() / m;
    if (w2 <= 0.0)
        throw std::domain_error(
            "ExactModelParams: omega^2 - lambda/m <= 0, slow branch frequency not real");
    return std::sqrt(w2);
}

void ExactModelParams::validate() const {
    if (!(m > 0.0) || !(omega > 0.0) || !(beta > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("ExactModelParams: m, omega, beta, hbar must be positive");
}

DiagonalizationResult diagonalize_coupling(const std::array<double, 3>& alpha) {
    DiagonalizationResult out;
    const double lam =
        std::sqrt(alpha[0] * alpha[0] + alpha[1] * alpha[1] + alpha[2] * alpha[2]);
    if (lam <= 0.0)
        throw std::invalid_argument("diagonalize_coupling: |alpha| = 0 is degenerate");
    out.lambda = lam;
    out.u = QMat(2);
    const cplx off{alpha[0], alpha[1]};  // alpha1 + i alpha2 up to conjugation below
    // eigenvectors of alpha.sigma: v+ ~ (lam + a3, a1 + i a2), v- ~ (a3 - lam, a1 + i a2)
    auto set_row = [&](int row, cplx v0, cplx v1) {
        const double nn = std::sqrt(std::norm(v0) + std::norm(v1));
        v0 /= nn;
        v1 /= nn;
        // phase convention: first nonzero entry real positive
        cplx lead = (std::abs(v0) > 1e-14) ? v0 : v1;
        const cplx ph = std::conj(lead) / std::abs(lead);
        out.u.at(row, 0) = ph * v0;
        out.u.at(row, 1) = ph * v1;
    };
    if (lam + alpha[2] < 1e-14 * lam) {
        // alpha = (0,0,-lam): swap basis
        set_row(0, 0.0, 1.0);
        set_row(1, 1.0, 0.0);
    } else {
        // v+ ~ (lam + a3, a1 + i a2), v- ~ (-(a1 - i a2), lam + a3);
        // rows are the conjugated eigenvectors
        set_row(0, cplx{lam + alpha[2], 0.0}, std::conj(off));
        set_row(1, -off, cplx{lam + alpha[2], 0.0});
    }
    return out;
}

double thermal_profile(double s) {
    if (s >= 0.5) return (1.0 - (1.0 + s) * std::exp(-s)) / (s * s);
    // sum_{m>=0} (-1)^m (m+1)/(m+2)! s^m
    double acc = 0.0, term = 1.0, fact = 2.0;  // fact = (m+2)! running
    for (int m = 0; m <= 22; ++m) {
        acc += ((m % 2 == 0) ? 1.0 : -1.0) * (m + 1) / fact * term;
        term *= s;
        fact *= (m + 3);
    }
    return acc;
}

double thermal_profile_deriv(double s) {
    if (s >= 0.5) return std::exp(-s) / s - 2.0 * thermal_profile(s) / s;
    double acc = 0.0, term = 1.0, fact = 6.0;  // starts at m=1: (m+2)! = 6
    for (int m = 1; m <= 23; ++m) {
        acc += ((m % 2 == 0) ? 1.0 : -1.0) * m * (m + 1) / fact * term;
        term *= s;
        fact *= (m + 3);
    }
    return acc;
}

double thermal_amplitude(const ExactModelParams& pr, double q, double p) {
    const double h0 = p * p / (2.0 * pr.m) + 0.5 * pr.m * pr.omega * pr.omega * q * q;
    const double s = pr.beta * h0;
    return std::sqrt(pr.omega * pr.beta / (2.0 * kPi) * thermal_profile(s));
}

double thermal_amplitude_deriv_s(const ExactModelParams& pr, double s) {
    const double c = pr.omega * pr.beta / (2.0 * kPi);
    const double f = std::sqrt(c * thermal_profile(s));
    return 0.5 * c * thermal_profile_deriv(s) / f;
}

HybridField thermal_initial_state(const ExactModelParams& pr, const PhaseSpaceGrid& grid) {
    pr.validate();
    const double sigma_q = 1.0 / std::sqrt(pr.beta * pr.m) / pr.omega;
    const double sigma_p = std::sqrt(pr.m / pr.beta);
    if (grid.dq > sigma_q / 4.0 || grid.dp > sigma_p / 4.0)
        throw std::invalid_argument(
            "thermal_initial_state: grid does not resolve the thermal width "
            "(need at least 4 nodes per sigma in q and p)");
    HybridField out(grid, 2);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j)
            out.comp[0].v[grid.idx(i, j)] = thermal_amplitude(pr, q, grid.p(j));
    }
    return out;
}

ScalarField amplitude_from_density(const std::function<double(double)>& rho_of_s,
                                   const ExactModelParams& pr, const PhaseSpaceGrid& grid) {
    pr.validate();
    // u(s) = int_0^1 xi rho(s xi) d xi. Adaptive Simpson resolves both
    // boltzmann-type boundary layers (width ~ 1/s) and hard edges in the
    // target profile.
    auto u_of_s = [&](double s) {
        auto f = [&](double xi) {
            const double r = rho_of_s(s * xi);
            if (r < -1e-12)
                throw std::invalid_argument("amplitude_from_density: negative target");
            return xi * r;
        };
        struct Simpson {
            const std::function<double(double)>& fn;
            double tol;
            double run(double a, double b, double fa, double fm, double fb, double whole,
                       int depth) const {
                const double m = 0.5 * (a + b);
                const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
                const double flm = fn(lm), frm = fn(rm);
                const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
                const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
                if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
                    return left + right + (left + right - whole) / 15.0;
                return run(a, m, fa, flm, fm, left, depth - 1) +
                       run(m, b, fm, frm, fb, right, depth - 1);
            }
        };
        std::function<double(double)> fn = f;
        // geometric panels seed the recursion so the integrand's boundary
        // layer at xi ~ 1/s is always sampled; adaptivity then handles any
        // hard edges of the target inside a panel
        std::vector<double> edges{0.0};
        double lo = std::min(0.5, 0.5 / std::max(s, 1.0));
        while (lo < 1.0) {
            edges.push_back(lo);
            lo *= 2.0;
        }
        edges.push_back(1.0);
        const double fscale = std::max(std::abs(rho_of_s(0.0)), std::abs(rho_of_s(s)));
        Simpson simp{fn, 1e-15 * std::max(1.0, fscale)};
        double acc = 0.0;
        for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
            const double a = edges[e], b = edges[e + 1];
            const double fa = fn(a), fb = fn(b), fm = fn(0.5 * (a + b));
            const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
            acc += simp.run(a, b, fa, fm, fb, whole, 44);
        }
        return acc;
    };
    ScalarField out(grid);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const double p = grid.p(j);
            const double h0 = p * p / (2.0 * pr.m) + 0.5 * pr.m * pr.omega * pr.omega * q * q;
            const double u = u_of_s(pr.beta * h0);
            out.v[grid.idx(i, j)] = std::sqrt(std::max(u, 0.0));
        }
    }
    return out;
}

ClosedFormField scaled_gaussian(double mass, double w, double center_q, double center_p,
                                double sigma) {
    ClosedFormField f;
    const double aq = mass * w;        // scaled |S(z-d)|^2 = aq dq^2 + dp^2/aq
    const double s2 = 4.0 * sigma * sigma;
    f.value = [=](double q, double p) {
        const double dq = q - center_q, dp = p - center_p;
        return cplx{std::exp(-(aq * dq * dq + dp * dp / aq) / s2), 0.0};
    };
    f.gradient = [=](double q, double p) {
        const double dq = q - center_q, dp = p - center_p;
        const double e = std::exp(-(aq * dq * dq + dp * dp / aq) / s2);
        return std::array<cplx, 2>{cplx{-2.0 * aq * dq / s2 * e, 0.0},
                                   cplx{-2.0 * dp / (aq * s2) * e, 0.0}};
    };
    return f;
}

std::array<double, 4> branch_rotation(double mass, double w, double t) {
    const double c = std::cos(w * t), s = std::sin(w * t);
    return {c, -s / (mass * w), mass * w * s, c};
}

// ---- HybridExactSolution ----------------------------------------------------

HybridExactSolution::HybridExactSolution(const ExactModelParams& pr,
                                         const std::array<ClosedFormField, 2>& upsilon0) {
    pr.validate();
    pr_ = pr;
    if (pr.lambda() > 0.0) {
        u_ = diagonalize_coupling(pr.alpha).u;
        w_[0] = pr.omega_plus();
        w_[1] = pr.omega_minus();
    } else {
        u_ = QMat::identity(2);
        w_[0] = w_[1] = pr.omega;
    }
    // rotate initial data into the branch frame: ytilde_k = sum_a u_{ka} y_a
    for (int k = 0; k < 2; ++k) {
        const cplx u0 = u_.at(k, 0), u1 = u_.at(k, 1);
        const ClosedFormField a = upsilon0[0], b = upsilon0[1];
        branch0_[k].value = [u0, u1, a, b](double q, double p) {
            return u0 * a.value(q, p) + u1 * b.value(q, p);
        };
        branch0_[k].gradient = [u0, u1, a, b](double q, double p) {
            const auto ga = a.gradient(q, p);
            const auto gb = b.gradient(q, p);
            return std::array<cplx, 2>{u0 * ga[0] + u1 * gb[0], u0 * ga[1] + u1 * gb[1]};
        };
    }
}

HybridExactSolution HybridExactSolution::from_branch_data(
    const ExactModelParams& pr, const std::array<ClosedFormField, 2>& branch0) {
    pr.validate();
    HybridExactSolution out;
    out.pr_ = pr;
    if (pr.lambda() > 0.0) {
        out.u_ = diagonalize_coupling(pr.alpha).u;
        out.w_[0] = pr.omega_plus();
        out.w_[1] = pr.omega_minus();
    } else {
        out.u_ = QMat::identity(2);
        out.w_[0] = out.w_[1] = pr.omega;
    }
    out.branch0_ = branch0;
    return out;
}

std::array<cplx, 2> HybridExactSolution::value(double q, double p, double t) const {
    cplx yt[2];
    for (int k = 0; k < 2; ++k) {
        const auto mrot = branch_rotation(pr_.m, w_[k], t);
        yt[k] = branch0_[k].value(mrot[0] * q + mrot[1] * p, mrot[2] * q + mrot[3] * p);
    }
    std::array<cplx, 2> out;
    for (int a = 0; a < 2; ++a)
        out[a] = std::conj(u_.at(0, a)) * yt[0] + std::conj(u_.at(1, a)) * yt[1];
    return out;
}

std::array<std::array<cplx, 2>, 2> HybridExactSolution::gradient(double q, double p,
                                                                 double t) const {
    cplx gq[2], gp[2];
    for (int k = 0; k < 2; ++k) {
        const auto mr = branch_rotation(pr_.m, w_[k], t);
        const auto g0 = branch0_[k].gradient(mr[0] * q + mr[1] * p, mr[2] * q + mr[3] * p);
        gq[k] = mr[0] * g0[0] + mr[2] * g0[1];
        gp[k] = mr[1] * g0[0] + mr[3] * g0[1];
    }
    std::array<std::array<cplx, 2>, 2> out;
    for (int a = 0; a < 2; ++a) {
        out[a][0] = std::conj(u_.at(0, a)) * gq[0] + std::conj(u_.at(1, a)) * gq[1];
        out[a][1] = std::conj(u_.at(0, a)) * gp[0] + std::conj(u_.at(1, a)) * gp[1];
    }
    return out;
}

QMat HybridExactSolution::density(double q, double p, double t) const {
    const auto y = value(q, p, t);
    const auto gy = gradient(q, p, t);
    QMat d(2);
    const double hbar = pr_.hbar;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            const cplx prod = y[a] * std::conj(y[b]);
            // harmonic gauge: JA = (-q/2, -p/2), so -div(JA f) = f + z.grad(f)/2
            const cplx zgrad = q * (gy[a][0] * std::conj(y[b]) + y[a] * std::conj(gy[b][0])) +
                               p * (gy[a][1] * std::conj(y[b]) + y[a] * std::conj(gy[b][1]));
            const cplx br = gy[a][0] * std::conj(gy[b][1]) - gy[a][1] * std::conj(gy[b][0]);
            d.at(a, b) = 2.0 * prod + 0.5 * zgrad + cplx{0.0, hbar} * br;
        }
    return d;
}

double HybridExactSolution::classical_density(double q, double p, double t) const {
    return density(q, p, t).trace().real();
}

HybridField HybridExactSolution::sample(const PhaseSpaceGrid& grid, double t) const {
    HybridField out(grid, 2);
    for (int i = 0; i < grid.nq; ++i) {
        const double q = grid.q(i);
        for (int j = 0; j < grid.np; ++j) {
            const auto y = value(q, grid.p(j), t);
            const std::size_t id = grid.idx(i, j);
            out.comp[0].v[id] = y[0];
            out.comp[1].v[id] = y[1];
        }
    }
    return out;
}

std::array<cplx, 2> hybrid_exact_grid(const ExactModelParams& pr, const HybridField& y0,
                                      double q, double p, double t) {
    pr.validate();
    QMat u = QMat::identity(2);
    double w0 = pr.omega, w1 = pr.omega;
    if (pr.lambda() > 0.0) {
        u = diagonalize_coupling(pr.alpha).u;
        w0 = pr.omega_plus();
        w1 = pr.omega_minus();
    }
    cplx yt[2];
    const double wk[2] = {w0, w1};
    for (int k = 0; k < 2; ++k) {
        const auto mr = branch_rotation(pr.m, wk[k], t);
        const double qb = mr[0] * q + mr[1] * p;
        const double pb = mr[2] * q + mr[3] * p;
        cplx acc{0.0, 0.0};
        for (int a = 0; a < 2; ++a) {
            // interpolate u-rotated initial data
            acc += u.at(k, a) * bicubic_periodic(y0.comp[a], qb, pb);
        }
        yt[k] = acc;
    }
    std::array<cplx, 2> out;
    for (int a = 0; a < 2; ++a)
        out[a] = std::conj(u.at(0, a)) * yt[0] + std::conj(u.at(1, a)) * yt[1];
    return out;
}

// ---- PolarQuadrature ---------------------------------------------------------

PolarQuadrature::PolarQuadrature(const ExactModelParams& pr, int ntheta, double xmax,
                                 double xmin, int npanels)
    : beta_omega_(pr.beta * pr.omega), m_(pr.m), omega_(pr.omega), beta_(pr.beta) {
    cos_.resize(ntheta);
    sin_.resize(ntheta);
    for (int i = 0; i < ntheta; ++i) {
        const double th = 2.0 * kPi * i / ntheta;
        cos_[i] = std::cos(th);
        sin_[i] = std::sin(th);
    }
    // geometric panel edges from xmin to xmax plus the [0, xmin] panel
    std::vector<double> edges{0.0};
    for (int k = 0; k < npanels; ++k)
        edges.push_back(xmin * std::pow(xmax / xmin, static_cast<double>(k) / (npanels - 1)));
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e], b = edges[e + 1];
        const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int k = 0; k < kGaussN; ++k) {
            x_.push_back(mid + hw * kGx[k]);
            wx_.push_back(hw * kGw[k]);
        }
    }
}

cplx PolarQuadrature::integrate(const std::function<cplx(double, double)>& f) const {
    const double sm = std::sqrt(m_ * omega_);
    std::vector<cplx> acc(cos_.size());
    for (std::size_t it = 0; it < cos_.size(); ++it) {
        cplx s{0.0, 0.0};
        for (std::size_t ix = 0; ix < x_.size(); ++ix) {
            const double r = std::sqrt(2.0 * x_[ix] / beta_omega_);
            s += wx_[ix] * f(r * cos_[it] / sm, r * sin_[it] * sm);
        }
        acc[it] = s;
    }
    const cplx thsum = pairwise_sum(acc.data(), acc.size());
    return thsum * (2.0 * kPi / static_cast<double>(cos_.size())) / beta_omega_;
}

double PolarQuadrature::integrate_real(const std::function<double(double, double)>& f) const {
    return integrate([&f](double q, double p) { return cplx{f(q, p), 0.0}; }).real();
}

// ---- ExactThermalObservables --------------------------------------------------

ExactThermalObservables::ExactThermalObservables(const ExactModelParams& pr, int ntheta)
    : pr_(pr),
      sol_(pr,
           {ClosedFormField{[pr](double q, double p) {
                                return cplx{thermal_amplitude(pr, q, p), 0.0};
                            },
                            [pr](double q, double p) {
                                const double h0 = p * p / (2.0 * pr.m) +
                                                  0.5 * pr.m * pr.omega * pr.omega * q * q;
                                const double s = pr.beta * h0;
                                const double fp = thermal_amplitude_deriv_s(pr, s);
                                return std::array<cplx, 2>{
                                    cplx{fp * pr.beta * pr.m * pr.omega * pr.omega * q, 0.0},
                                    cplx{fp * pr.beta * p / pr.m, 0.0}};
                            }},
            ClosedFormField{[](double, double) { return cplx{0.0, 0.0}; },
                            [](double, double) {
                                return std::array<cplx, 2>{cplx{0.0, 0.0}, cplx{0.0, 0.0}};
                            }}}),
      ntheta_(ntheta) {
    u_ = sol_.u();
    w_[0] = u_.at(0, 0);
    w_[1] = u_.at(1, 0);
    const double wm2 = pr.omega * pr.omega - pr.lambda() / pr.m;
    const double xmax = 45.0 / std::min(1.0, wm2 / (pr.omega * pr.omega));
    energy_quad_ = std::make_unique<PolarQuadrature>(pr, 384, xmax, 1e-4, 48);
}

namespace {
// |M v(theta)|^2 in branch-scaled coordinates for the rotation map of branch
// frequency w: the thermal argument transforms as s -> x * Qk(theta).
double q_form(const ExactModelParams& pr, double w, double t, double c, double s) {
    // work in scaled coordinates (sqrt(m om) q, p/sqrt(m om)); the branch map
    // z -> M z conjugates to S M S^{-1} there. Unit vector v = (c, s).
    const auto mr = branch_rotation(pr.m, w, t);
    const double sm = std::sqrt(pr.m * pr.omega);
    // z = S^{-1} v ; w = M z ; W = S w; Q = |W|^2
    const double q = c / sm, p = s * sm;
    const double wq = mr[0] * q + mr[1] * p;
    const double wp = mr[2] * q + mr[3] * p;
    const double Wq = sm * wq, Wp = wp / sm;
    return Wq * Wq + Wp * Wp;
}
}  // namespace

double ExactThermalObservables::branch_overlap(double t) const {
    // (1/2pi) int dtheta int_0^inf sqrt(g(x Q+) g(x Q-)) dx with analytic
    // 1/x^2 tails beyond x Qmin = 45.
    std::vector<double> acc(ntheta_);
    for (int it = 0; it < ntheta_; ++it) {
        const double th = 2.0 * kPi * it / ntheta_;
        const double c = std::cos(th), s = std::sin(th);
        const double qp = q_form(pr_, pr_.lambda() > 0 ? pr_.omega_plus() : pr_.omega, t, c, s);
        const double qm = q_form(pr_, pr_.lambda() > 0 ? pr_.omega_minus() : pr_.omega, t, c, s);
        const double qmin = std::min(qp, qm), qmax = std::max(qp, qm);
        const double xcut = 45.0 / qmin;
        // geometric panels from the finest scale to the cut
        double lo = 0.01 / qmax;
        double sum = 0.0;
        auto panel = [&](double a, double b) {
            double ps = 0.0;
            const double hw = 0.5 * (b - a), mid = 0.5 * (a + b);
            for (int k = 0; k < kGaussN; ++k) {
                const double x = mid + hw * kGx[k];
                ps += kGw[k] *
                      std::sqrt(thermal_profile(x * qp) * thermal_profile(x * qm));
            }
            return hw * ps;
        };
        sum += panel(0.0, lo);
        while (lo < xcut) {
            const double hi = std::min(xcut, 2.0 * lo);
            sum += panel(lo, hi);
            lo = hi;
        }
        sum += 1.0 / (xcut * std::sqrt(qp * qm));  // exact tail of 1/(x^2 sqrt(QpQm))
        acc[it] = sum;
    }
    return pairwise_sum(acc.data(), acc.size()) / ntheta_;
}

namespace {
double branch_mass(const ExactModelParams& pr, double w, double t, int ntheta) {
    // integral of g(x Qk) over (x, theta)/(2pi): equals 1 by area preservation;
    // evaluated honestly as (1/2pi) int dtheta / Qk.
    std::vector<double> acc(ntheta);
    for (int it = 0; it < ntheta; ++it) {
        const double th = 2.0 * kPi * it / ntheta;
        acc[it] = 1.0 / q_form(pr, w, t, std::cos(th), std::sin(th));
    }
    return pairwise_sum(acc.data(), acc.size()) / ntheta;
}
}  // namespace

DensityMatrix ExactThermalObservables::quantum_density(double t) const {
    const double wp = pr_.lambda() > 0 ? pr_.omega_plus() : pr_.omega;
    const double wm = pr_.lambda() > 0 ? pr_.omega_minus() : pr_.omega;
    const double mp = branch_mass(pr_, wp, t, ntheta_);
    const double mm = branch_mass(pr_, wm, t, ntheta_);
    const double ov = branch_overlap(t);
    QMat rot(2);
    rot.at(0, 0) = std::norm(w_[0]) * mp;
    rot.at(1, 1) = std::norm(w_[1]) * mm;
    rot.at(0, 1) = w_[0] * std::conj(w_[1]) * ov;
    rot.at(1, 0) = std::conj(rot.at(0, 1));
    DensityMatrix out;
    out.rho = u_.dagger() * rot * u_;
    return out;
}

double ExactThermalObservables::norm_squared(double t) const {
    const double wp = pr_.lambda() > 0 ? pr_.omega_plus() : pr_.omega;
    const double wm = pr_.lambda() > 0 ? pr_.omega_minus() : pr_.omega;
    return std::norm(w_[0]) * branch_mass(pr_, wp, t, ntheta_) +
           std::norm(w_[1]) * branch_mass(pr_, wm, t, ntheta_);
}

double ExactThermalObservables::energy(double t) const {
    // Tr(H D) = H+ Dt11 + H- Dt22 in the branch frame; both integrands decay
    // like the transported boltzmann density.
    const double lam = pr_.lambda();
    const PolarQuadrature& quad = *energy_quad_;
    const QMat& u = u_;
    return quad.integrate_real([&](double q, double p) {
        const QMat d = sol_.density(q, p, t);
        const QMat dt = u * d * u.dagger();
        const double h0 = p * p / (2.0 * pr_.m) + 0.5 * pr_.m * pr_.omega * pr_.omega * q * q;
        const double v = 0.5 * q * q;
        return (h0 + lam * v) * dt.at(0, 0).real() + (h0 - lam * v) * dt.at(1, 1).real();
    });
}

// ---- AgExactSolution -----------------------------------------------------------

AgExactSolution::AgExactSolution(const ExactModelParams& pr,
                                 std::function<double(double)> rho0_of_s, const QMat& k0)
    : pr_(pr), rho0_(std::move(rho0_of_s)), k0_(k0) {
    pr.validate();
    if (k0.herm_deviation() > 1e-12)
        throw std::invalid_argument("AgExactSolution: initial quantum factor must be Hermitian");
    if (pr.lambda() > 0.0) {
        u_ = diagonalize_coupling(pr.alpha).u;
        w_[0] = pr.omega_plus();
        w_[1] = pr.omega_minus();
    } else {
        u_ = QMat::identity(2);
        w_[0] = w_[1] = pr.omega;
    }
    p_ = u_ * k0_ * u_.dagger();
    const double wm2 = pr.omega * pr.omega - pr.lambda() / pr.m;
    const double xmax = 45.0 / std::min(1.0, wm2 / (pr.omega * pr.omega));
    energy_quad_ = std::make_unique<PolarQuadrature>(pr, 384, xmax, 1e-4, 40);
}

AgExactSolution AgExactSolution::thermal(const ExactModelParams& pr) {
    QMat k0(2);
    k0.at(0, 0) = 1.0;
    auto prof = [pr](double s) {
        return pr.omega * pr.beta / (2.0 * kPi) * std::exp(-s);
    };
    return AgExactSolution(pr, prof, k0);
}

double AgExactSolution::phase(double q, double p, double t) const {
    const double m = pr_.m, w = pr_.omega, hb = pr_.hbar, lam = pr_.lambda();
    const double h0 = p * p / (2.0 * m) + 0.5 * m * w * w * q * q;
    return lam / (2.0 * m * hb * w * w * w) *
           ((p * p - m * w * q * m * w * q) / (2.0 * m) * std::sin(2.0 * w * t) -
            w * (2.0 * h0 * t + p * q * (std::cos(2.0 * w * t) - 1.0)));
}

namespace {
double rotated_s(const ExactModelParams& pr, double w, double t, double q, double p) {
    const auto mr = branch_rotation(pr.m, w, t);
    const double qb = mr[0] * q + mr[1] * p;
    const double pb = mr[2] * q + mr[3] * p;
    return pr.beta *
           (pb * pb / (2.0 * pr.m) + 0.5 * pr.m * pr.omega * pr.omega * qb * qb);
}
}  // namespace

QMat AgExactSolution::value(double q, double p, double t) const {
    QMat mid(2);
    const double sp = rotated_s(pr_, w_[0], t, q, p);
    const double sm = rotated_s(pr_, w_[1], t, q, p);
    const double sw = rotated_s(pr_, pr_.omega, t, q, p);
    const double ph = phase(q, p, t);
    const cplx eip{std::cos(ph), std::sin(ph)};
    mid.at(0, 0) = p_.at(0, 0) * rho0_(sp);
    mid.at(1, 1) = p_.at(1, 1) * rho0_(sm);
    mid.at(0, 1) = eip * p_.at(0, 1) * rho0_(sw);
    mid.at(1, 0) = std::conj(eip) * p_.at(1, 0) * rho0_(sw);
    return u_.dagger() * mid * u_;
}

double AgExactSolution::classical_density(double q, double p, double t) const {
    const double sp = rotated_s(pr_, w_[0], t, q, p);
    const double sm = rotated_s(pr_, w_[1], t, q, p);
    return (p_.at(0, 0) * rho0_(sp) + p_.at(1, 1) * rho0_(sm)).real();
}

DensityMatrix AgExactSolution::quantum_marginal(double t, int ntheta) const {
    // off-diagonal entry: P12 * (1/2pi) int dtheta / (1 + i a(theta, t)) for
    // the boltzmann profile; diagonal entries are conserved branch masses.
    const double lam = pr_.lambda();
    const double m = pr_.m, w = pr_.omega, hb = pr_.hbar;
    std::vector<cplx> acc(ntheta);
    for (int it = 0; it < ntheta; ++it) {
        const double th = 2.0 * kPi * it / ntheta;
        const double wobble =
            0.5 * (std::sin(2.0 * w * t + 2.0 * th) - std::sin(2.0 * th));
        const double a = lam / (pr_.beta * m * hb * w * w * w) * (w * t + wobble);
        acc[it] = 1.0 / cplx{1.0, a};
    }
    const cplx red = pairwise_sum(acc.data(), acc.size()) / static_cast<double>(ntheta);
    QMat mid(2);
    mid.at(0, 0) = p_.at(0, 0);
    mid.at(1, 1) = p_.at(1, 1);
    mid.at(0, 1) = p_.at(0, 1) * red;
    mid.at(1, 0) = std::conj(mid.at(0, 1));
    DensityMatrix out;
    out.rho = u_.dagger() * mid * u_;
    return out;
}

double AgExactSolution::purity(double t, int ntheta) const {
    return khs::purity(quantum_marginal(t, ntheta));
}

double AgExactSolution::total_energy(double t) const {
    const double lam = pr_.lambda();
    return energy_quad_->integrate_real([&](double q, double p) {
        const double sp = rotated_s(pr_, w_[0], t, q, p);
        const double sm = rotated_s(pr_, w_[1], t, q, p);
        const double h0 = p * p / (2.0 * pr_.m) + 0.5 * pr_.m * pr_.omega * pr_.omega * q * q;
        const double v = 0.5 * q * q;
        return (h0 + lam * v) * p_.at(0, 0).real() * rho0_(sp) +
               (h0 - lam * v) * p_.at(1, 1).real() * rho0_(sm);
    });
}

DensityMatrix AgExactSolution::quantum_marginal_quadrature(double t, int n,
                                                           double half_width) const {
    const double d = 2.0 * half_width / n;
    QMat acc(2);
    for (int i = 0; i < n; ++i) {
        const double q = -half_width + d * i;
        QMat row(2);
        for (int j = 0; j < n; ++j) {
            const QMat v = value(q, -half_width + d * j, t);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) row.at(a, b) += v.at(a, b);
        }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) acc.at(a, b) += row.at(a, b);
    }
    DensityMatrix out;
    out.rho = cplx{d * d, 0.0} * acc;
    return out;
}

}  // namespace khs
