#include "khs/interp.hpp"

#include <cmath>

namespace khs {

namespace {
// Lagrange weights for nodes {-1, 0, 1, 2} at fractional offset t in [0,1).
inline void cubic_weights(double t, double w[4]) {
    w[0] = -t * (t - 1.0) * (t - 2.0) / 6.0;
    w[1] = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    w[2] = -t * (t + 1.0) * (t - 2.0) / 2.0;
    w[3] = t * (t + 1.0) * (t - 1.0) / 6.0;
}

inline int wrap(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}
}  // namespace

cplx bicubic_periodic(const ScalarField& f, double q, double p) {
    const auto& g = f.grid;
    const double xq = (q + g.lq) / g.dq;
    const double xp = (p + g.lp) / g.dp;
    const double fq = std::floor(xq);
    const double fp = std::floor(xp);
    const int iq = static_cast<int>(fq);
    const int ip = static_cast<int>(fp);
    double wq[4], wp[4];
    cubic_weights(xq - fq, wq);
    cubic_weights(xp - fp, wp);

    cplx acc{0.0, 0.0};
    for (int a = 0; a < 4; ++a) {
        const int i = wrap(iq - 1 + a, g.nq);
        cplx row{0.0, 0.0};
        for (int b = 0; b < 4; ++b) {
            const int j = wrap(ip - 1 + b, g.np);
            row += wp[b] * f.v[g.idx(i, j)];
        }
        acc += wq[a] * row;
    }
    return acc;
}

}  // namespace khs
