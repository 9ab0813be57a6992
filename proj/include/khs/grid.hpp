#ifndef KHS_GRID_HPP
#define KHS_GRID_HPP

#include <cstddef>
#include <stdexcept>

namespace khs {

/// Uniform periodic grid over the phase-space rectangle
/// q in [-lq, lq), p in [-lp, lp), row-major storage (q outer, p inner).
struct PhaseSpaceGrid {
    int nq = 0;
    int np = 0;
    double lq = 0.0;
    double lp = 0.0;
    double dq = 0.0;
    double dp = 0.0;

    std::size_t size() const { return static_cast<std::size_t>(nq) * np; }
    std::size_t idx(int iq, int ip) const { return static_cast<std::size_t>(iq) * np + ip; }
    double q(int iq) const { return -lq + dq * iq; }
    double p(int ip) const { return -lp + dp * ip; }
    double cell_area() const { return dq * dp; }

    bool operator==(const PhaseSpaceGrid& o) const {
        return nq == o.nq && np == o.np && lq == o.lq && lp == o.lp;
    }
    bool operator!=(const PhaseSpaceGrid& o) const { return !(*this == o); }
};

inline PhaseSpaceGrid make_grid(int nq, int np, double lq, double lp) {
    if (nq < 8 || np < 8)
        throw std::invalid_argument("make_grid: grid must have at least 8 points per axis");
    if (nq % 2 != 0 || np % 2 != 0)
        throw std::invalid_argument("make_grid: grid sizes must be even");
    if (!(lq > 0.0) || !(lp > 0.0))
        throw std::invalid_argument("make_grid: half-widths must be positive");
    PhaseSpaceGrid g;
    g.nq = nq;
    g.np = np;
    g.lq = lq;
    g.lp = lp;
    g.dq = 2.0 * lq / nq;
    g.dp = 2.0 * lp / np;
    return g;
}

inline void require_same_grid(const PhaseSpaceGrid& a, const PhaseSpaceGrid& b,
                              const char* where) {
    if (a != b) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace khs

#endif
