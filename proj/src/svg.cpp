#include "khs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace khs {

namespace {
std::ofstream open_or_throw(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    return out;
}
}  // namespace

void write_heatmap_svg(const std::string& path, const ScalarField& f,
                       const std::string& title) {
    const auto& g = f.grid;
    double lo = 0.0, hi = 0.0;
    for (const auto& z : f.v) {
        lo = std::min(lo, z.real());
        hi = std::max(hi, z.real());
    }
    const double span = std::max(hi, -lo) + 1e-300;
    // downsample to at most 128x128 cells to keep files small
    const int step = std::max(1, std::max(g.nq, g.np) / 128);
    const int cw = 4;
    const int w = (g.nq / step) * cw, h = (g.np / step) * cw;
    auto out = open_or_throw(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h + 18
        << "'>\n<text x='4' y='12' font-size='11'>" << title << "</text>\n";
    char buf[160];
    for (int i = 0; i + step <= g.nq; i += step) {
        for (int j = 0; j + step <= g.np; j += step) {
            const double val = f.v[g.idx(i, j)].real() / span;
            // positive values red, negative blue, zero white
            int r = 255, gg = 255, b = 255;
            if (val >= 0) {
                gg = b = static_cast<int>(255 * (1.0 - std::min(val, 1.0)));
            } else {
                r = gg = static_cast<int>(255 * (1.0 - std::min(-val, 1.0)));
            }
            std::snprintf(buf, sizeof buf,
                          "<rect x='%d' y='%d' width='%d' height='%d' fill='rgb(%d,%d,%d)'/>\n",
                          (i / step) * cw, h + 18 - cw - (j / step) * cw, cw, cw, r, gg, b);
            out << buf;
        }
    }
    out << "</svg>\n";
}

void write_trajectory_svg(const std::string& path, const std::vector<double>& xs,
                          const std::vector<double>& ys, const std::string& title,
                          double axis_range) {
    const int w = 400, h = 400;
    auto out = open_or_throw(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
        << "'>\n<text x='4' y='14' font-size='12'>" << title << "</text>\n";
    // unit circle for reference
    out << "<circle cx='" << w / 2 << "' cy='" << h / 2 << "' r='"
        << (w / 2 - 10) / axis_range << "' fill='none' stroke='black' stroke-dasharray='4'/>\n";
    out << "<polyline fill='none' stroke='steelblue' stroke-width='1' points='";
    char buf[64];
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = w / 2 + xs[i] / axis_range * (w / 2 - 10);
        const double y = h / 2 - ys[i] / axis_range * (h / 2 - 10);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
        out << buf;
    }
    out << "'/>\n</svg>\n";
}

void write_series_svg(const std::string& path, const std::vector<double>& ts,
                      const std::vector<double>& ys, const std::string& title) {
    if (ts.empty()) throw std::invalid_argument("write_series_svg: empty series");
    const int w = 640, h = 360, mx = 40, my = 24;
    double ylo = ys[0], yhi = ys[0];
    for (double y : ys) {
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    }
    if (yhi - ylo < 1e-12) yhi = ylo + 1.0;
    auto out = open_or_throw(path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << h
        << "'>\n<text x='4' y='14' font-size='12'>" << title << "</text>\n";
    out << "<rect x='" << mx << "' y='" << my << "' width='" << w - 2 * mx << "' height='"
        << h - 2 * my << "' fill='none' stroke='gray'/>\n";
    char buf[96];
    std::snprintf(buf, sizeof buf,
                  "<text x='4' y='%d' font-size='10'>%.3g</text>\n", my + 8, yhi);
    out << buf;
    std::snprintf(buf, sizeof buf, "<text x='4' y='%d' font-size='10'>%.3g</text>\n",
                  h - my, ylo);
    out << buf;
    out << "<polyline fill='none' stroke='firebrick' stroke-width='1' points='";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double x = mx + (ts[i] - ts.front()) / (ts.back() - ts.front() + 1e-300) *
                                  (w - 2 * mx);
        const double y = h - my - (ys[i] - ylo) / (yhi - ylo) * (h - 2 * my);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
        out << buf;
    }
    out << "'/>\n</svg>\n";
}

}  // namespace khs
