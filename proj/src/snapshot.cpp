#include "khs/snapshot.hpp"

#include <bit>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace khs {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian raw float64");

void write_snapshot(const std::string& base, const HybridField& y, double time) {
    const auto& g = y.grid();
    std::ofstream raw(base + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("write_snapshot: cannot open " + base + ".f64");
    std::vector<double> plane(g.size());
    for (int c = 0; c < y.n; ++c) {
        for (std::size_t i = 0; i < g.size(); ++i) plane[i] = y.comp[c].v[i].real();
        raw.write(reinterpret_cast<const char*>(plane.data()),
                  static_cast<std::streamsize>(plane.size() * sizeof(double)));
        for (std::size_t i = 0; i < g.size(); ++i) plane[i] = y.comp[c].v[i].imag();
        raw.write(reinterpret_cast<const char*>(plane.data()),
                  static_cast<std::streamsize>(plane.size() * sizeof(double)));
    }
    nlohmann::json meta{{"nq", g.nq},         {"np", g.np},  {"lq", g.lq}, {"lp", g.lp},
                        {"components", y.n},  {"time", time}};
    std::ofstream side(base + ".json");
    side << meta.dump(2) << "\n";
}

Snapshot read_snapshot(const std::string& base) {
    std::ifstream side(base + ".json");
    if (!side) throw std::runtime_error("read_snapshot: cannot open " + base + ".json");
    nlohmann::json meta;
    side >> meta;
    const auto g = make_grid(meta.at("nq").get<int>(), meta.at("np").get<int>(),
                             meta.at("lq").get<double>(), meta.at("lp").get<double>());
    const int n = meta.at("components").get<int>();

    Snapshot out;
    out.time = meta.at("time").get<double>();
    out.field = HybridField(g, n);
    std::ifstream raw(base + ".f64", std::ios::binary);
    if (!raw) throw std::runtime_error("read_snapshot: cannot open " + base + ".f64");
    std::vector<double> plane(g.size());
    for (int c = 0; c < n; ++c) {
        raw.read(reinterpret_cast<char*>(plane.data()),
                 static_cast<std::streamsize>(plane.size() * sizeof(double)));
        for (std::size_t i = 0; i < g.size(); ++i) out.field.comp[c].v[i] = plane[i];
        raw.read(reinterpret_cast<char*>(plane.data()),
                 static_cast<std::streamsize>(plane.size() * sizeof(double)));
        for (std::size_t i = 0; i < g.size(); ++i)
            out.field.comp[c].v[i] += cplx{0.0, plane[i]};
    }
    if (!raw) throw std::runtime_error("read_snapshot: truncated " + base + ".f64");
    return out;
}

}  // namespace khs
