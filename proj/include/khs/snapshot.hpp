#ifndef KHS_SNAPSHOT_HPP
#define KHS_SNAPSHOT_HPP

#include <string>

#include "khs/hybrid.hpp"

namespace khs {

/// Grid snapshot format: raw little-endian float64, row-major, one real plane
/// then one imaginary plane per component, plus a JSON sidecar
/// {"nq","np","lq","lp","components","time"}. `base` names the pair
/// base.f64 / base.json.
void write_snapshot(const std::string& base, const HybridField& y, double time);

struct Snapshot {
    HybridField field;
    double time = 0.0;
};

Snapshot read_snapshot(const std::string& base);

}  // namespace khs

#endif
