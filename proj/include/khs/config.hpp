#ifndef KHS_CONFIG_HPP
#define KHS_CONFIG_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace khs {

/// Batch-run configuration. Parsed from key=value text with '#' comments;
/// unknown keys are rejected. Experiment presets fill defaults first, then
/// explicit keys override.
struct ExperimentConfig {
    std::string experiment;  // fig1 | fig2 | stationarity | convergence | custom

    // model
    double m = 1.0;
    double omega = 1.0;
    std::array<double, 3> alpha{0.95, 0.0, 0.0};
    double beta = 1e5;
    double hbar = 1.0;

    // grid; lq/lp default to 20/sqrt(beta) when not set
    int nq = 256;
    int np = 256;
    double lq = -1.0;
    double lp = -1.0;

    std::string gauge = "harmonic";
    std::string solver = "exact";  // exact | characteristics | rk4 | branch
    double dt = 1e-3;
    double t_final = 10.0;
    int sample_every = 1;
    std::string output_dir = ".";
    bool emit_snapshots = false;
    std::vector<double> snapshot_times;
    std::uint64_t seed = 12345;

    void finalize();  // fill derived defaults, validate
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);

/// Canonical text form of the effective configuration (sorted keys) and its
/// FNV-1a hash, used for provenance lines in emitted files.
std::string canonical_dump(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);

}  // namespace khs

#endif
