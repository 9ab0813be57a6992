#ifndef KHS_EXPERIMENT_HPP
#define KHS_EXPERIMENT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "khs/config.hpp"

namespace khs {

struct ObservableRow {
    double t = 0.0;
    double norm = 0.0;
    double energy = 0.0;
    double purity = 0.0;
    double n_x = 0.0;
    double n_y = 0.0;
    double n_z = 0.0;
    double rho_min = 0.0;
    double rho_integral = 0.0;
};

/// CSV with the fixed header t,norm,energy,purity,n_x,n_y,n_z,rho_min,
/// rho_integral; scientific notation with 15 significant digits, LF endings,
/// no trailing delimiter. A nonempty provenance string is embedded as a
/// leading comment line.
void emit_observables(const std::vector<ObservableRow>& series, const std::string& path,
                      const std::string& provenance = "");
std::vector<ObservableRow> parse_observables(const std::string& path);

/// Runs the configured experiment, writing observables.csv and optional
/// snapshots/plots under cfg.output_dir. Returns 0 on success, nonzero with a
/// diagnostic line on invariant breach.
int run_experiment(const ExperimentConfig& cfg, bool quiet = false, std::ostream* log = nullptr);

/// Runs the invariant battery for the configured model and prints a
/// pass/fail table. Returns the number of failed checks.
int verify_model(const ExperimentConfig& cfg, std::ostream& log);

std::string provenance_line(const ExperimentConfig& cfg);

}  // namespace khs

#endif
