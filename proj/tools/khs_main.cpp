#include <CLI11.hpp>

#include <iostream>

#include "khs/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"koopman-hybrid-sim: classical wavefunction and hybrid quantum-classical "
                 "phase-space dynamics"};
    app.require_subcommand(1);

    std::string config_path, output_dir;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "run the configured experiment");
    run->add_option("config", config_path, "key=value config file")->required();
    run->add_option("--output-dir", output_dir, "override the configured output directory");
    run->add_flag("--quiet", quiet, "suppress progress output");

    auto* verify = app.add_subcommand("verify", "run the invariant suite for the model");
    verify->add_option("config", config_path, "key=value config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        khs::ExperimentConfig cfg = khs::parse_config_file(config_path);
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (run->parsed()) return khs::run_experiment(cfg, quiet, &std::cerr);
        return khs::verify_model(cfg, std::cout) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
