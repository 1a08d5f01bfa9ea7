#pragma once

#include <string>

#include "kvmix/experiments.hpp"

namespace kvmix {

enum class ExperimentKind { None, Stability, Convergence, Decoupling, LinearOracle };

// Fully validated run configuration. Any config that loads successfully can
// be realized and run without precondition failures downstream.
struct RunConfig {
    int grid_size = 0;
    int mode_cutoff = 0;
    double dt = 0.0;
    double t_end = 0.0;
    double output_interval = 0.0;

    MixtureParams params;
    std::vector<DensityPreset> rho0;
    std::vector<std::vector<ModeAmplitude>> v0;
    std::vector<ForcingTerm> forcing_terms;

    ExperimentKind experiment = ExperimentKind::None;
    double stability_epsilon = 0.0;
    Perturbation perturbation;
    std::vector<int> convergence_cutoffs;

    std::string output_directory;
    bool emit_fields = false;
    double field_interval = 0.0;
    double r_exponent = 4.0;

    int output_stride() const;
    int field_stride() const;
};

RunConfig load_config(const std::string& path);
RunConfig load_config_text(const std::string& text);

ExperimentSetup to_setup(const RunConfig& config);

} // namespace kvmix
