#pragma once

#include <vector>

#include "kvmix/diagnostics.hpp"

namespace kvmix {

// Everything needed to realize a run at any resolution level: initial data is
// kept in closed form so refinement studies can re-evaluate it per grid.
struct ExperimentSetup {
    int grid_size = 0;
    int mode_cutoff = 0;
    MixtureParams params;
    std::vector<ForcingTerm> forcing_terms;
    std::vector<DensityPreset> rho0;              // per constituent
    std::vector<std::vector<ModeAmplitude>> v0;   // per constituent
    double dt = 0.0;
    double t_end = 0.0;
    int output_stride = 1;
    double r_exponent = 4.0;
};

struct RealizedRun {
    SpectralBasis basis;
    ForcingSpec forcing;
    InitialData initial;
    SimState state;
};

RealizedRun realize(const ExperimentSetup& setup, int grid_size = 0, int mode_cutoff = 0);

struct Perturbation {
    int constituent = 0;
    int kx = 1, ky = 0;
    bool sin_parity = false;
};

// Two trajectories separated by epsilon on one initial coefficient, compared
// through y(t) = sum_i (rho_minus |v1_i - v2_i|^2 + |rho1_i - rho2_i|^2)
//             + kappa_minus sum_i |grad(v1_i - v2_i)|^2.
struct StabilityReport {
    std::vector<double> times;
    std::vector<double> y_series;
    double y0 = 0.0;
    double growth_exponent = 0.0;   // least-squares slope of log y over eligible times
    bool fitted = false;            // false when epsilon == 0
    double envelope_violation = 0.0; // max over eligible times of y/(y0 e^{a t}) - 1
    double max_y = 0.0;
};

StabilityReport stability_experiment(const ExperimentSetup& setup, double epsilon,
                                     const Perturbation& perturbation);

struct ConvergenceLevel {
    int mode_cutoff = 0;
    int grid_size = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    std::vector<double> diffs;  // y-metric distance between consecutive terminal states
    std::vector<double> ratios; // diffs[j+1] / diffs[j]
    bool strictly_decreasing = false;
};

// Terminal-state Cauchy differences across increasing cutoffs, N = 4K.
ConvergenceReport convergence_study(const ExperimentSetup& setup, const std::vector<int>& cutoffs);

struct DecouplingReport {
    double max_rel_deviation = 0.0;
    double scale = 0.0;
    bool pass = false;
};

// Coupled diagonal run against per-constituent single runs.
DecouplingReport decoupling_test(const ExperimentSetup& setup, double tolerance = 1e-12);

struct LinearOracleReport {
    double max_rel_error = 0.0;
    bool pass = false;
    std::vector<double> terminal_simulated;
    std::vector<double> terminal_oracle;
};

// Single shared mode, constant densities, no forcing: the coefficients obey
// (diag(rho)/lambda + kappa) dc/dt = -(mu + L_gamma/lambda) c, and the run is
// checked against the matrix exponential of that system.
LinearOracleReport linear_oracle_test(const ExperimentSetup& setup, double tolerance = 1e-6);

} // namespace kvmix
