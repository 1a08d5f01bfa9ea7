#pragma once

#include <string>
#include <vector>

#include "kvmix/diagnostics.hpp"
#include "kvmix/experiments.hpp"

namespace kvmix {

// diagnostics.csv: one header row naming every record field, one data row per
// output time, printed with 17 significant digits.
void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);

// Field snapshot: ASCII header "KVMIX-FIELD v1 n=<n> N=<N> t=<t>" followed by
// little-endian 64-bit floats, per constituent rho, v_x, v_y, pi, each row-major.
struct FieldSnapshot {
    int n = 0;
    int grid_size = 0;
    double t = 0.0;
    std::vector<ScalarField> rho;
    std::vector<GridVectorField> velocity;
    std::vector<ScalarField> pressure;
};

void write_field_snapshot(const std::string& path, const FieldSnapshot& snapshot);
FieldSnapshot read_field_snapshot(const std::string& path);

void write_stability_csv(const std::string& path, const StabilityReport& report);
void write_convergence_csv(const std::string& path, const ConvergenceReport& report);

void write_text_file(const std::string& path, const std::string& contents);

std::string format_full(double value); // %.17g

} // namespace kvmix
