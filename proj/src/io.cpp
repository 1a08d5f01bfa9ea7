#include "kvmix/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace kvmix {

static_assert(std::endian::native == std::endian::little, "snapshot format is little-endian");

std::string format_full(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");

    const int n = records.empty() ? 0 : int(records.front().l2_v.size());
    out << "t,Y1,dissipation,friction_loss,power_in,energy_residual,bound_xi1,bound_xi2";
    for (int i = 1; i <= n; ++i)
        out << ",l2_v_" << i << ",h1_v_" << i << ",rho_l2_" << i << ",rho_min_" << i << ",rho_max_" << i
            << ",grad_rho_sup_" << i << ",dt_rho_sup_" << i << ",lap_v_r_" << i;
    out << "\n";

    for (const DiagnosticsRecord& rec : records) {
        out << format_full(rec.t) << ',' << format_full(rec.Y1) << ',' << format_full(rec.dissipation) << ','
            << format_full(rec.friction_loss) << ',' << format_full(rec.power_in) << ','
            << format_full(rec.energy_residual) << ',' << format_full(rec.bound_xi1) << ','
            << format_full(rec.bound_xi2);
        for (int i = 0; i < n; ++i)
            out << ',' << format_full(rec.l2_v[i]) << ',' << format_full(rec.h1_v[i]) << ','
                << format_full(rec.rho_l2[i]) << ',' << format_full(rec.rho_min[i]) << ','
                << format_full(rec.rho_max[i]) << ',' << format_full(rec.grad_rho_sup[i]) << ','
                << format_full(rec.dt_rho_sup[i]) << ',' << format_full(rec.lap_v_r[i]);
        out << "\n";
    }
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

namespace {

void write_doubles(std::ofstream& out, const std::vector<double>& values) {
    out.write(reinterpret_cast<const char*>(values.data()), std::streamsize(values.size() * sizeof(double)));
}

std::vector<double> read_doubles(std::ifstream& in, std::size_t count) {
    std::vector<double> values(count);
    in.read(reinterpret_cast<char*>(values.data()), std::streamsize(count * sizeof(double)));
    if (!in) throw Error(ErrorCode::IoError, "snapshot truncated");
    return values;
}

} // namespace

void write_field_snapshot(const std::string& path, const FieldSnapshot& snapshot) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << "KVMIX-FIELD v1 n=" << snapshot.n << " N=" << snapshot.grid_size << " t=" << format_full(snapshot.t)
        << "\n";
    for (int i = 0; i < snapshot.n; ++i) {
        write_doubles(out, snapshot.rho[i].data);
        write_doubles(out, snapshot.velocity[i].x.data);
        write_doubles(out, snapshot.velocity[i].y.data);
        write_doubles(out, snapshot.pressure[i].data);
    }
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

FieldSnapshot read_field_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
    std::string header;
    std::getline(in, header);
    FieldSnapshot snapshot;
    char version_tag[32] = {0};
    if (std::sscanf(header.c_str(), "KVMIX-FIELD %31s n=%d N=%d t=%lf", version_tag, &snapshot.n,
                    &snapshot.grid_size, &snapshot.t) != 4 ||
        std::string(version_tag) != "v1")
        throw Error(ErrorCode::IoError, "'" + path + "' is not a KVMIX-FIELD v1 snapshot");

    const std::size_t cells = std::size_t(snapshot.grid_size) * snapshot.grid_size;
    for (int i = 0; i < snapshot.n; ++i) {
        ScalarField rho(snapshot.grid_size);
        rho.data = read_doubles(in, cells);
        GridVectorField v(snapshot.grid_size);
        v.x.data = read_doubles(in, cells);
        v.y.data = read_doubles(in, cells);
        ScalarField pi(snapshot.grid_size);
        pi.data = read_doubles(in, cells);
        snapshot.rho.push_back(std::move(rho));
        snapshot.velocity.push_back(std::move(v));
        snapshot.pressure.push_back(std::move(pi));
    }
    return snapshot;
}

void write_stability_csv(const std::string& path, const StabilityReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << "t,y\n";
    for (std::size_t i = 0; i < report.times.size(); ++i)
        out << format_full(report.times[i]) << ',' << format_full(report.y_series[i]) << "\n";
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << "mode_cutoff,grid_size,diff_to_next_finer\n";
    for (std::size_t i = 0; i < report.levels.size(); ++i) {
        out << report.levels[i].mode_cutoff << ',' << report.levels[i].grid_size << ',';
        if (i < report.diffs.size())
            out << format_full(report.diffs[i]);
        else
            out << "";
        out << "\n";
    }
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

} // namespace kvmix
