#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "kvmix/config.hpp"
#include "kvmix/io.hpp"
#include "kvmix/pressure.hpp"

namespace fs = std::filesystem;
using namespace kvmix;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitExperimentFailed = 4;

std::string resolve_output_dir(const RunConfig& config, const std::string& cli_override) {
    if (!cli_override.empty()) return cli_override;
    if (!config.output_directory.empty()) return config.output_directory;
    if (const char* env = std::getenv("KVMIX_OUTPUT_DIR"); env && *env) return env;
    return "kvmix_out";
}

void print_bounds(const RunConfig& config) {
    RealizedRun realized = realize(to_setup(config));
    std::cout << "constituents       n = " << config.params.n << "\n"
              << "basis              m = " << realized.basis.mode_count() << " modes, N = " << config.grid_size
              << ", K = " << config.mode_cutoff << "\n"
              << "density bounds     rho- = " << format_full(realized.initial.rho_minus)
              << ", rho+ = " << format_full(realized.initial.rho_plus) << "\n"
              << "viscosity bounds   mu- = " << format_full(config.params.mu_minus)
              << ", mu+ = " << format_full(config.params.mu_plus) << "\n"
              << "elasticity bounds  kappa- = " << format_full(config.params.kappa_minus)
              << ", kappa+ = " << format_full(config.params.kappa_plus) << "\n"
              << "friction bound     gamma+ = " << format_full(config.params.gamma_plus) << "\n";
}

struct InvariantTable {
    bool max_principle = true;
    bool energy_lower_bounds = true;
    bool friction_nonnegative = true;
    double max_rho_drift = 0.0;
    double max_energy_residual = 0.0;
    double sup_pressure_l2 = 0.0;
};

InvariantTable scan_records(const std::vector<DiagnosticsRecord>& records, const MixtureParams& params,
                            double rho_minus, double rho_plus) {
    InvariantTable table;
    const int n = params.n;
    for (const DiagnosticsRecord& rec : records) {
        double h1_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            h1_sum += rec.h1_v[i];
            if (rec.rho_min[i] < rho_minus || rec.rho_max[i] > rho_plus) table.max_principle = false;
            if (!records.empty() && records.front().rho_l2[i] > 0.0)
                table.max_rho_drift = std::max(
                    table.max_rho_drift, std::abs(rec.rho_l2[i] - records.front().rho_l2[i]) / records.front().rho_l2[i]);
        }
        if (rec.Y1 - params.kappa_minus * h1_sum < -1e-10 * std::abs(rec.Y1)) table.energy_lower_bounds = false;
        if (rec.dissipation - 2.0 * params.mu_minus * h1_sum < -1e-10 * std::abs(rec.dissipation))
            table.energy_lower_bounds = false;
        if (rec.friction_loss < 0.0) table.friction_nonnegative = false;
        table.max_energy_residual = std::max(table.max_energy_residual, std::abs(rec.energy_residual));
    }
    return table;
}

int command_run(const RunConfig& config, const std::string& output_dir) {
    fs::create_directories(output_dir);
    const ExperimentSetup setup = to_setup(config);
    RealizedRun realized = realize(setup);

    const int field_stride = config.emit_fields ? config.field_stride() : 0;
    std::vector<std::pair<int, SimState>> field_states;
    auto field_observer = [&](const SimState& s) {
        if (!config.emit_fields) return;
        if (s.step_index % field_stride == 0 || s.t == config.t_end) field_states.emplace_back(s.step_index, s);
    };

    RunResult result = run_with_diagnostics(realized.state, config.t_end, config.dt, setup.params,
                                            realized.forcing, realized.basis, config.output_stride(),
                                            config.r_exponent, field_observer);

    write_diagnostics_csv((fs::path(output_dir) / "diagnostics.csv").string(), result.records);

    InvariantTable table =
        scan_records(result.records, setup.params, realized.initial.rho_minus, realized.initial.rho_plus);

    if (config.emit_fields) {
        for (const auto& [step_idx, state] : field_states) {
            FieldSnapshot snapshot;
            snapshot.n = setup.params.n;
            snapshot.grid_size = config.grid_size;
            snapshot.t = state.t;
            const auto dcdt = coeff_rates(state, setup.params, realized.forcing, realized.basis);
            const auto residuals = momentum_residual(state, dcdt, setup.params, realized.forcing, realized.basis);
            for (int i = 0; i < setup.params.n; ++i) {
                snapshot.rho.push_back(state.rho[i]);
                std::vector<double> c(state.coeffs[i].data(), state.coeffs[i].data() + state.coeffs[i].size());
                snapshot.velocity.push_back(synthesize(c, realized.basis));
                ScalarField pi = recover_pressure(residuals[i], realized.basis);
                double l2 = 0.0;
                for (double v : pi.data) l2 += v * v;
                table.sup_pressure_l2 = std::max(table.sup_pressure_l2, std::sqrt(l2 * realized.basis.cell_area()));
                snapshot.pressure.push_back(std::move(pi));
            }
            std::ostringstream name;
            name << "fields_" << step_idx << ".dat";
            write_field_snapshot((fs::path(output_dir) / name.str()).string(), snapshot);
        }
    }

    std::ostringstream summary;
    summary << "run summary\n"
            << "===========\n"
            << "steps              " << result.final_state.step_index << " (dt = " << format_full(config.dt) << ")\n"
            << "final time         " << format_full(result.final_state.t) << "\n"
            << "records            " << result.records.size() << "\n"
            << "max |v| displacement per substep  " << format_full(result.transport.max_displacement_cells)
            << " cells\n"
            << "cfl warning        " << (result.transport.cfl_exceeded ? "RAISED" : "none") << "\n\n"
            << "invariant                          status\n"
            << "max principle (density bounds)     " << (table.max_principle ? "pass" : "FAIL") << "\n"
            << "energy lower bounds                " << (table.energy_lower_bounds ? "pass" : "FAIL") << "\n"
            << "friction loss nonnegative          " << (table.friction_nonnegative ? "pass" : "FAIL") << "\n"
            << "max relative rho L2 drift          " << format_full(table.max_rho_drift) << "\n"
            << "max |energy residual|              " << format_full(table.max_energy_residual) << "\n";
    if (config.emit_fields) summary << "sup_t ||pi||_2                     " << format_full(table.sup_pressure_l2) << "\n";
    write_text_file((fs::path(output_dir) / "summary.txt").string(), summary.str());

    std::cout << summary.str();
    return table.max_principle && table.energy_lower_bounds && table.friction_nonnegative ? 0 : kExitRuntime;
}

int command_experiment(const RunConfig& config, const std::string& output_dir) {
    fs::create_directories(output_dir);
    const ExperimentSetup setup = to_setup(config);
    std::ostringstream summary;
    bool pass = true;

    switch (config.experiment) {
        case ExperimentKind::Stability: {
            StabilityReport report = stability_experiment(setup, config.stability_epsilon, config.perturbation);
            write_stability_csv((fs::path(output_dir) / "stability.csv").string(), report);
            summary << "stability experiment, epsilon = " << format_full(config.stability_epsilon) << "\n";
            if (config.stability_epsilon == 0.0) {
                pass = report.max_y == 0.0;
                summary << "y identically zero: " << (pass ? "yes (y == 0)" : "NO") << "\n";
            } else {
                pass = report.fitted && std::isfinite(report.growth_exponent) && report.envelope_violation <= 0.05;
                summary << "y(0) = " << format_full(report.y0) << "\n"
                        << "fitted growth exponent = " << format_full(report.growth_exponent) << "\n"
                        << "envelope violation = " << format_full(report.envelope_violation) << " (limit 0.05)\n";
            }
            break;
        }
        case ExperimentKind::Convergence: {
            ConvergenceReport report = convergence_study(setup, config.convergence_cutoffs);
            write_convergence_csv((fs::path(output_dir) / "convergence.csv").string(), report);
            summary << "convergence study over cutoffs";
            for (const auto& level : report.levels) summary << " K=" << level.mode_cutoff;
            summary << "\n";
            for (std::size_t i = 0; i < report.diffs.size(); ++i)
                summary << "diff level " << i << " -> " << i + 1 << ": " << format_full(report.diffs[i]) << "\n";
            pass = report.strictly_decreasing;
            summary << "successive differences strictly decreasing: " << (pass ? "yes" : "NO") << "\n";
            break;
        }
        case ExperimentKind::Decoupling: {
            DecouplingReport report = decoupling_test(setup);
            summary << "decoupling test\n"
                    << "max relative deviation = " << format_full(report.max_rel_deviation) << " (limit 1e-12)\n";
            pass = report.pass;
            break;
        }
        case ExperimentKind::LinearOracle: {
            LinearOracleReport report = linear_oracle_test(setup);
            summary << "linear oracle test\n"
                    << "max relative error vs matrix exponential = " << format_full(report.max_rel_error)
                    << " (limit 1e-6)\n";
            pass = report.pass;
            break;
        }
        case ExperimentKind::None:
            throw Error(ErrorCode::ValidationError, "config has experiment kind \"none\"; use the run command");
    }

    summary << "result: " << (pass ? "PASS" : "FAIL") << "\n";
    write_text_file((fs::path(output_dir) / "experiment_summary.txt").string(), summary.str());
    std::cout << summary.str();
    return pass ? 0 : kExitExperimentFailed;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral Galerkin solver for incompressible Kelvin-Voigt mixtures"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    int seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("config", config_path, "TOML run configuration")->required();
        cmd->add_option("--output-dir", output_dir, "override the output directory");
        cmd->add_option("--seed", seed, "reserved; the solver is deterministic")->each([&](const std::string&) {
            seed_given = true;
        });
    };

    CLI::App* cmd_run = app.add_subcommand("run", "integrate the mixture system and write diagnostics");
    CLI::App* cmd_experiment = app.add_subcommand("experiment", "run the experiment configured in the file");
    CLI::App* cmd_validate = app.add_subcommand("validate", "validate a config and print derived bounds");
    add_common(cmd_run);
    add_common(cmd_experiment);
    add_common(cmd_validate);

    CLI11_PARSE(app, argc, argv);

    if (seed_given) std::cerr << "warning: --seed is ignored; runs are deterministic\n";

    try {
        RunConfig config = load_config(config_path);
        if (cmd_validate->parsed()) {
            print_bounds(config);
            return 0;
        }
        const std::string dir = resolve_output_dir(config, output_dir);
        if (cmd_run->parsed()) return command_run(config, dir);
        return command_experiment(config, dir);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::ValidationError) return kExitValidation;
        return kExitRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
