// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit code is the failure count.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kvmix/config.hpp"
#include "kvmix/io.hpp"
#include "kvmix/pressure.hpp"

using namespace kvmix;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); }
};

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] C%02d %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// n = 2 linear regime: constant densities, one shared mode, friction coupling on
ExperimentSetup linear_setup(double dt) {
    ExperimentSetup s;
    s.grid_size = 32;
    s.mode_cutoff = 4;
    MatrixXd mu(2, 2), kappa(2, 2), gamma(2, 2);
    mu << 1.0, 0.2, 0.2, 0.8;
    kappa << 0.9, 0.1, 0.1, 1.1;
    gamma << 0, 0.3, 0.3, 0;
    s.params = validate_params(mu, kappa, gamma);
    s.rho0 = {{1.0, 0.0, 0, 0}, {1.4, 0.0, 0, 0}};
    s.v0 = {{{1, 0, false, 1.0}}, {{1, 0, false, -0.5}}};
    s.dt = dt;
    s.t_end = 1.0;
    s.output_stride = 100;
    return s;
}

// n = 2 nonlinear forced reference run: rho0 = 1.5 +- 0.5 cos(x), K = 8, N = 64
ExperimentSetup reference_setup(double dt, int grid) {
    ExperimentSetup s;
    s.grid_size = grid;
    s.mode_cutoff = 8;
    MatrixXd mu(2, 2), kappa(2, 2), gamma(2, 2);
    mu << 4.0, 0.4, 0.4, 3.6;
    kappa << 0.2, 0.04, 0.04, 0.22;
    gamma << 0, 0.1, 0.1, 0;
    s.params = validate_params(mu, kappa, gamma);
    s.rho0 = {{1.5, 0.5, 1, 0}, {1.5, -0.5, 1, 0}};
    s.v0 = {{{1, 0, false, 0.3}, {1, 1, true, 0.18}}, {{0, 1, false, -0.24}, {2, 1, true, 0.12}}};
    s.forcing_terms = {{0, 1, 0, false, 0.08, 6.0, 0.0}, {1, 0, 1, true, 0.056, 4.8, 0.4}};
    s.dt = dt;
    s.t_end = 1.0;
    s.output_stride = 1;
    return s;
}

ExperimentSetup stability_setup() {
    ExperimentSetup s;
    s.grid_size = 32;
    s.mode_cutoff = 4;
    MatrixXd mu(2, 2), kappa(2, 2), gamma(2, 2);
    mu << 1.5, 0.3, 0.3, 1.2;
    kappa << 0.8, 0.2, 0.2, 0.9;
    gamma << 0, 0.1, 0.1, 0;
    s.params = validate_params(mu, kappa, gamma);
    s.rho0 = {{1.3, 0.2, 1, 0}, {1.3, -0.2, 1, 0}};
    s.v0 = {{{1, 0, false, 0.05}, {1, 1, true, 0.03}}, {{0, 1, false, -0.04}}};
    s.dt = 2e-3;
    s.t_end = 1.0;
    s.output_stride = 5; // observations every 0.01
    return s;
}

RunResult run_setup(const ExperimentSetup& s, const std::function<void(const SimState&)>& extra = {}) {
    RealizedRun r = realize(s);
    return run_with_diagnostics(r.state, s.t_end, s.dt, s.params, r.forcing, r.basis, s.output_stride,
                                s.r_exponent, extra);
}

double max_rho_drift(const RunResult& result) {
    double drift = 0.0;
    const auto& first = result.records.front();
    for (const auto& rec : result.records)
        for (std::size_t i = 0; i < rec.rho_l2.size(); ++i)
            drift = std::max(drift, std::abs(rec.rho_l2[i] - first.rho_l2[i]) / first.rho_l2[i]);
    return drift;
}

} // namespace

int main() {
    std::printf("acceptance suite\n================\n");

    // ---- criteria 1-2: linear oracle and RK2 order ----
    double err_dt = 0.0;
    {
        Timer timer;
        LinearOracleReport oracle = linear_oracle_test(linear_setup(1e-3));
        err_dt = oracle.max_rel_error;
        const double elapsed = timer.seconds();
        report(1, "linear oracle", oracle.max_rel_error <= 1e-6 && elapsed < 10.0,
               fmt("rel error %.3e (tol 1e-6), %.1fs", oracle.max_rel_error, elapsed));
    }
    {
        Timer timer;
        LinearOracleReport half = linear_oracle_test(linear_setup(5e-4));
        const double ratio = err_dt / half.max_rel_error;
        const double elapsed = timer.seconds();
        report(2, "RK2 order", ratio >= 3.2 && ratio <= 4.8 && elapsed < 20.0,
               fmt("error ratio %.2f (window [3.2, 4.8]), %.1fs", ratio, elapsed));
    }

    // ---- criteria 3-6, 10 share the nonlinear forced reference run ----
    RunResult reference;
    std::vector<SimState> snapshots;
    double reference_seconds = 0.0;
    {
        Timer timer;
        const ExperimentSetup setup = reference_setup(5e-3, 64);
        reference = run_setup(setup, [&](const SimState& s) {
            if (s.step_index == 50 || s.step_index == 100 || s.step_index == 200) snapshots.push_back(s);
        });
        reference_seconds = timer.seconds();

        bool within = true;
        double lo = 10.0, hi = 0.0;
        for (const auto& rec : reference.records)
            for (int i = 0; i < 2; ++i) {
                lo = std::min(lo, rec.rho_min[i]);
                hi = std::max(hi, rec.rho_max[i]);
                if (rec.rho_min[i] < 1.0 || rec.rho_max[i] > 2.0) within = false;
            }
        report(3, "max principle", within && reference_seconds < 60.0,
               fmt("rho range [%.*g, %.*g] inside [1, 2], zero tolerance, %.1fs", 17, lo, 17, hi,
                   reference_seconds));
    }
    {
        Timer timer;
        RunResult half = run_setup(reference_setup(2.5e-3, 64));
        const double r_base = check_energy_identity(reference.records).max_abs_residual;
        const double r_half = check_energy_identity(half.records).max_abs_residual;
        const double ratio = r_base / r_half;
        const double elapsed = reference_seconds + timer.seconds();
        report(4, "energy identity", ratio >= 3.0 && elapsed < 120.0,
               fmt("residual %.3e -> %.3e, ratio %.2f (need >= 3), %.0fs combined", r_base, r_half, ratio,
                   elapsed));
    }
    {
        bool bounds = true;
        double worst = std::numeric_limits<double>::infinity();
        const MixtureParams& params = reference_setup(5e-3, 64).params;
        for (const auto& rec : reference.records) {
            const double h1_sum = rec.h1_v[0] + rec.h1_v[1];
            const double y1_margin = rec.Y1 - params.kappa_minus * h1_sum + 1e-10 * std::abs(rec.Y1);
            const double diss_margin =
                rec.dissipation - 2.0 * params.mu_minus * h1_sum + 1e-10 * std::abs(rec.dissipation);
            if (y1_margin < 0.0 || diss_margin < 0.0) bounds = false;
            worst = std::min({worst, y1_margin, diss_margin});
        }
        report(5, "energy lower bounds", bounds, fmt("worst signed margin %.3e (slack 1e-10 relative)", worst));
    }
    {
        Timer timer;
        RunResult fine = run_setup(reference_setup(2.5e-3, 128));
        const double drift_base = max_rho_drift(reference);
        const double drift_fine = max_rho_drift(fine);
        report(6, "density L2 conservation", drift_base <= 1e-2 && drift_fine < drift_base,
               fmt("drift %.3e (tol 1e-2), refined %.3e, %.0fs", drift_base, drift_fine, timer.seconds()));
    }

    // ---- criterion 7: decoupling ----
    {
        Timer timer;
        ExperimentSetup s;
        s.grid_size = 32;
        s.mode_cutoff = 4;
        MatrixXd mu = MatrixXd::Zero(3, 3), kappa = MatrixXd::Zero(3, 3);
        mu.diagonal() << 1.0, 1.6, 2.2;
        kappa.diagonal() << 0.5, 0.7, 0.4;
        s.params = validate_params(mu, kappa, MatrixXd::Zero(3, 3));
        s.rho0 = {{1.2, 0.2, 1, 0}, {1.5, 0.0, 0, 0}, {1.1, 0.1, 0, 1}};
        s.v0 = {{{1, 0, false, 0.2}}, {{0, 1, true, -0.15}}, {{1, 1, false, 0.1}}};
        s.dt = 5e-3;
        s.t_end = 0.5;
        s.output_stride = 10;
        DecouplingReport report_data = decoupling_test(s);
        const double elapsed = timer.seconds();
        report(7, "diagonal decoupling", report_data.pass && elapsed < 30.0,
               fmt("max relative deviation %.3e (tol 1e-12), %.1fs", report_data.max_rel_deviation, elapsed));
    }

    // ---- criterion 8: determinism of the written diagnostics ----
    {
        ExperimentSetup s = reference_setup(5e-3, 64);
        s.t_end = 0.1;
        const fs::path dir = fs::temp_directory_path() / "kvmix_acceptance";
        fs::create_directories(dir);
        write_diagnostics_csv((dir / "rep1.csv").string(), run_setup(s).records);
        write_diagnostics_csv((dir / "rep2.csv").string(), run_setup(s).records);
        auto read = [](const fs::path& p) {
            std::ifstream in(p, std::ios::binary);
            return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        };
        const std::string a = read(dir / "rep1.csv");
        const bool pass = !a.empty() && a == read(dir / "rep2.csv");
        report(8, "determinism", pass, fmt("two runs, %zu bytes, byte-identical: %s", a.size(), pass ? "yes" : "no"));
    }

    // ---- criterion 9: stability under perturbation ----
    {
        Timer timer;
        const ExperimentSetup s = stability_setup();
        const Perturbation mode{0, 1, 0, false};
        StabilityReport r1 = stability_experiment(s, 1e-6, mode);
        StabilityReport r2 = stability_experiment(s, 2e-6, mode);
        double y1 = 0.0, y2 = 0.0;
        for (std::size_t i = 0; i < r1.times.size(); ++i)
            if (std::abs(r1.times[i] - 0.1) < 1e-12) {
                y1 = r1.y_series[i];
                y2 = r2.y_series[i];
            }
        const double ratio = y2 / y1;
        const bool pass = r1.fitted && std::isfinite(r1.growth_exponent) && r1.envelope_violation <= 0.05 &&
                          ratio >= 3.6 && ratio <= 4.4;
        report(9, "perturbation stability", pass,
               fmt("exponent %.3f, envelope violation %.4f (tol 0.05), eps-doubling ratio %.3f, %.1fs",
                   r1.growth_exponent, r1.envelope_violation, ratio, timer.seconds()));
    }

    // ---- criterion 10: pressure recovery on the reference snapshots ----
    {
        const ExperimentSetup setup = reference_setup(5e-3, 64);
        RealizedRun realized = realize(setup);
        double worst_mean = 0.0, worst_rel = 0.0;
        for (const SimState& state : snapshots) {
            const auto dcdt = coeff_rates(state, setup.params, realized.forcing, realized.basis);
            const auto residuals = momentum_residual(state, dcdt, setup.params, realized.forcing, realized.basis);
            for (const GridVectorField& r : residuals) {
                PressureField pi = recover_pressure(r, realized.basis);
                double mean = 0.0;
                for (double v : pi.data) mean += v;
                mean /= double(pi.data.size());
                worst_mean = std::max(worst_mean, std::abs(mean));

                GridVectorField grad = spectral_gradient(pi, realized.basis);
                GridVectorField leray = leray_project(r, realized.basis);
                double num = 0.0, den = 0.0;
                for (std::size_t p = 0; p < r.x.size(); ++p) {
                    const double dx = r.x.data[p] - grad.x.data[p] - leray.x.data[p];
                    const double dy = r.y.data[p] - grad.y.data[p] - leray.y.data[p];
                    num += dx * dx + dy * dy;
                    den += r.x.data[p] * r.x.data[p] + r.y.data[p] * r.y.data[p];
                }
                worst_rel = std::max(worst_rel, std::sqrt(num / den));
            }
        }
        const bool pass = !snapshots.empty() && worst_mean <= 1e-12 && worst_rel <= 1e-8;
        report(10, "pressure recovery", pass,
               fmt("%zu snapshots, |mean| %.2e (tol 1e-12), Helmholtz error %.2e (tol 1e-8)", snapshots.size(),
                   worst_mean, worst_rel));
    }

    // ---- criterion 11: parameter admissibility gate ----
    {
        auto code_of = [](const std::function<void()>& fn) -> ErrorCode {
            try {
                fn();
            } catch (const Error& e) {
                return e.code();
            }
            return ErrorCode::ValidationError;
        };
        const MatrixXd eye = MatrixXd::Identity(2, 2);
        MatrixXd asym_kappa(2, 2), indef_mu(2, 2), neg_gamma(2, 2), diag_gamma(2, 2);
        asym_kappa << 1, 0.2, 0.3, 1;
        indef_mu << 1, 2, 2, 1;
        neg_gamma << 0, -0.1, -0.1, 0;
        diag_gamma << 0.2, 0.1, 0.1, 0;
        const bool ok1 = code_of([&] { validate_params(eye, asym_kappa, MatrixXd::Zero(2, 2)); }) ==
                         ErrorCode::AsymmetricMatrix;
        const bool ok2 = code_of([&] { validate_params(indef_mu, eye, MatrixXd::Zero(2, 2)); }) ==
                         ErrorCode::NotPositiveDefinite;
        const bool ok3 = code_of([&] { validate_params(eye, eye, neg_gamma); }) == ErrorCode::NegativeFriction;
        const bool ok4 = code_of([&] { validate_params(eye, eye, diag_gamma); }) ==
                         ErrorCode::NonzeroFrictionDiagonal;
        report(11, "parameter gate", ok1 && ok2 && ok3 && ok4,
               fmt("asymmetric kappa %s, indefinite mu %s, negative gamma %s, nonzero diagonal %s",
                   ok1 ? "ok" : "WRONG", ok2 ? "ok" : "WRONG", ok3 ? "ok" : "WRONG", ok4 ? "ok" : "WRONG"));
    }

    // ---- criterion 12: convergence in the basis dimension ----
    {
        Timer timer;
        ExperimentSetup s;
        s.grid_size = 16;
        s.mode_cutoff = 4;
        MatrixXd mu(2, 2), kappa(2, 2), gamma(2, 2);
        mu << 1.5, 0.3, 0.3, 1.2;
        kappa << 0.8, 0.2, 0.2, 0.9;
        gamma << 0, 0.1, 0.1, 0;
        s.params = validate_params(mu, kappa, gamma);
        s.rho0 = {{1.4, 0.3, 1, 0}, {1.4, -0.3, 0, 1}};
        s.v0 = {{{1, 0, false, 0.25}, {0, 1, true, 0.2}}, {{1, 1, false, -0.2}}};
        s.dt = 5e-3;
        s.t_end = 0.25;
        ConvergenceReport conv = convergence_study(s, {4, 8, 16});
        const double elapsed = timer.seconds();
        report(12, "convergence in m", conv.strictly_decreasing && elapsed < 300.0,
               fmt("diffs %.3e -> %.3e (strictly decreasing), %.0fs", conv.diffs[0], conv.diffs[1], elapsed));
    }

    std::printf("================\n%d of 12 criteria failed\n", failures);
    return failures;
}
