#include "kvmix/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

namespace kvmix {

namespace {

double y_metric(const SimState& a, const SimState& b, const MixtureParams& params,
                double rho_minus, const SpectralBasis& basis) {
    const int n = params.n;
    const int m = basis.mode_count();
    double y = 0.0;
    for (int i = 0; i < n; ++i) {
        double dv_l2 = 0.0, dv_h1 = 0.0;
        for (int k = 0; k < m; ++k) {
            const double d = a.coeffs[i][k] - b.coeffs[i][k];
            dv_l2 += d * d / basis.modes[k].lambda;
            dv_h1 += d * d;
        }
        double drho = 0.0;
        for (std::size_t p = 0; p < a.rho[i].data.size(); ++p) {
            const double d = a.rho[i].data[p] - b.rho[i].data[p];
            drho += d * d;
        }
        y += rho_minus * dv_l2 + drho * basis.cell_area() + params.kappa_minus * dv_h1;
    }
    return y;
}

} // namespace

RealizedRun realize(const ExperimentSetup& setup, int grid_size, int mode_cutoff) {
    const int n_grid = grid_size > 0 ? grid_size : setup.grid_size;
    const int cutoff = mode_cutoff > 0 ? mode_cutoff : setup.mode_cutoff;
    RealizedRun run;
    run.basis = build_basis(n_grid, cutoff);
    run.forcing = ForcingSpec(setup.params.n, setup.forcing_terms);
    std::vector<DensityField> rho0;
    std::vector<std::vector<double>> v0;
    for (int i = 0; i < setup.params.n; ++i) {
        rho0.push_back(evaluate_density_preset(setup.rho0[i], n_grid));
        v0.push_back(coefficients_from_modes(setup.v0[i], run.basis));
    }
    run.initial = validate_initial_data(std::move(rho0), std::move(v0), run.basis);
    run.state = make_initial_state(run.initial, run.basis);
    return run;
}

StabilityReport stability_experiment(const ExperimentSetup& setup, double epsilon,
                                     const Perturbation& perturbation) {
    if (epsilon < 0.0)
        throw Error(ErrorCode::ValidationError, "perturbation amplitude must be >= 0");
    RealizedRun base = realize(setup);
    if (perturbation.constituent < 0 || perturbation.constituent >= setup.params.n)
        throw Error(ErrorCode::ValidationError, "perturbed constituent out of range");
    double sign = 1.0;
    const int mode = base.basis.find_mode(perturbation.kx, perturbation.ky, perturbation.sin_parity, &sign);
    if (mode < 0)
        throw Error(ErrorCode::ValidationError, "perturbed mode is not within the basis cutoff");

    SimState s1 = base.state;
    SimState s2 = base.state;
    s2.coeffs[perturbation.constituent][mode] += sign * epsilon;

    StabilityReport report;
    report.times.push_back(s1.t);
    report.y_series.push_back(y_metric(s1, s2, setup.params, base.initial.rho_minus, base.basis));

    const int total = steps_between(s1.t, setup.t_end, setup.dt);
    const int stride = std::max(1, setup.output_stride);
    const double t0 = s1.t;
    for (int s = 1; s <= total; ++s) {
        s1 = step(s1, setup.dt, setup.params, base.forcing, base.basis);
        s2 = step(s2, setup.dt, setup.params, base.forcing, base.basis);
        s1.t = s2.t = t0 + s * setup.dt;
        if (s % stride == 0 || s == total) {
            report.times.push_back(s1.t);
            report.y_series.push_back(y_metric(s1, s2, setup.params, base.initial.rho_minus, base.basis));
        }
    }

    report.y0 = report.y_series.front();
    report.max_y = *std::max_element(report.y_series.begin(), report.y_series.end());
    if (epsilon == 0.0) return report;

    // least squares on log y over times clear of rounding noise
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * report.y0;
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int count = 0;
    for (std::size_t r = 0; r < report.times.size(); ++r) {
        if (report.y_series[r] <= floor) continue;
        const double t = report.times[r];
        const double ly = std::log(report.y_series[r]);
        st += t;
        sy += ly;
        stt += t * t;
        sty += t * ly;
        ++count;
    }
    if (count >= 2 && stt * count - st * st > 0.0) {
        report.growth_exponent = (count * sty - st * sy) / (count * stt - st * st);
        report.fitted = true;
        for (std::size_t r = 0; r < report.times.size(); ++r) {
            if (report.y_series[r] <= floor) continue;
            const double envelope = report.y0 * std::exp(report.growth_exponent * report.times[r]);
            report.envelope_violation = std::max(report.envelope_violation, report.y_series[r] / envelope - 1.0);
        }
    }
    return report;
}

ConvergenceReport convergence_study(const ExperimentSetup& setup, const std::vector<int>& cutoffs) {
    if (cutoffs.size() < 3)
        throw Error(ErrorCode::ValidationError, "convergence study needs at least 3 cutoff levels");
    for (std::size_t i = 1; i < cutoffs.size(); ++i)
        if (cutoffs[i] <= cutoffs[i - 1])
            throw Error(ErrorCode::ValidationError, "cutoff levels must be strictly increasing");

    ConvergenceReport report;
    std::vector<SimState> terminals;
    std::vector<SpectralBasis> bases;
    std::vector<double> rho_minus;
    for (int cutoff : cutoffs) {
        const int grid = 4 * cutoff; // quadrature refines with the basis
        RealizedRun level = realize(setup, grid, cutoff);
        SimState final =
            run(level.state, setup.t_end, setup.dt, setup.params, level.forcing, level.basis, RunOptions{});
        terminals.push_back(std::move(final));
        bases.push_back(level.basis);
        rho_minus.push_back(level.initial.rho_minus);
        report.levels.push_back({cutoff, grid});
    }

    for (std::size_t j = 0; j + 1 < terminals.size(); ++j) {
        const SpectralBasis& coarse = bases[j];
        const SpectralBasis& fine = bases[j + 1];
        const int n = setup.params.n;

        // velocity difference on the union (fine) basis, absent modes count as zero
        double dv_l2 = 0.0, dv_h1 = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < fine.mode_count(); ++k) {
                const Mode& m = fine.modes[k];
                const int ck = coarse.find_mode(m.kx, m.ky, m.sin_parity);
                const double cc = ck >= 0 ? terminals[j].coeffs[i][ck] : 0.0;
                const double d = terminals[j + 1].coeffs[i][k] - cc;
                dv_l2 += d * d / m.lambda;
                dv_h1 += d * d;
            }
        }

        // density difference on the coarse grid (fine grids restrict exactly
        // when the sizes divide; otherwise sample bilinearly)
        double drho = 0.0;
        const int nc = coarse.grid_size;
        const int nf = fine.grid_size;
        for (int i = 0; i < n; ++i) {
            for (int iy = 0; iy < nc; ++iy) {
                for (int ix = 0; ix < nc; ++ix) {
                    double fine_val;
                    if (nf % nc == 0) {
                        const int s = nf / nc;
                        fine_val = terminals[j + 1].rho[i].at(ix * s, iy * s);
                    } else {
                        const double px = double(ix) * nf / nc;
                        const double py = double(iy) * nf / nc;
                        const int jx = int(px), jy = int(py);
                        const double tx = px - jx, ty = py - jy;
                        const auto& f = terminals[j + 1].rho[i];
                        const int jx1 = (jx + 1) % nf, jy1 = (jy + 1) % nf;
                        fine_val = (1 - ty) * ((1 - tx) * f.at(jx, jy) + tx * f.at(jx1, jy)) +
                                   ty * ((1 - tx) * f.at(jx, jy1) + tx * f.at(jx1, jy1));
                    }
                    const double d = fine_val - terminals[j].rho[i].at(ix, iy);
                    drho += d * d;
                }
            }
        }
        drho *= coarse.cell_area();
        report.diffs.push_back(rho_minus[j] * dv_l2 + drho + setup.params.kappa_minus * dv_h1);
    }

    report.strictly_decreasing = report.diffs.size() >= 2;
    for (std::size_t j = 0; j + 1 < report.diffs.size(); ++j) {
        report.ratios.push_back(report.diffs[j + 1] / report.diffs[j]);
        if (!(report.diffs[j + 1] < report.diffs[j])) report.strictly_decreasing = false;
    }
    return report;
}

DecouplingReport decoupling_test(const ExperimentSetup& setup, double tolerance) {
    const int n = setup.params.n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (setup.params.mu(i, j) != 0.0 || setup.params.kappa(i, j) != 0.0 ||
                setup.params.gamma(i, j) != 0.0)
                throw Error(ErrorCode::ConfigNotDiagonal,
                            "decoupling test needs diagonal mu and kappa and zero gamma");
        }

    RealizedRun coupled = realize(setup);
    const int stride = std::max(1, setup.output_stride);

    std::vector<std::vector<Eigen::VectorXd>> coupled_series(n);
    RunOptions coupled_options;
    coupled_options.output_stride = stride;
    coupled_options.observer = [&](const SimState& s) {
        for (int i = 0; i < n; ++i) coupled_series[i].push_back(s.coeffs[i]);
    };
    run(coupled.state, setup.t_end, setup.dt, setup.params, coupled.forcing, coupled.basis, coupled_options);

    DecouplingReport report;
    double scale = 0.0;
    double max_abs_dev = 0.0;
    for (int i = 0; i < n; ++i) {
        ExperimentSetup single = setup;
        single.params = validate_params(Eigen::MatrixXd::Constant(1, 1, setup.params.mu(i, i)),
                                        Eigen::MatrixXd::Constant(1, 1, setup.params.kappa(i, i)),
                                        Eigen::MatrixXd::Zero(1, 1));
        single.rho0 = {setup.rho0[i]};
        single.v0 = {setup.v0[i]};
        single.forcing_terms.clear();
        for (ForcingTerm term : setup.forcing_terms)
            if (term.constituent == i) {
                term.constituent = 0;
                single.forcing_terms.push_back(term);
            }

        RealizedRun solo = realize(single);
        std::vector<Eigen::VectorXd> solo_series;
        RunOptions solo_options;
        solo_options.output_stride = stride;
        solo_options.observer = [&](const SimState& s) { solo_series.push_back(s.coeffs[0]); };
        run(solo.state, setup.t_end, setup.dt, single.params, solo.forcing, solo.basis, solo_options);

        if (solo_series.size() != coupled_series[i].size())
            throw Error(ErrorCode::LengthMismatch, "trajectory lengths differ");
        for (std::size_t r = 0; r < solo_series.size(); ++r) {
            scale = std::max(scale, solo_series[r].cwiseAbs().maxCoeff());
            max_abs_dev = std::max(max_abs_dev, (solo_series[r] - coupled_series[i][r]).cwiseAbs().maxCoeff());
        }
    }
    report.scale = scale;
    report.max_rel_deviation = scale > 0.0 ? max_abs_dev / scale : max_abs_dev;
    report.pass = report.max_rel_deviation <= tolerance;
    return report;
}

LinearOracleReport linear_oracle_test(const ExperimentSetup& setup, double tolerance) {
    const int n = setup.params.n;
    for (const DensityPreset& preset : setup.rho0)
        if (preset.amplitude != 0.0)
            throw Error(ErrorCode::ConfigNotLinearizable, "densities must be constant");
    if (!setup.forcing_terms.empty())
        throw Error(ErrorCode::ConfigNotLinearizable, "forcing must be absent");

    // all initial amplitudes must sit on one shared mode
    int kx = 0, ky = 0;
    bool sin_parity = false, found = false;
    for (const auto& modes : setup.v0) {
        for (const ModeAmplitude& entry : modes) {
            if (entry.amplitude == 0.0) continue;
            if (!found) {
                kx = entry.kx;
                ky = entry.ky;
                sin_parity = entry.sin_parity;
                found = true;
            } else if (entry.kx != kx || entry.ky != ky || entry.sin_parity != sin_parity) {
                throw Error(ErrorCode::ConfigNotLinearizable, "initial data must occupy a single mode");
            }
        }
    }
    if (!found)
        throw Error(ErrorCode::ConfigNotLinearizable, "initial data is identically zero");

    RealizedRun run_setup = realize(setup);
    double sign = 1.0;
    const int mode = run_setup.basis.find_mode(kx, ky, sin_parity, &sign);
    if (mode < 0)
        throw Error(ErrorCode::ConfigNotLinearizable, "shared mode is outside the basis cutoff");
    const double lambda = run_setup.basis.modes[mode].lambda;

    Eigen::VectorXd c0(n);
    for (int i = 0; i < n; ++i) c0[i] = run_setup.state.coeffs[i][mode];

    // (diag(rho)/lambda + kappa) dc/dt = -(mu + L_gamma/lambda) c
    Eigen::MatrixXd lhs = setup.params.kappa;
    for (int i = 0; i < n; ++i) lhs(i, i) += setup.rho0[i].base / lambda;
    Eigen::MatrixXd friction = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                friction(i, i) += setup.params.gamma(i, j);
                friction(i, j) -= setup.params.gamma(i, j);
            }
    const Eigen::MatrixXd rate = -lhs.inverse() * (setup.params.mu + friction / lambda);

    LinearOracleReport report;
    double max_err = 0.0;
    RunOptions options;
    options.output_stride = std::max(1, setup.output_stride);
    options.observer = [&](const SimState& s) {
        const Eigen::MatrixXd propagator = (rate * (s.t - 0.0)).exp();
        const Eigen::VectorXd expected = propagator * c0;
        double err2 = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int k = 0; k < run_setup.basis.mode_count(); ++k) {
                const double want = k == mode ? expected[i] : 0.0;
                const double d = s.coeffs[i][k] - want;
                err2 += d * d;
            }
        }
        const double scale = std::max(expected.norm(), 1e-300);
        max_err = std::max(max_err, std::sqrt(err2) / scale);
    };
    SimState final = run(run_setup.state, setup.t_end, setup.dt, setup.params, run_setup.forcing,
                         run_setup.basis, options);

    report.max_rel_error = max_err;
    report.pass = max_err <= tolerance;
    const Eigen::VectorXd expected_final = (rate * (final.t)).exp() * c0;
    for (int i = 0; i < n; ++i) {
        report.terminal_simulated.push_back(final.coeffs[i][mode]);
        report.terminal_oracle.push_back(expected_final[i]);
    }
    return report;
}

} // namespace kvmix
