#include "kvmix/diagnostics.hpp"

#include <cmath>

#include "kvmix/pressure.hpp"

namespace kvmix {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

double quadrature_l2sq(const ScalarField& f, const SpectralBasis& basis) {
    double sum = 0.0;
    for (double v : f.data) sum += v * v;
    return sum * basis.cell_area();
}

} // namespace

DiagnosticsTracker::DiagnosticsTracker(const MixtureParams& params, const ForcingSpec& forcing,
                                       const SpectralBasis& basis, double r_exponent)
    : params_(params), forcing_(forcing), basis_(basis), r_exponent_(r_exponent) {}

DiagnosticsRecord DiagnosticsTracker::push(const SimState& state) {
    const int n = params_.n;
    const int m = basis_.mode_count();

    DiagnosticsRecord rec;
    rec.t = state.t;
    rec.l2_v.resize(n);
    rec.h1_v.resize(n);
    rec.rho_l2.resize(n);
    rec.rho_min.resize(n);
    rec.rho_max.resize(n);
    rec.grad_rho_sup.resize(n);
    rec.dt_rho_sup.resize(n);
    rec.lap_v_r.resize(n);

    const GalerkinSystem sys = assemble(state, params_, forcing_, basis_);
    const Eigen::VectorXd dcdt = solve_system(sys);

    Eigen::VectorXd stacked(std::size_t(n) * m);
    for (int i = 0; i < n; ++i) stacked.segment(i * m, m) = state.coeffs[i];
    rec.Y1 = stacked.dot(sys.A * stacked);

    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd& c = state.coeffs[i];
        double l2 = 0.0;
        for (int k = 0; k < m; ++k) l2 += c[k] * c[k] / basis_.modes[k].lambda;
        rec.l2_v[i] = l2;
        rec.h1_v[i] = c.squaredNorm();

        rec.rho_l2[i] = quadrature_l2sq(state.rho[i], basis_);
        auto [lo, hi] = density_extrema(state.rho[i]);
        rec.rho_min[i] = lo;
        rec.rho_max[i] = hi;

        GridVectorField grad = spectral_gradient(state.rho[i], basis_);
        double gsup = 0.0;
        for (std::size_t p = 0; p < grad.x.size(); ++p)
            gsup = std::max(gsup, std::hypot(grad.x.data[p], grad.y.data[p]));
        rec.grad_rho_sup[i] = gsup;

        Eigen::VectorXd lap_coeffs = c;
        for (int k = 0; k < m; ++k) lap_coeffs[k] *= -basis_.modes[k].lambda;
        GridVectorField lap = synthesize(to_std(lap_coeffs), basis_);
        double lr = 0.0;
        for (std::size_t p = 0; p < lap.x.size(); ++p)
            lr += std::pow(std::hypot(lap.x.data[p], lap.y.data[p]), r_exponent_);
        rec.lap_v_r[i] = std::pow(lr * basis_.cell_area(), 1.0 / r_exponent_);

        if (prev_state_) {
            double dsup = 0.0;
            const double dt = state.t - prev_state_->t;
            if (dt > 0.0)
                for (std::size_t p = 0; p < state.rho[i].data.size(); ++p)
                    dsup = std::max(dsup, std::abs(state.rho[i].data[p] - prev_state_->rho[i].data[p]) / dt);
            rec.dt_rho_sup[i] = dsup;
        }
    }

    double diss = 0.0, fric = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            diss += 2.0 * params_.mu(i, j) * state.coeffs[i].dot(state.coeffs[j]);
            if (params_.gamma(i, j) != 0.0) {
                double sq = 0.0;
                for (int k = 0; k < m; ++k) {
                    const double d = state.coeffs[i][k] - state.coeffs[j][k];
                    sq += d * d / basis_.modes[k].lambda;
                }
                fric += params_.gamma(i, j) * sq;
            }
        }
    }
    rec.dissipation = diss;
    rec.friction_loss = fric;

    double pow_in = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!forcing_.has_terms_for(i)) continue;
        GridVectorField f = forcing_.evaluate(i, state.t, basis_.grid_size);
        GridVectorField g(basis_.grid_size);
        for (std::size_t p = 0; p < g.x.size(); ++p) {
            g.x.data[p] = state.rho[i].data[p] * f.x.data[p];
            g.y.data[p] = state.rho[i].data[p] * f.y.data[p];
        }
        std::vector<double> proj = project_l2(g, basis_);
        for (int k = 0; k < m; ++k) pow_in += 2.0 * proj[k] * state.coeffs[i][k];
    }
    rec.power_in = pow_in;

    // running bounds
    double l2h1 = 0.0, h1_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        l2h1 += rec.l2_v[i] + rec.h1_v[i];
        h1_sum += rec.h1_v[i];
    }
    double xi2_integrand = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd r = dcdt.segment(i * m, m);
        const Eigen::MatrixXd mass =
            sys.A.block(i * m, i * m, m, m) - params_.kappa(i, i) * Eigen::MatrixXd::Identity(m, m);
        xi2_integrand += r.dot(mass * r) + params_.kappa_plus * r.squaredNorm();
    }

    if (prev_record_) {
        const double span = rec.t - prev_record_->t;
        if (span > 0.0) {
            rec.energy_residual = (rec.Y1 - prev_record_->Y1) / span +
                                  0.5 * (rec.dissipation + prev_record_->dissipation) +
                                  0.5 * (rec.friction_loss + prev_record_->friction_loss) -
                                  0.5 * (rec.power_in + prev_record_->power_in);
            h1_integral_ += 0.5 * span * (h1_sum + prev_h1_sum_);
            xi2_integral_ += 0.5 * span * (xi2_integrand + prev_xi2_integrand_);
        }
    }
    sup_l2_h1_ = std::max(sup_l2_h1_, l2h1);
    rec.bound_xi1 = sup_l2_h1_ + h1_integral_;
    rec.bound_xi2 = xi2_integral_;

    prev_state_ = state;
    prev_record_ = rec;
    prev_h1_sum_ = h1_sum;
    prev_xi2_integrand_ = xi2_integrand;
    records_.push_back(rec);
    return rec;
}

DiagnosticsRecord compute_record(const SimState& state, const SimState* prev,
                                 const MixtureParams& params, const ForcingSpec& forcing,
                                 const SpectralBasis& basis, double r_exponent) {
    DiagnosticsTracker tracker(params, forcing, basis, r_exponent);
    if (prev) tracker.push(*prev);
    return tracker.push(state);
}

EnergyIdentityReport check_energy_identity(const std::vector<DiagnosticsRecord>& records) {
    if (records.size() < 3)
        throw Error(ErrorCode::InsufficientRecords,
                    "need at least 3 records, got " + std::to_string(records.size()));
    const double spacing = records[1].t - records[0].t;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const double d = records[i].t - records[i - 1].t;
        if (std::abs(d - spacing) > 1e-9 * std::max(1.0, std::abs(spacing)))
            throw Error(ErrorCode::InsufficientRecords, "records are not uniformly spaced");
    }
    EnergyIdentityReport report;
    report.record_spacing = spacing;
    for (std::size_t i = 1; i < records.size(); ++i)
        report.max_abs_residual = std::max(report.max_abs_residual, std::abs(records[i].energy_residual));
    return report;
}

double energy_identity_order(const std::vector<DiagnosticsRecord>& coarse,
                             const std::vector<DiagnosticsRecord>& fine) {
    const double rc = check_energy_identity(coarse).max_abs_residual;
    const double rf = check_energy_identity(fine).max_abs_residual;
    if (rf <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(rc / rf);
}

AprioriBoundsReport check_apriori_bounds(const std::vector<DiagnosticsRecord>& records,
                                         const ForcingSpec& forcing, const SpectralBasis& basis) {
    if (records.empty())
        throw Error(ErrorCode::InsufficientRecords, "no records");
    AprioriBoundsReport report;
    const int n = int(records.front().l2_v.size());
    bool finite = true;
    for (const DiagnosticsRecord& rec : records) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += rec.l2_v[i] + rec.h1_v[i];
        if (!std::isfinite(sum)) finite = false;
        report.sup_energy = std::max(report.sup_energy, sum);
    }
    report.xi2_integral = records.back().bound_xi2;

    double f_integral = 0.0;
    if (!forcing.is_zero()) {
        double prev_val = 0.0;
        for (std::size_t r = 0; r < records.size(); ++r) {
            double val = 0.0;
            for (int i = 0; i < n; ++i) {
                GridVectorField f = forcing.evaluate(i, records[r].t, basis.grid_size);
                val += inner_l2(f, f, basis);
            }
            if (r > 0) f_integral += 0.5 * (records[r].t - records[r - 1].t) * (val + prev_val);
            prev_val = val;
        }
    }
    double initial = 0.0;
    for (int i = 0; i < n; ++i) initial += records.front().l2_v[i] + records.front().h1_v[i];
    report.surrogate_xi1 = initial + f_integral;
    report.growth_warning = !finite || report.sup_energy > 10.0 * report.surrogate_xi1;
    return report;
}

RunResult run_with_diagnostics(SimState initial, double t_end, double dt,
                               const MixtureParams& params, const ForcingSpec& forcing,
                               const SpectralBasis& basis, int output_stride, double r_exponent,
                               const std::function<void(const SimState&)>& extra_observer) {
    RunResult result;
    DiagnosticsTracker tracker(params, forcing, basis, r_exponent);
    RunOptions options;
    options.output_stride = output_stride;
    options.observer = [&](const SimState& s) {
        tracker.push(s);
        if (extra_observer) extra_observer(s);
    };
    result.final_state = run(std::move(initial), t_end, dt, params, forcing, basis, options, &result.transport);
    result.records = tracker.records();
    return result;
}

} // namespace kvmix
