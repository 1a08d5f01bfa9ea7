#pragma once

#include <optional>
#include <vector>

#include "kvmix/engine.hpp"

namespace kvmix {

// Energies, norms and identity residuals observed at one output time.
// Per-constituent quantities are indexed by constituent.
struct DiagnosticsRecord {
    double t = 0.0;
    std::vector<double> l2_v;          // |v_i|_2^2
    std::vector<double> h1_v;          // |grad v_i|_2^2
    double Y1 = 0.0;                   // sum int rho_i |v_i|^2 + sum kappa_ij int grad v_i : grad v_j
    double dissipation = 0.0;          // 2 sum mu_ij int grad v_i : grad v_j
    double friction_loss = 0.0;        // sum gamma_ij int |v_i - v_j|^2
    double power_in = 0.0;             // 2 sum int rho_i f_i . v_i
    double energy_residual = 0.0;      // dY1/dt + dissipation + friction_loss - power_in
    std::vector<double> rho_l2;        // |rho_i|_2^2
    std::vector<double> rho_min;
    std::vector<double> rho_max;
    std::vector<double> grad_rho_sup;  // |grad rho_i|_inf (spectral differentiation)
    std::vector<double> dt_rho_sup;    // |d rho_i/dt|_inf (backward difference)
    std::vector<double> lap_v_r;       // |Lap v_i|_r
    double bound_xi1 = 0.0;            // running sup |v|^2+|grad v|^2 plus the dissipation time integral
    double bound_xi2 = 0.0;            // running integral of |sqrt(rho) dv/dt|^2 + kappa_plus |grad dv/dt|^2
};

// Streams states into records, keeping the previous snapshot for the
// difference quotients and the running integrals.
class DiagnosticsTracker {
  public:
    DiagnosticsTracker(const MixtureParams& params, const ForcingSpec& forcing,
                       const SpectralBasis& basis, double r_exponent = 4.0);

    DiagnosticsRecord push(const SimState& state);
    const std::vector<DiagnosticsRecord>& records() const { return records_; }

  private:
    const MixtureParams& params_;
    const ForcingSpec& forcing_;
    const SpectralBasis& basis_;
    double r_exponent_;
    std::optional<SimState> prev_state_;
    std::optional<DiagnosticsRecord> prev_record_;
    double sup_l2_h1_ = 0.0;
    double h1_integral_ = 0.0;
    double xi2_integral_ = 0.0;
    double prev_h1_sum_ = 0.0;
    double prev_xi2_integrand_ = 0.0;
    std::vector<DiagnosticsRecord> records_;
};

// Record for a standalone state; prev may be null (difference fields zero).
DiagnosticsRecord compute_record(const SimState& state, const SimState* prev,
                                 const MixtureParams& params, const ForcingSpec& forcing,
                                 const SpectralBasis& basis, double r_exponent = 4.0);

struct EnergyIdentityReport {
    double max_abs_residual = 0.0;
    double record_spacing = 0.0;
};

// Requires >= 3 records at uniform spacing; the t=0 record has no residual.
EnergyIdentityReport check_energy_identity(const std::vector<DiagnosticsRecord>& records);

// Convergence order from paired runs at spacing dt and dt/2.
double energy_identity_order(const std::vector<DiagnosticsRecord>& coarse,
                             const std::vector<DiagnosticsRecord>& fine);

struct AprioriBoundsReport {
    double sup_energy = 0.0;    // sup_t sum_i (|v_i|^2 + |grad v_i|^2)
    double xi2_integral = 0.0;  // time integral tracked by bound_xi2
    double surrogate_xi1 = 0.0; // initial data + forcing based scale
    bool growth_warning = false;
};

AprioriBoundsReport check_apriori_bounds(const std::vector<DiagnosticsRecord>& records,
                                         const ForcingSpec& forcing, const SpectralBasis& basis);

struct RunResult {
    SimState final_state;
    std::vector<DiagnosticsRecord> records;
    TransportStats transport;
};

RunResult run_with_diagnostics(SimState initial, double t_end, double dt,
                               const MixtureParams& params, const ForcingSpec& forcing,
                               const SpectralBasis& basis, int output_stride,
                               double r_exponent = 4.0,
                               const std::function<void(const SimState&)>& extra_observer = {});

} // namespace kvmix
