#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kvmix/errors.hpp"
#include "kvmix/fields.hpp"

namespace kvmix {

struct SpectralBasis;

// Coupling matrices of the n-constituent mixture with their admissibility
// bounds: mu and kappa symmetric positive definite, gamma symmetric with
// zero diagonal and nonnegative entries.
struct MixtureParams {
    int n = 0;
    Eigen::MatrixXd mu;
    Eigen::MatrixXd kappa;
    Eigen::MatrixXd gamma;

    // derived spectral bounds
    double mu_minus = 0.0, mu_plus = 0.0;
    double kappa_minus = 0.0, kappa_plus = 0.0;
    double gamma_plus = 0.0;
};

// Absolute entrywise tolerance for the symmetry checks.
inline constexpr double kSymmetryTol = 1e-12;

MixtureParams validate_params(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& kappa,
                              const Eigen::MatrixXd& gamma);

// Per-constituent initial state: density grids plus velocity coefficients
// (one amplitude per basis mode).
struct InitialData {
    std::vector<DensityField> rho0;
    std::vector<std::vector<double>> v0; // [constituent][mode]
    double rho_minus = 0.0;
    double rho_plus = 0.0;
};

InitialData validate_initial_data(std::vector<DensityField> rho0,
                                  std::vector<std::vector<double>> v0,
                                  const SpectralBasis& basis);

// Closed-form initial density: base + amplitude * cos(kx x + ky y).
struct DensityPreset {
    double base = 1.0;
    double amplitude = 0.0;
    int kx = 0, ky = 0;
};

ScalarField evaluate_density_preset(const DensityPreset& preset, int grid_n);

// One initial-velocity entry: amplitude on the basis mode of wavevector
// (kx,ky) and parity. Either representative of the +-k pair is accepted.
struct ModeAmplitude {
    int kx = 0, ky = 0;
    bool sin_parity = false;
    double amplitude = 0.0;
};

std::vector<double> coefficients_from_modes(const std::vector<ModeAmplitude>& modes,
                                            const SpectralBasis& basis);

// One closed-form forcing term: amplitude * cos(omega t + phase) on the
// divergence-free direction of wavevector (kx,ky) with cos/sin spatial parity.
struct ForcingTerm {
    int constituent = 0; // 0-based
    int kx = 0, ky = 0;
    bool sin_parity = false;
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

class ForcingSpec {
  public:
    ForcingSpec() = default; // zero forcing
    ForcingSpec(int n_constituents, std::vector<ForcingTerm> terms);

    bool is_zero() const { return terms_.empty(); }
    const std::vector<ForcingTerm>& terms() const { return terms_; }

    // f_i evaluated on the collocation grid at time t.
    GridVectorField evaluate(int constituent, double t, int grid_n) const;
    bool has_terms_for(int constituent) const;

  private:
    int n_ = 0;
    std::vector<ForcingTerm> terms_;
};

} // namespace kvmix
