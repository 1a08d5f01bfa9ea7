#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "kvmix/basis.hpp"
#include "kvmix/mixture.hpp"
#include "kvmix/transport.hpp"

namespace kvmix {

// Galerkin coefficients c_{i,k} for all constituents plus the density grids
// at one time level.
struct SimState {
    double t = 0.0;
    int step_index = 0;
    std::vector<Eigen::VectorXd> coeffs; // [constituent], each of length m
    std::vector<DensityField> rho;       // [constituent]
};

SimState make_initial_state(const InitialData& data, const SpectralBasis& basis, double t0 = 0.0);

// Block system A dc/dt = b: A_ii = M_i + kappa_ii I, A_ij = kappa_ij I for
// i != j, with M_i the density-weighted mode Gram matrix. A is symmetric
// positive definite while the densities stay positive.
struct GalerkinSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

GalerkinSystem assemble(const SimState& state, const MixtureParams& params,
                        const ForcingSpec& forcing, const SpectralBasis& basis);

// SPD solve with residual check |A x - b| <= 1e-10 |b|.
Eigen::VectorXd solve_system(const GalerkinSystem& sys);

// dc/dt at the state's instant, from a fresh assembly.
std::vector<Eigen::VectorXd> coeff_rates(const SimState& state, const MixtureParams& params,
                                         const ForcingSpec& forcing, const SpectralBasis& basis);

// One Strang-split step: half-step density transport with current velocities,
// explicit RK2 (midpoint) on the coefficients with densities frozen at the
// half-step values, then the second half-step transport with the updated
// velocities.
SimState step(const SimState& state, double dt, const MixtureParams& params,
              const ForcingSpec& forcing, const SpectralBasis& basis,
              TransportStats* stats = nullptr);

struct RunOptions {
    int output_stride = 1; // observer fires every this many steps (and at t0)
    std::function<void(const SimState&)> observer;
};

// Repeated stepping from state.t to t_end; (t_end - t)/dt must be integral.
// Deterministic: identical inputs give bitwise-identical trajectories.
SimState run(SimState state, double t_end, double dt, const MixtureParams& params,
             const ForcingSpec& forcing, const SpectralBasis& basis,
             const RunOptions& options = {}, TransportStats* stats = nullptr);

// Largest dt satisfying the transport accuracy margin for the state's
// velocities; advisory only, never applied automatically.
double suggest_dt(const SimState& state, const SpectralBasis& basis);

int steps_between(double t0, double t_end, double dt);

} // namespace kvmix
