#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kvmix/engine.hpp"

namespace kvmix {

// pi on collocation points, grid mean zero.
using PressureField = ScalarField;

// Momentum residual R_i = rho_i f_i - rho_i dv_i/dt - rho_i (v_i.grad)v_i
// + sum_j (mu_ij Lap v_j + kappa_ij d/dt Lap v_j) + sum_j gamma_ij (v_j - v_i),
// evaluated with spectral derivatives and dealiased products. dcdt must be the
// rates produced by the linear solve at the same instant.
std::vector<GridVectorField> momentum_residual(const SimState& state,
                                               const std::vector<Eigen::VectorXd>& dcdt,
                                               const MixtureParams& params,
                                               const ForcingSpec& forcing,
                                               const SpectralBasis& basis);

// Solves Lap pi = div R spectrally on the torus; zero mode pinned to zero so
// the returned field has exact zero mean.
PressureField recover_pressure(const GridVectorField& residual, const SpectralBasis& basis);

// Spectral gradient of a scalar grid field.
GridVectorField spectral_gradient(const ScalarField& f, const SpectralBasis& basis);

// Divergence-free part of a grid field (gradient component removed mode by mode).
GridVectorField leray_project(const GridVectorField& field, const SpectralBasis& basis);

} // namespace kvmix
