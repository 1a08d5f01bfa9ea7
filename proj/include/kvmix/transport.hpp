#pragma once

#include "kvmix/fields.hpp"

namespace kvmix {

struct TransportStats {
    double max_displacement_cells = 0.0;
    bool cfl_exceeded = false; // warn-level: departure beyond 4 cells
};

// Semi-Lagrangian advection step for the continuity equation with
// divergence-free velocity: backtrack each grid point by one RK2 (midpoint)
// characteristic step through the frozen velocity field and interpolate with
// periodic bilinear weights. The update is a convex combination of grid
// values, so pointwise bounds of the input are preserved exactly.
DensityField transport(const DensityField& rho, const GridVectorField& v, double dt,
                       TransportStats* stats = nullptr);

std::pair<double, double> density_extrema(const DensityField& rho);

} // namespace kvmix
