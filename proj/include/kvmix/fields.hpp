#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "kvmix/errors.hpp"

namespace kvmix {

// Scalar field on the N x N collocation grid of [0,2pi)^2.
// Storage is row-major with y as the row index: data[iy*N + ix].
struct ScalarField {
    int n = 0;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(int grid_n, double fill = 0.0) : n(grid_n), data(std::size_t(grid_n) * grid_n, fill) {}

    double& at(int ix, int iy) { return data[std::size_t(iy) * n + ix]; }
    double at(int ix, int iy) const { return data[std::size_t(iy) * n + ix]; }
    std::size_t size() const { return data.size(); }
};

// Two-component vector field on the same grid.
struct GridVectorField {
    ScalarField x;
    ScalarField y;

    GridVectorField() = default;
    explicit GridVectorField(int grid_n, double fill = 0.0) : x(grid_n, fill), y(grid_n, fill) {}

    int n() const { return x.n; }
};

// Per-constituent density grid; bounds live with the run's InitialData.
using DensityField = ScalarField;

inline void require_shape(const ScalarField& f, int n, const char* what) {
    if (f.n != n || f.data.size() != std::size_t(n) * n)
        throw Error(ErrorCode::GridShapeMismatch, std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n));
}

inline void require_shape(const GridVectorField& f, int n, const char* what) {
    require_shape(f.x, n, what);
    require_shape(f.y, n, what);
}

inline bool all_finite(const ScalarField& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

} // namespace kvmix
