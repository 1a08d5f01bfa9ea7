#pragma once

#include <memory>
#include <vector>

#include "kvmix/fields.hpp"
#include "kvmix/fourier.hpp"

namespace kvmix {

// One real divergence-free mode: amplitude * trig(k.x) * (dx,dy). The tangent
// is kept as the integer vector (-ky, kx) so d.k = 0 holds exactly; the
// 1/|k| normalization lives in the amplitude, fixed by the H1 normalization
// (gradient Gram = identity), which makes the L2 Gram diag(1/lambda).
struct Mode {
    int kx = 0, ky = 0;
    bool sin_parity = false;
    double lambda = 0.0;    // |k|^2, the Stokes eigenvalue
    double amplitude = 0.0; // 1 / (sqrt(2) pi |k|^2)
    double dx = 0.0, dy = 0.0;
};

// Divergence-free Fourier basis on the 2D torus: one cos and one sin mode per
// representative wavevector with 0 < |k|^2 <= K^2 (one per +-k pair).
// Ordering is deterministic: (|k|^2, kx, ky), cos before sin.
struct SpectralBasis {
    int grid_size = 0;  // N, even
    int mode_cutoff = 0; // K
    std::vector<Mode> modes;
    std::shared_ptr<FftKit> fft;

    int mode_count() const { return int(modes.size()); }
    double grid_spacing() const { return 2.0 * M_PI / grid_size; }
    double cell_area() const { return grid_spacing() * grid_spacing(); }

    // Index of the mode matching the wavevector and parity, accepting either
    // representative of the +-k pair. amp_sign gets -1 when a sin mode is
    // addressed through the negated wavevector. Returns -1 if absent.
    int find_mode(int kx, int ky, bool sin_parity, double* amp_sign = nullptr) const;
};

// Preconditions: N even, N >= 4, 2K+1 <= 2N/3.
SpectralBasis build_basis(int grid_size, int mode_cutoff);

// v(x) = sum_k c_k psi_k(x), exactly divergence-free in the spectral sense.
GridVectorField synthesize(const std::vector<double>& coeffs, const SpectralBasis& basis);

// H1 projections onto the basis modes (Leray projection + coefficient
// extraction); content beyond the cutoff is discarded.
std::vector<double> analyze(const GridVectorField& field, const SpectralBasis& basis);

// L2 projections int g . psi_k dx by grid quadrature, one value per mode.
std::vector<double> project_l2(const GridVectorField& field, const SpectralBasis& basis);
std::vector<double> project_l2(const Spectrum& gx, const Spectrum& gy, const SpectralBasis& basis);

// (v . grad) v evaluated pseudo-spectrally with 2/3-rule dealiasing.
GridVectorField convective_term(const GridVectorField& field, const SpectralBasis& basis);

// Grid quadrature of int f dx and int f g dx on the torus.
double integrate(const ScalarField& f, const SpectralBasis& basis);
double inner_l2(const GridVectorField& a, const GridVectorField& b, const SpectralBasis& basis);

} // namespace kvmix
