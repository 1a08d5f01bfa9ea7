#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "kvmix/fields.hpp"

namespace kvmix {

// Fourier-coefficient array for an N x N grid: spec[wrap(qy)*N + wrap(qx)]
// holds the coefficient of exp(i(qx*x + qy*y)) under f(x) = sum_q spec_q e^{iq.x}.
using Spectrum = std::vector<std::complex<double>>;

// c2c FFT pair on a fixed grid size. Plans use FFTW_ESTIMATE so results are
// reproducible run to run; all transforms go through the kit's own buffers.
class FftKit {
  public:
    explicit FftKit(int n);
    ~FftKit();

    FftKit(const FftKit&) = delete;
    FftKit& operator=(const FftKit&) = delete;

    int n() const { return n_; }

    // forward: grid -> Fourier coefficients (1/N^2 normalization)
    Spectrum forward(const ScalarField& f) const;
    // backward: coefficients -> grid (real part)
    ScalarField backward(const Spectrum& spec) const;

    // Index of wavevector (qx,qy) in a Spectrum, components taken mod N.
    std::size_t index(int qx, int qy) const;
    // Signed frequency in [-N/2, N/2) for a storage index in [0, N).
    int signed_freq(int idx) const { return idx <= n_ / 2 - 1 ? idx : idx - n_; }

  private:
    struct Impl;
    int n_;
    std::unique_ptr<Impl> impl_;
};

// Zero all modes with |qx| > N/3 or |qy| > N/3 (2/3-rule dealiasing).
void apply_two_thirds_mask(Spectrum& spec, int n);

// Zero the self-conjugate Nyquist row/column (|q| = N/2).
void strip_nyquist(Spectrum& spec, int n);

} // namespace kvmix
