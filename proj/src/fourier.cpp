#include "kvmix/fourier.hpp"

#include <fftw3.h>

namespace kvmix {

struct FftKit::Impl {
    fftw_complex* in = nullptr;
    fftw_complex* out = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

FftKit::FftKit(int n) : n_(n), impl_(std::make_unique<Impl>()) {
    const std::size_t total = std::size_t(n) * n;
    impl_->in = fftw_alloc_complex(total);
    impl_->out = fftw_alloc_complex(total);
    // FFTW_ESTIMATE: plan choice must not depend on timing.
    impl_->fwd = fftw_plan_dft_2d(n, n, impl_->in, impl_->out, FFTW_FORWARD, FFTW_ESTIMATE);
    impl_->bwd = fftw_plan_dft_2d(n, n, impl_->in, impl_->out, FFTW_BACKWARD, FFTW_ESTIMATE);
}

FftKit::~FftKit() {
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->bwd);
    fftw_free(impl_->in);
    fftw_free(impl_->out);
}

std::size_t FftKit::index(int qx, int qy) const {
    int ix = ((qx % n_) + n_) % n_;
    int iy = ((qy % n_) + n_) % n_;
    return std::size_t(iy) * n_ + ix;
}

Spectrum FftKit::forward(const ScalarField& f) const {
    require_shape(f, n_, "FftKit::forward");
    const std::size_t total = f.size();
    for (std::size_t i = 0; i < total; ++i) {
        impl_->in[i][0] = f.data[i];
        impl_->in[i][1] = 0.0;
    }
    fftw_execute(impl_->fwd);
    Spectrum spec(total);
    const double scale = 1.0 / double(total);
    for (std::size_t i = 0; i < total; ++i)
        spec[i] = std::complex<double>(impl_->out[i][0] * scale, impl_->out[i][1] * scale);
    return spec;
}

ScalarField FftKit::backward(const Spectrum& spec) const {
    const std::size_t total = std::size_t(n_) * n_;
    for (std::size_t i = 0; i < total; ++i) {
        impl_->in[i][0] = spec[i].real();
        impl_->in[i][1] = spec[i].imag();
    }
    fftw_execute(impl_->bwd);
    ScalarField f(n_);
    for (std::size_t i = 0; i < total; ++i)
        f.data[i] = impl_->out[i][0];
    return f;
}

void apply_two_thirds_mask(Spectrum& spec, int n) {
    const int cut = n / 3;
    for (int iy = 0; iy < n; ++iy) {
        int qy = iy <= n / 2 - 1 ? iy : iy - n;
        for (int ix = 0; ix < n; ++ix) {
            int qx = ix <= n / 2 - 1 ? ix : ix - n;
            if (std::abs(qx) > cut || std::abs(qy) > cut)
                spec[std::size_t(iy) * n + ix] = 0.0;
        }
    }
}

void strip_nyquist(Spectrum& spec, int n) {
    const int ny = n / 2;
    for (int ix = 0; ix < n; ++ix)
        spec[std::size_t(ny) * n + ix] = 0.0;
    for (int iy = 0; iy < n; ++iy)
        spec[std::size_t(iy) * n + ny] = 0.0;
}

} // namespace kvmix
