#include "kvmix/basis.hpp"

#include <algorithm>
#include <cmath>

namespace kvmix {

int SpectralBasis::find_mode(int kx, int ky, bool sin_parity, double* amp_sign) const {
    double sign = 1.0;
    int qx = kx, qy = ky;
    const bool representative = qx > 0 || (qx == 0 && qy > 0);
    if (!representative) {
        qx = -qx;
        qy = -qy;
        if (sin_parity) sign = -1.0; // sin(-k.x) = -sin(k.x)
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const Mode& m = modes[i];
        if (m.kx == qx && m.ky == qy && m.sin_parity == sin_parity) {
            if (amp_sign) *amp_sign = sign;
            return int(i);
        }
    }
    return -1;
}

SpectralBasis build_basis(int grid_size, int mode_cutoff) {
    if (grid_size < 4 || grid_size % 2 != 0)
        throw Error(ErrorCode::ValidationError, "grid size must be even and >= 4");
    if (mode_cutoff < 1)
        throw Error(ErrorCode::ValidationError, "mode cutoff must be >= 1");
    if (3 * (2 * mode_cutoff + 1) > 2 * grid_size)
        throw Error(ErrorCode::CutoffTooLargeForGrid,
                    "need 2K+1 <= 2N/3, got K=" + std::to_string(mode_cutoff) + " N=" + std::to_string(grid_size));

    struct Rep {
        int kx, ky, k2;
    };
    std::vector<Rep> reps;
    const int kk = mode_cutoff * mode_cutoff;
    for (int kx = 0; kx <= mode_cutoff; ++kx) {
        for (int ky = -mode_cutoff; ky <= mode_cutoff; ++ky) {
            const int k2 = kx * kx + ky * ky;
            if (k2 == 0 || k2 > kk) continue;
            if (kx == 0 && ky < 0) continue; // one representative per +-k pair
            reps.push_back({kx, ky, k2});
        }
    }
    std::sort(reps.begin(), reps.end(), [](const Rep& a, const Rep& b) {
        if (a.k2 != b.k2) return a.k2 < b.k2;
        if (a.kx != b.kx) return a.kx < b.kx;
        return a.ky < b.ky;
    });

    SpectralBasis basis;
    basis.grid_size = grid_size;
    basis.mode_cutoff = mode_cutoff;
    basis.fft = std::make_shared<FftKit>(grid_size);
    basis.modes.reserve(2 * reps.size());
    for (const Rep& r : reps) {
        Mode m;
        m.kx = r.kx;
        m.ky = r.ky;
        m.lambda = double(r.k2);
        m.amplitude = 1.0 / (std::sqrt(2.0) * M_PI * r.k2);
        m.dx = -r.ky;
        m.dy = r.kx;
        m.sin_parity = false;
        basis.modes.push_back(m);
        m.sin_parity = true;
        basis.modes.push_back(m);
    }
    return basis;
}

GridVectorField synthesize(const std::vector<double>& coeffs, const SpectralBasis& basis) {
    if (coeffs.size() != std::size_t(basis.mode_count()))
        throw Error(ErrorCode::LengthMismatch,
                    "got " + std::to_string(coeffs.size()) + " coefficients for m=" + std::to_string(basis.mode_count()));
    const int n = basis.grid_size;
    const std::size_t total = std::size_t(n) * n;
    Spectrum sx(total), sy(total);
    for (std::size_t i = 0; i < basis.modes.size(); ++i) {
        const Mode& m = basis.modes[i];
        const double c = coeffs[i];
        if (c == 0.0) continue;
        // cos: (a c / 2) at +-k; sin: -i(a c / 2) at +k, +i(a c / 2) at -k
        const double half = 0.5 * m.amplitude * c;
        const std::complex<double> plus = m.sin_parity ? std::complex<double>(0.0, -half) : std::complex<double>(half, 0.0);
        const std::size_t ip = basis.fft->index(m.kx, m.ky);
        const std::size_t im = basis.fft->index(-m.kx, -m.ky);
        sx[ip] += plus * m.dx;
        sy[ip] += plus * m.dy;
        sx[im] += std::conj(plus) * m.dx;
        sy[im] += std::conj(plus) * m.dy;
    }
    GridVectorField out(n);
    out.x = basis.fft->backward(sx);
    out.y = basis.fft->backward(sy);
    return out;
}

std::vector<double> project_l2(const Spectrum& gx, const Spectrum& gy, const SpectralBasis& basis) {
    const double four_pi2 = 4.0 * M_PI * M_PI;
    std::vector<double> out(basis.mode_count());
    for (std::size_t i = 0; i < basis.modes.size(); ++i) {
        const Mode& m = basis.modes[i];
        const std::size_t ip = basis.fft->index(m.kx, m.ky);
        const std::complex<double> along = gx[ip] * m.dx + gy[ip] * m.dy;
        // int g.psi dx = a (2pi)^2 Re G(k) for cos parity, -a (2pi)^2 Im G(k) for sin
        out[i] = m.amplitude * four_pi2 * (m.sin_parity ? -along.imag() : along.real());
    }
    return out;
}

std::vector<double> project_l2(const GridVectorField& field, const SpectralBasis& basis) {
    require_shape(field, basis.grid_size, "project_l2");
    return project_l2(basis.fft->forward(field.x), basis.fft->forward(field.y), basis);
}

std::vector<double> analyze(const GridVectorField& field, const SpectralBasis& basis) {
    std::vector<double> out = project_l2(field, basis);
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] *= basis.modes[i].lambda; // H1 inner product = lambda * L2 on a single wavevector
    return out;
}

GridVectorField convective_term(const GridVectorField& field, const SpectralBasis& basis) {
    require_shape(field, basis.grid_size, "convective_term");
    const int n = basis.grid_size;
    const FftKit& fft = *basis.fft;

    Spectrum vx = fft.forward(field.x);
    Spectrum vy = fft.forward(field.y);
    apply_two_thirds_mask(vx, n);
    apply_two_thirds_mask(vy, n);

    // derivative spectra i q_beta v_alpha
    Spectrum dxx(vx.size()), dxy(vx.size()), dyx(vx.size()), dyy(vx.size());
    for (int iy = 0; iy < n; ++iy) {
        const double qy = fft.signed_freq(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double qx = fft.signed_freq(ix);
            const std::size_t idx = std::size_t(iy) * n + ix;
            const std::complex<double> iqx(0.0, qx), iqy(0.0, qy);
            dxx[idx] = iqx * vx[idx];
            dxy[idx] = iqy * vx[idx];
            dyx[idx] = iqx * vy[idx];
            dyy[idx] = iqy * vy[idx];
        }
    }

    ScalarField u1 = fft.backward(vx);
    ScalarField u2 = fft.backward(vy);
    ScalarField g11 = fft.backward(dxx);
    ScalarField g12 = fft.backward(dxy);
    ScalarField g21 = fft.backward(dyx);
    ScalarField g22 = fft.backward(dyy);

    ScalarField wx(n), wy(n);
    for (std::size_t i = 0; i < wx.size(); ++i) {
        wx.data[i] = u1.data[i] * g11.data[i] + u2.data[i] * g12.data[i];
        wy.data[i] = u1.data[i] * g21.data[i] + u2.data[i] * g22.data[i];
    }

    Spectrum sx = fft.forward(wx);
    Spectrum sy = fft.forward(wy);
    apply_two_thirds_mask(sx, n);
    apply_two_thirds_mask(sy, n);
    GridVectorField out(n);
    out.x = fft.backward(sx);
    out.y = fft.backward(sy);
    return out;
}

double integrate(const ScalarField& f, const SpectralBasis& basis) {
    require_shape(f, basis.grid_size, "integrate");
    double sum = 0.0;
    for (double v : f.data) sum += v;
    return sum * basis.cell_area();
}

double inner_l2(const GridVectorField& a, const GridVectorField& b, const SpectralBasis& basis) {
    require_shape(a, basis.grid_size, "inner_l2");
    require_shape(b, basis.grid_size, "inner_l2");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.x.size(); ++i)
        sum += a.x.data[i] * b.x.data[i] + a.y.data[i] * b.y.data[i];
    return sum * basis.cell_area();
}

} // namespace kvmix
