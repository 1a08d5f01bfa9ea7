#include "kvmix/pressure.hpp"

#include <cmath>

namespace kvmix {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

GridVectorField synthesize_scaled(const Eigen::VectorXd& coeffs, const SpectralBasis& basis,
                                  bool laplacian) {
    Eigen::VectorXd scaled = coeffs;
    if (laplacian)
        for (int k = 0; k < scaled.size(); ++k) scaled[k] *= -basis.modes[k].lambda;
    return synthesize(to_std(scaled), basis);
}

} // namespace

std::vector<GridVectorField> momentum_residual(const SimState& state,
                                               const std::vector<Eigen::VectorXd>& dcdt,
                                               const MixtureParams& params,
                                               const ForcingSpec& forcing,
                                               const SpectralBasis& basis) {
    const int n = params.n;
    const int gn = basis.grid_size;
    if (int(dcdt.size()) != n)
        throw Error(ErrorCode::LengthMismatch, "dcdt constituent count mismatch");

    std::vector<ScalarField> rho_dealiased(n);
    for (int i = 0; i < n; ++i) {
        Spectrum trunc = basis.fft->forward(state.rho[i]);
        apply_two_thirds_mask(trunc, gn);
        rho_dealiased[i] = basis.fft->backward(trunc);
    }

    std::vector<GridVectorField> residuals;
    residuals.reserve(n);
    for (int i = 0; i < n; ++i) {
        GridVectorField v = synthesize_scaled(state.coeffs[i], basis, false);
        GridVectorField dvdt = synthesize_scaled(dcdt[i], basis, false);
        GridVectorField conv = convective_term(v, basis);

        // sum_j (mu Lap v_j + kappa Lap dv_j/dt) and friction, assembled in
        // coefficient space first
        Eigen::VectorXd visc = Eigen::VectorXd::Zero(basis.mode_count());
        Eigen::VectorXd fric = Eigen::VectorXd::Zero(basis.mode_count());
        for (int j = 0; j < n; ++j) {
            visc += params.mu(i, j) * state.coeffs[j] + params.kappa(i, j) * dcdt[j];
            if (j != i && params.gamma(i, j) != 0.0)
                fric += params.gamma(i, j) * (state.coeffs[j] - state.coeffs[i]);
        }
        GridVectorField lap = synthesize_scaled(visc, basis, true);
        GridVectorField fric_field = synthesize_scaled(fric, basis, false);

        GridVectorField f(gn);
        if (forcing.has_terms_for(i)) f = forcing.evaluate(i, state.t, gn);

        GridVectorField r(gn);
        const ScalarField& rho = state.rho[i];
        const ScalarField& rho_t = rho_dealiased[i];
        for (std::size_t p = 0; p < r.x.size(); ++p) {
            r.x.data[p] = rho.data[p] * (f.x.data[p] - dvdt.x.data[p]) - rho_t.data[p] * conv.x.data[p] +
                          lap.x.data[p] + fric_field.x.data[p];
            r.y.data[p] = rho.data[p] * (f.y.data[p] - dvdt.y.data[p]) - rho_t.data[p] * conv.y.data[p] +
                          lap.y.data[p] + fric_field.y.data[p];
        }

        // the self-conjugate Nyquist modes carry no resolvable gradient, drop them
        Spectrum sx = basis.fft->forward(r.x);
        Spectrum sy = basis.fft->forward(r.y);
        strip_nyquist(sx, gn);
        strip_nyquist(sy, gn);
        r.x = basis.fft->backward(sx);
        r.y = basis.fft->backward(sy);
        residuals.push_back(std::move(r));
    }
    return residuals;
}

PressureField recover_pressure(const GridVectorField& residual, const SpectralBasis& basis) {
    const int n = basis.grid_size;
    require_shape(residual, n, "recover_pressure");
    const FftKit& fft = *basis.fft;
    Spectrum rx = fft.forward(residual.x);
    Spectrum ry = fft.forward(residual.y);
    Spectrum pi(rx.size());
    for (int iy = 0; iy < n; ++iy) {
        const double qy = fft.signed_freq(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double qx = fft.signed_freq(ix);
            const std::size_t idx = std::size_t(iy) * n + ix;
            const double q2 = qx * qx + qy * qy;
            if (q2 == 0.0) {
                pi[idx] = 0.0;
                continue;
            }
            // -q^2 pi_hat = i q . R_hat
            const std::complex<double> div = std::complex<double>(0.0, qx) * rx[idx] +
                                             std::complex<double>(0.0, qy) * ry[idx];
            pi[idx] = -div / q2;
        }
    }
    return fft.backward(pi);
}

GridVectorField spectral_gradient(const ScalarField& f, const SpectralBasis& basis) {
    const int n = basis.grid_size;
    require_shape(f, n, "spectral_gradient");
    const FftKit& fft = *basis.fft;
    Spectrum s = fft.forward(f);
    Spectrum gx(s.size()), gy(s.size());
    for (int iy = 0; iy < n; ++iy) {
        const double qy = fft.signed_freq(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double qx = fft.signed_freq(ix);
            const std::size_t idx = std::size_t(iy) * n + ix;
            gx[idx] = std::complex<double>(0.0, qx) * s[idx];
            gy[idx] = std::complex<double>(0.0, qy) * s[idx];
        }
    }
    strip_nyquist(gx, n);
    strip_nyquist(gy, n);
    GridVectorField out(n);
    out.x = fft.backward(gx);
    out.y = fft.backward(gy);
    return out;
}

GridVectorField leray_project(const GridVectorField& field, const SpectralBasis& basis) {
    const int n = basis.grid_size;
    require_shape(field, n, "leray_project");
    const FftKit& fft = *basis.fft;
    Spectrum fx = fft.forward(field.x);
    Spectrum fy = fft.forward(field.y);
    for (int iy = 0; iy < n; ++iy) {
        const double qy = fft.signed_freq(iy);
        for (int ix = 0; ix < n; ++ix) {
            const double qx = fft.signed_freq(ix);
            const std::size_t idx = std::size_t(iy) * n + ix;
            const double q2 = qx * qx + qy * qy;
            if (q2 == 0.0) continue; // constants are divergence-free
            const std::complex<double> along = (qx * fx[idx] + qy * fy[idx]) / q2;
            fx[idx] -= qx * along;
            fy[idx] -= qy * along;
        }
    }
    GridVectorField out(n);
    out.x = fft.backward(fx);
    out.y = fft.backward(fy);
    return out;
}

} // namespace kvmix
