#include "kvmix/engine.hpp"

#include <cmath>

namespace kvmix {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

// Density-weighted Gram matrix M_kl = int rho psi_k . psi_l dx, evaluated by
// grid quadrature. The trapezoidal sums are read off the DFT of rho: for any
// wavevector q, h^2 sum_x rho cos(q.x) = (2pi)^2 Re rho_hat(q mod N), and
// products of two modes reduce to cosines/sines at k-l and k+l.
Eigen::MatrixXd mass_matrix(const Spectrum& rho_hat, const SpectralBasis& basis) {
    const int m = basis.mode_count();
    const double four_pi2 = 4.0 * M_PI * M_PI;
    const FftKit& fft = *basis.fft;
    Eigen::MatrixXd mass(m, m);
    for (int p = 0; p < m; ++p) {
        const Mode& a = basis.modes[p];
        for (int q = p; q < m; ++q) {
            const Mode& b = basis.modes[q];
            const double dd = a.dx * b.dx + a.dy * b.dy;
            double value = 0.0;
            if (dd != 0.0) {
                const std::complex<double> diff = rho_hat[fft.index(a.kx - b.kx, a.ky - b.ky)];
                const std::complex<double> sum = rho_hat[fft.index(a.kx + b.kx, a.ky + b.ky)];
                const double pref = 0.5 * a.amplitude * b.amplitude * dd * four_pi2;
                // with s(q) := -Im rho_hat(q): cos cos -> Re(k-l) + Re(k+l),
                // sin sin -> Re(k-l) - Re(k+l), cos sin -> s(k+l) - s(k-l),
                // sin cos -> s(k+l) + s(k-l)
                if (!a.sin_parity && !b.sin_parity)
                    value = pref * (diff.real() + sum.real());
                else if (a.sin_parity && b.sin_parity)
                    value = pref * (diff.real() - sum.real());
                else if (!a.sin_parity && b.sin_parity)
                    value = pref * (diff.imag() - sum.imag());
                else
                    value = pref * (-sum.imag() - diff.imag());
            }
            mass(p, q) = value;
            mass(q, p) = value;
        }
    }
    return mass;
}

// Everything about one step's frozen densities: spectra, dealiased grids,
// the assembled block matrix and its factorization.
class StageAssembler {
  public:
    StageAssembler(const std::vector<DensityField>& rho, const MixtureParams& params,
                   const ForcingSpec& forcing, const SpectralBasis& basis)
        : rho_(rho), params_(params), forcing_(forcing), basis_(basis) {
        const int n = params.n;
        const int m = basis.mode_count();
        const int gn = basis.grid_size;
        rho_hat_.resize(n);
        rho_dealiased_.resize(n);
        for (int i = 0; i < n; ++i) {
            require_shape(rho[i], gn, "assemble densities");
            rho_hat_[i] = basis.fft->forward(rho[i]);
            Spectrum trunc = rho_hat_[i];
            apply_two_thirds_mask(trunc, gn);
            rho_dealiased_[i] = basis.fft->backward(trunc);
        }
        A_ = Eigen::MatrixXd::Zero(std::size_t(n) * m, std::size_t(n) * m);
        for (int i = 0; i < n; ++i) {
            A_.block(i * m, i * m, m, m) = mass_matrix(rho_hat_[i], basis);
            for (int j = 0; j < n; ++j)
                A_.block(i * m, j * m, m, m).diagonal().array() += params.kappa(i, j);
        }
    }

    const Eigen::MatrixXd& matrix() const { return A_; }

    void factorize() {
        llt_.compute(A_);
        if (llt_.info() != Eigen::Success)
            throw Error(ErrorCode::FactorizationFailed,
                        "Galerkin matrix is not positive definite (density positivity lost?)");
    }

    Eigen::VectorXd rhs(const std::vector<Eigen::VectorXd>& coeffs, double t) const {
        const int n = params_.n;
        const int m = basis_.mode_count();
        Eigen::VectorXd b(std::size_t(n) * m);
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd bi = Eigen::VectorXd::Zero(m);
            // friction gamma_ij (c_j - c_i) through the L2 Gram diag(1/lambda)
            for (int j = 0; j < n; ++j) {
                if (j == i || params_.gamma(i, j) == 0.0) continue;
                for (int k = 0; k < m; ++k)
                    bi[k] += params_.gamma(i, j) * (coeffs[j][k] - coeffs[i][k]) / basis_.modes[k].lambda;
            }
            // viscous coupling, gradient Gram is the identity
            for (int j = 0; j < n; ++j)
                bi -= params_.mu(i, j) * coeffs[j];
            // convective term, dealiased density against the dealiased product
            if (coeffs[i].cwiseAbs().maxCoeff() != 0.0) {
                GridVectorField v = synthesize(to_std(coeffs[i]), basis_);
                GridVectorField w = convective_term(v, basis_);
                GridVectorField g(basis_.grid_size);
                for (std::size_t p = 0; p < g.x.size(); ++p) {
                    g.x.data[p] = rho_dealiased_[i].data[p] * w.x.data[p];
                    g.y.data[p] = rho_dealiased_[i].data[p] * w.y.data[p];
                }
                std::vector<double> conv = project_l2(g, basis_);
                for (int k = 0; k < m; ++k) bi[k] -= conv[k];
            }
            if (forcing_.has_terms_for(i)) {
                GridVectorField f = forcing_.evaluate(i, t, basis_.grid_size);
                GridVectorField g(basis_.grid_size);
                for (std::size_t p = 0; p < g.x.size(); ++p) {
                    g.x.data[p] = rho_[i].data[p] * f.x.data[p];
                    g.y.data[p] = rho_[i].data[p] * f.y.data[p];
                }
                std::vector<double> fp = project_l2(g, basis_);
                for (int k = 0; k < m; ++k) bi[k] += fp[k];
            }
            b.segment(i * m, m) = bi;
        }
        return b;
    }

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return llt_.solve(b); }

  private:
    const std::vector<DensityField>& rho_;
    const MixtureParams& params_;
    const ForcingSpec& forcing_;
    const SpectralBasis& basis_;
    std::vector<Spectrum> rho_hat_;
    std::vector<ScalarField> rho_dealiased_;
    Eigen::MatrixXd A_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

std::vector<Eigen::VectorXd> split_blocks(const Eigen::VectorXd& x, int n, int m) {
    std::vector<Eigen::VectorXd> out(n);
    for (int i = 0; i < n; ++i) out[i] = x.segment(i * m, m);
    return out;
}

} // namespace

SimState make_initial_state(const InitialData& data, const SpectralBasis& basis, double t0) {
    SimState s;
    s.t = t0;
    s.step_index = 0;
    const int n = int(data.rho0.size());
    s.coeffs.resize(n);
    for (int i = 0; i < n; ++i) {
        if (data.v0[i].size() != std::size_t(basis.mode_count()))
            throw Error(ErrorCode::LengthMismatch, "initial coefficients do not match the basis");
        s.coeffs[i] = Eigen::Map<const Eigen::VectorXd>(data.v0[i].data(), data.v0[i].size());
    }
    s.rho = data.rho0;
    return s;
}

GalerkinSystem assemble(const SimState& state, const MixtureParams& params,
                        const ForcingSpec& forcing, const SpectralBasis& basis) {
    if (int(state.coeffs.size()) != params.n || int(state.rho.size()) != params.n)
        throw Error(ErrorCode::LengthMismatch, "state constituent count does not match parameters");
    for (const auto& c : state.coeffs)
        if (c.size() != basis.mode_count())
            throw Error(ErrorCode::LengthMismatch, "coefficient count does not match basis");
    StageAssembler stage(state.rho, params, forcing, basis);
    return GalerkinSystem{stage.matrix(), stage.rhs(state.coeffs, state.t)};
}

Eigen::VectorXd solve_system(const GalerkinSystem& sys) {
    Eigen::LLT<Eigen::MatrixXd> llt(sys.A);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::FactorizationFailed, "matrix is not symmetric positive definite");
    Eigen::VectorXd x = llt.solve(sys.b);
    const double bnorm = sys.b.norm();
    double resid = (sys.A * x - sys.b).norm();
    if (resid > 1e-10 * bnorm) {
        x += llt.solve(sys.b - sys.A * x);
        resid = (sys.A * x - sys.b).norm();
        if (resid > 1e-10 * bnorm)
            throw Error(ErrorCode::FactorizationFailed,
                        "solve residual " + std::to_string(resid) + " exceeds tolerance");
    }
    return x;
}

std::vector<Eigen::VectorXd> coeff_rates(const SimState& state, const MixtureParams& params,
                                         const ForcingSpec& forcing, const SpectralBasis& basis) {
    const Eigen::VectorXd x = solve_system(assemble(state, params, forcing, basis));
    return split_blocks(x, params.n, basis.mode_count());
}

SimState step(const SimState& state, double dt, const MixtureParams& params,
              const ForcingSpec& forcing, const SpectralBasis& basis, TransportStats* stats) {
    if (dt <= 0.0)
        throw Error(ErrorCode::ValidationError, "dt must be positive");
    const int n = params.n;
    const int m = basis.mode_count();

    std::vector<GridVectorField> v_now(n);
    for (int i = 0; i < n; ++i) v_now[i] = synthesize(to_std(state.coeffs[i]), basis);

    std::vector<DensityField> rho_half(n);
    for (int i = 0; i < n; ++i) rho_half[i] = transport(state.rho[i], v_now[i], 0.5 * dt, stats);

    StageAssembler stage(rho_half, params, forcing, basis);
    stage.factorize();

    const Eigen::VectorXd k1 = stage.solve(stage.rhs(state.coeffs, state.t));
    std::vector<Eigen::VectorXd> mid(n);
    for (int i = 0; i < n; ++i) mid[i] = state.coeffs[i] + 0.5 * dt * k1.segment(i * m, m);
    const Eigen::VectorXd k2 = stage.solve(stage.rhs(mid, state.t + 0.5 * dt));

    SimState next;
    next.t = state.t + dt;
    next.step_index = state.step_index + 1;
    next.coeffs.resize(n);
    next.rho.resize(n);
    for (int i = 0; i < n; ++i) {
        next.coeffs[i] = state.coeffs[i] + dt * k2.segment(i * m, m);
        GridVectorField v_new = synthesize(to_std(next.coeffs[i]), basis);
        next.rho[i] = transport(rho_half[i], v_new, 0.5 * dt, stats);
    }
    return next;
}

int steps_between(double t0, double t_end, double dt) {
    const double span = t_end - t0;
    if (span < 0.0)
        throw Error(ErrorCode::ValidationError, "t_end must not precede the initial time");
    const double raw = span / dt;
    const int steps = int(std::llround(raw));
    if (std::abs(raw - steps) > 1e-9 * std::max(1.0, raw))
        throw Error(ErrorCode::ValidationError, "(t_end - t0) must be an integer multiple of dt");
    return steps;
}

SimState run(SimState state, double t_end, double dt, const MixtureParams& params,
             const ForcingSpec& forcing, const SpectralBasis& basis,
             const RunOptions& options, TransportStats* stats) {
    const int total = steps_between(state.t, t_end, dt);
    const int stride = options.output_stride > 0 ? options.output_stride : 1;
    const double t0 = state.t;
    if (options.observer) options.observer(state);
    for (int s = 1; s <= total; ++s) {
        state = step(state, dt, params, forcing, basis, stats);
        state.t = t0 + s * dt; // keep record times free of accumulation drift
        if (options.observer && (s % stride == 0 || s == total)) options.observer(state);
    }
    return state;
}

double suggest_dt(const SimState& state, const SpectralBasis& basis) {
    double vmax = 0.0;
    for (const auto& c : state.coeffs) {
        GridVectorField v = synthesize(to_std(c), basis);
        for (std::size_t i = 0; i < v.x.size(); ++i)
            vmax = std::max(vmax, std::hypot(v.x.data[i], v.y.data[i]));
    }
    if (vmax == 0.0) return std::numeric_limits<double>::infinity();
    return 4.0 * basis.grid_spacing() / vmax;
}

} // namespace kvmix
