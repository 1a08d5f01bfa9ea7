#include "kvmix/mixture.hpp"

#include <cmath>

#include "kvmix/basis.hpp"

namespace kvmix {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::AsymmetricMatrix: return "AsymmetricMatrix";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::NegativeFriction: return "NegativeFriction";
        case ErrorCode::NonzeroFrictionDiagonal: return "NonzeroFrictionDiagonal";
        case ErrorCode::NonpositiveDensity: return "NonpositiveDensity";
        case ErrorCode::GridShapeMismatch: return "GridShapeMismatch";
        case ErrorCode::CutoffTooLargeForGrid: return "CutoffTooLargeForGrid";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::FactorizationFailed: return "FactorizationFailed";
        case ErrorCode::InsufficientRecords: return "InsufficientRecords";
        case ErrorCode::ConfigNotDiagonal: return "ConfigNotDiagonal";
        case ErrorCode::ConfigNotLinearizable: return "ConfigNotLinearizable";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

namespace {

void require_finite_square(const Eigen::MatrixXd& a, int n, const char* name) {
    if (a.rows() != n || a.cols() != n)
        throw Error(ErrorCode::ValidationError,
                    std::string(name) + " must be " + std::to_string(n) + "x" + std::to_string(n));
    if (!a.allFinite())
        throw Error(ErrorCode::ValidationError, std::string(name) + " has non-finite entries");
}

void require_symmetric(const Eigen::MatrixXd& a, const char* name) {
    const double resid = (a - a.transpose()).cwiseAbs().maxCoeff();
    if (resid > kSymmetryTol)
        throw Error(ErrorCode::AsymmetricMatrix,
                    std::string(name) + " symmetry residual " + std::to_string(resid));
}

// Smallest/largest eigenvalue of a symmetric matrix; throws if not SPD.
std::pair<double, double> spd_bounds(const Eigen::MatrixXd& a, const char* name) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::NotPositiveDefinite, std::string(name) + " eigendecomposition failed");
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0)
        throw Error(ErrorCode::NotPositiveDefinite,
                    std::string(name) + " smallest eigenvalue " + std::to_string(lo));
    return {lo, hi};
}

} // namespace

MixtureParams validate_params(const Eigen::MatrixXd& mu, const Eigen::MatrixXd& kappa,
                              const Eigen::MatrixXd& gamma) {
    const int n = int(mu.rows());
    if (n < 1)
        throw Error(ErrorCode::ValidationError, "constituent count must be >= 1");
    require_finite_square(mu, n, "mu");
    require_finite_square(kappa, n, "kappa");
    require_finite_square(gamma, n, "gamma");

    require_symmetric(mu, "mu");
    require_symmetric(kappa, "kappa");
    require_symmetric(gamma, "gamma");

    for (int i = 0; i < n; ++i) {
        if (gamma(i, i) != 0.0)
            throw Error(ErrorCode::NonzeroFrictionDiagonal,
                        "gamma(" + std::to_string(i) + "," + std::to_string(i) + ") = " + std::to_string(gamma(i, i)));
        for (int j = 0; j < n; ++j)
            if (i != j && gamma(i, j) < 0.0)
                throw Error(ErrorCode::NegativeFriction,
                            "gamma(" + std::to_string(i) + "," + std::to_string(j) + ") = " + std::to_string(gamma(i, j)));
    }

    MixtureParams p;
    p.n = n;
    p.mu = mu;
    p.kappa = kappa;
    p.gamma = gamma;
    std::tie(p.mu_minus, p.mu_plus) = spd_bounds(mu, "mu");
    std::tie(p.kappa_minus, p.kappa_plus) = spd_bounds(kappa, "kappa");
    p.gamma_plus = gamma.cwiseAbs().sum();
    return p;
}

InitialData validate_initial_data(std::vector<DensityField> rho0,
                                  std::vector<std::vector<double>> v0,
                                  const SpectralBasis& basis) {
    if (rho0.empty() || rho0.size() != v0.size())
        throw Error(ErrorCode::LengthMismatch, "need one density grid and one coefficient vector per constituent");

    InitialData data;
    data.rho_minus = std::numeric_limits<double>::infinity();
    data.rho_plus = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rho0.size(); ++i) {
        require_shape(rho0[i], basis.grid_size, "rho0");
        for (double v : rho0[i].data) {
            if (!std::isfinite(v) || v <= 0.0)
                throw Error(ErrorCode::NonpositiveDensity,
                            "rho0[" + std::to_string(i) + "] has a grid value " + std::to_string(v));
            data.rho_minus = std::min(data.rho_minus, v);
            data.rho_plus = std::max(data.rho_plus, v);
        }
        if (v0[i].size() != std::size_t(basis.mode_count()))
            throw Error(ErrorCode::LengthMismatch,
                        "v0[" + std::to_string(i) + "] has " + std::to_string(v0[i].size()) + " coefficients, basis has " +
                            std::to_string(basis.mode_count()));
        for (double c : v0[i])
            if (!std::isfinite(c))
                throw Error(ErrorCode::ValidationError, "v0[" + std::to_string(i) + "] has a non-finite coefficient");
    }
    data.rho0 = std::move(rho0);
    data.v0 = std::move(v0);
    return data;
}

ScalarField evaluate_density_preset(const DensityPreset& preset, int grid_n) {
    ScalarField rho(grid_n);
    const double h = 2.0 * M_PI / grid_n;
    for (int iy = 0; iy < grid_n; ++iy)
        for (int ix = 0; ix < grid_n; ++ix)
            rho.at(ix, iy) = preset.base + preset.amplitude * std::cos(preset.kx * (ix * h) + preset.ky * (iy * h));
    return rho;
}

std::vector<double> coefficients_from_modes(const std::vector<ModeAmplitude>& modes,
                                            const SpectralBasis& basis) {
    std::vector<double> coeffs(basis.mode_count(), 0.0);
    for (const ModeAmplitude& entry : modes) {
        double sign = 1.0;
        const int idx = basis.find_mode(entry.kx, entry.ky, entry.sin_parity, &sign);
        if (idx < 0)
            throw Error(ErrorCode::ValidationError,
                        "initial mode (" + std::to_string(entry.kx) + "," + std::to_string(entry.ky) +
                            ") is not within the basis cutoff");
        coeffs[idx] += sign * entry.amplitude;
    }
    return coeffs;
}

ForcingSpec::ForcingSpec(int n_constituents, std::vector<ForcingTerm> terms)
    : n_(n_constituents), terms_(std::move(terms)) {
    for (const ForcingTerm& term : terms_) {
        if (term.constituent < 0 || term.constituent >= n_)
            throw Error(ErrorCode::ValidationError, "forcing term constituent index out of range");
        if (term.kx == 0 && term.ky == 0)
            throw Error(ErrorCode::ValidationError, "forcing term needs a nonzero wavevector");
        if (!std::isfinite(term.amplitude) || !std::isfinite(term.omega) || !std::isfinite(term.phase))
            throw Error(ErrorCode::ValidationError, "forcing term has non-finite parameters");
    }
}

bool ForcingSpec::has_terms_for(int constituent) const {
    for (const ForcingTerm& term : terms_)
        if (term.constituent == constituent && term.amplitude != 0.0) return true;
    return false;
}

GridVectorField ForcingSpec::evaluate(int constituent, double t, int grid_n) const {
    GridVectorField f(grid_n);
    const double h = 2.0 * M_PI / grid_n;
    for (const ForcingTerm& term : terms_) {
        if (term.constituent != constituent || term.amplitude == 0.0) continue;
        const double norm = std::sqrt(double(term.kx) * term.kx + double(term.ky) * term.ky);
        const double dx = -term.ky / norm;
        const double dy = term.kx / norm;
        const double amp = term.amplitude * std::cos(term.omega * t + term.phase);
        for (int iy = 0; iy < grid_n; ++iy) {
            for (int ix = 0; ix < grid_n; ++ix) {
                const double ph = term.kx * (ix * h) + term.ky * (iy * h);
                const double w = term.sin_parity ? std::sin(ph) : std::cos(ph);
                f.x.at(ix, iy) += amp * w * dx;
                f.y.at(ix, iy) += amp * w * dy;
            }
        }
    }
    return f;
}

} // namespace kvmix
