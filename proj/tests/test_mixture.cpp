#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kvmix/basis.hpp"
#include "kvmix/mixture.hpp"

using namespace kvmix;
using Eigen::MatrixXd;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ValidationError;
}

// eigenvalues of a symmetric 2x2 by the quadratic formula
std::pair<double, double> eig2(const MatrixXd& a) {
    const double tr = a(0, 0) + a(1, 1);
    const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    return {tr / 2.0 - disc, tr / 2.0 + disc};
}

} // namespace

TEST_CASE("identity matrices validate with unit bounds") {
    MixtureParams p = validate_params(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2));
    CHECK(p.n == 2);
    CHECK(p.mu_minus == doctest::Approx(1.0));
    CHECK(p.mu_plus == doctest::Approx(1.0));
    CHECK(p.kappa_minus == doctest::Approx(1.0));
    CHECK(p.gamma_plus == 0.0);
}

TEST_CASE("indefinite kappa is rejected") {
    MatrixXd kappa(2, 2);
    kappa << 1, 2, 2, 1; // eigenvalues 3 and -1
    CHECK(code_of([&] { validate_params(MatrixXd::Identity(2, 2), kappa, MatrixXd::Zero(2, 2)); }) ==
          ErrorCode::NotPositiveDefinite);
}

TEST_CASE("asymmetric gamma is rejected") {
    MatrixXd gamma(2, 2);
    gamma << 0, 0.5, 0.3, 0;
    CHECK(code_of([&] { validate_params(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), gamma); }) ==
          ErrorCode::AsymmetricMatrix);
}

TEST_CASE("derived bounds match the quadratic formula") {
    MatrixXd mu(2, 2), kappa(2, 2), gamma(2, 2);
    mu << 2, 1, 1, 2;
    kappa << 3, 1, 1, 3;
    gamma << 0, 0.1, 0.1, 0;
    MixtureParams p = validate_params(mu, kappa, gamma);
    auto [mu_lo, mu_hi] = eig2(mu);
    auto [ka_lo, ka_hi] = eig2(kappa);
    CHECK(p.mu_minus == doctest::Approx(mu_lo).epsilon(1e-13));   // 1
    CHECK(p.mu_plus == doctest::Approx(mu_hi).epsilon(1e-13));    // 3
    CHECK(p.kappa_minus == doctest::Approx(ka_lo).epsilon(1e-13)); // 2
    CHECK(p.kappa_plus == doctest::Approx(ka_hi).epsilon(1e-13));  // 4
    CHECK(p.gamma_plus == doctest::Approx(0.2));
}

TEST_CASE("negative off-diagonal friction and nonzero diagonal are rejected") {
    MatrixXd gamma(2, 2);
    gamma << 0, -0.1, -0.1, 0;
    CHECK(code_of([&] { validate_params(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), gamma); }) ==
          ErrorCode::NegativeFriction);

    gamma << 0.2, 0.1, 0.1, 0;
    CHECK(code_of([&] { validate_params(MatrixXd::Identity(2, 2), MatrixXd::Identity(2, 2), gamma); }) ==
          ErrorCode::NonzeroFrictionDiagonal);
}

TEST_CASE("validation is idempotent") {
    MatrixXd mu(3, 3);
    mu << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 5;
    MixtureParams p1 = validate_params(mu, mu, MatrixXd::Zero(3, 3));
    MixtureParams p2 = validate_params(p1.mu, p1.kappa, p1.gamma);
    CHECK(p1.mu_minus == p2.mu_minus);
    CHECK(p1.mu_plus == p2.mu_plus);
    CHECK(p1.kappa_minus == p2.kappa_minus);
    CHECK(p1.gamma_plus == p2.gamma_plus);
}

TEST_CASE("quadratic forms respect the derived bounds") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    MatrixXd mu(3, 3);
    mu << 4, 1, 0.5, 1, 3, 0.2, 0.5, 0.2, 5;
    MixtureParams p = validate_params(mu, 2.0 * mu, MatrixXd::Zero(3, 3));
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::Vector3d z;
        z << dist(rng), dist(rng), dist(rng);
        if (z.norm() == 0.0) continue;
        CHECK(z.dot(p.mu * z) >= p.mu_minus * z.squaredNorm() * (1.0 - 1e-12));
        CHECK(z.dot(p.kappa * z) >= p.kappa_minus * z.squaredNorm() * (1.0 - 1e-12));
    }
}

TEST_CASE("scaling mu scales its bounds linearly") {
    MatrixXd mu(2, 2);
    mu << 2, 1, 1, 2;
    MixtureParams p1 = validate_params(mu, MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2));
    for (double s : {2.0, 0.5, 3.7}) {
        MixtureParams ps = validate_params(s * mu, MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2));
        CHECK(ps.mu_minus == doctest::Approx(s * p1.mu_minus).epsilon(1e-12));
        CHECK(ps.mu_plus == doctest::Approx(s * p1.mu_plus).epsilon(1e-12));
    }
}

TEST_CASE("initial data bounds and rejections") {
    SpectralBasis basis = build_basis(16, 2);
    const int n = basis.grid_size;

    SUBCASE("constant density") {
        std::vector<DensityField> rho = {ScalarField(n, 1.0)};
        InitialData data = validate_initial_data(rho, {std::vector<double>(basis.mode_count(), 0.0)}, basis);
        CHECK(data.rho_minus == 1.0);
        CHECK(data.rho_plus == 1.0);
    }

    SUBCASE("one zero grid value is rejected") {
        ScalarField rho(n, 1.0);
        rho.at(3, 5) = 0.0;
        CHECK(code_of([&] {
                  validate_initial_data({rho}, {std::vector<double>(basis.mode_count(), 0.0)}, basis);
              }) == ErrorCode::NonpositiveDensity);
    }

    SUBCASE("cosine profile attains its extrema on the grid") {
        ScalarField rho = evaluate_density_preset({1.5, 0.5, 1, 0}, n);
        InitialData data = validate_initial_data({rho}, {std::vector<double>(basis.mode_count(), 0.0)}, basis);
        CHECK(data.rho_minus == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(data.rho_plus == doctest::Approx(2.0).epsilon(1e-14));
    }

    SUBCASE("grid shape mismatches are rejected") {
        CHECK(code_of([&] {
                  validate_initial_data({ScalarField(8, 1.0)}, {std::vector<double>(basis.mode_count(), 0.0)}, basis);
              }) == ErrorCode::GridShapeMismatch);
    }

    SUBCASE("global bounds span all constituents") {
        std::vector<DensityField> rho = {ScalarField(n, 1.0), ScalarField(n, 3.0)};
        std::vector<std::vector<double>> v0(2, std::vector<double>(basis.mode_count(), 0.0));
        InitialData data = validate_initial_data(rho, v0, basis);
        CHECK(data.rho_minus == 1.0);
        CHECK(data.rho_plus == 3.0);
    }
}

TEST_CASE("mode list to coefficients honors the +-k identification") {
    SpectralBasis basis = build_basis(16, 2);
    std::vector<double> a = coefficients_from_modes({{1, -1, true, 0.7}}, basis);
    std::vector<double> b = coefficients_from_modes({{-1, 1, true, -0.7}}, basis);
    for (int k = 0; k < basis.mode_count(); ++k) CHECK(a[k] == b[k]);
    CHECK_THROWS_AS(coefficients_from_modes({{5, 5, false, 1.0}}, basis), Error);
}

TEST_CASE("forcing evaluates the closed form") {
    ForcingSpec forcing(1, {{0, 1, 0, false, 0.3, 2.0, 0.0}});
    GridVectorField f = forcing.evaluate(0, 0.25, 16);
    const double h = 2.0 * M_PI / 16;
    for (int iy = 0; iy < 16; ++iy)
        for (int ix = 0; ix < 16; ++ix) {
            CHECK(f.x.at(ix, iy) == doctest::Approx(0.0));
            CHECK(f.y.at(ix, iy) == doctest::Approx(0.3 * std::cos(2.0 * 0.25) * std::cos(ix * h)).epsilon(1e-13));
        }
    CHECK(forcing.has_terms_for(0));
    CHECK_FALSE(ForcingSpec().has_terms_for(0));
}
