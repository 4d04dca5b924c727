#include <gtest/gtest.h>

#include <cmath>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/fbm/fbm.hpp"

namespace fracmv {
namespace {

TEST(FbmCovariance, ReferenceValues) {
    EXPECT_DOUBLE_EQ(fbm_covariance(1.0, 1.0, 0.75), 1.0);
    EXPECT_DOUBLE_EQ(fbm_covariance(0.7, 0.0, 0.3), 0.0);
    EXPECT_NEAR(fbm_covariance(2.0, 1.0, 0.75), 1.4142136, 1e-6);
    EXPECT_DOUBLE_EQ(fbm_covariance(0.3, 0.9, 0.6), fbm_covariance(0.9, 0.3, 0.6));
}

TEST(FbmCovariance, DiagonalIsPowerLaw) {
    for (double t : {0.1, 0.5, 1.3, 7.0})
        for (double h : {0.2, 0.5, 0.75, 0.95})
            EXPECT_NEAR(fbm_covariance(t, t, h), std::pow(t, 2.0 * h), 1e-12 * std::pow(t, 2.0 * h));
}

TEST(FbmCovariance, DomainErrors) {
    EXPECT_THROW(fbm_covariance(1.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(fbm_covariance(1.0, 1.0, 1.0), DomainError);
    EXPECT_THROW(fbm_covariance(-1.0, 1.0, 0.5), DomainError);
}

TEST(FbmCovariance, GridMatrixAdmitsCholesky) {
    for (double h : {0.55, 0.75, 0.95}) {
        const int n = 128;
        Eigen::MatrixXd m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = fbm_covariance((i + 1.0) / n, (j + 1.0) / n, h);
        const auto res = cholesky_with_jitter(m);
        EXPECT_LE(res.jitter, 1e-8 * m.diagonal().maxCoeff());
    }
}

TEST(VolterraKernel, VanishesBelowDiagonal) {
    EXPECT_DOUBLE_EQ(volterra_kernel(0.5, 0.8, 0.75), 0.0);
    EXPECT_DOUBLE_EQ(volterra_kernel(0.5, 0.5, 0.75), 0.0);
    EXPECT_THROW(volterra_kernel(1.0, 0.0, 0.75), DomainError);
    EXPECT_THROW(volterra_kernel(1.0, 0.5, 0.5), DomainError);
}

TEST(VolterraKernel, ConstantMatchesBetaOracle) {
    // sqrt(0.375 / B(0.5, 0.25)), evaluated at 30 digits
    EXPECT_NEAR(volterra_constant(0.75), 0.267411158757997581, 1e-15);
}

TEST(VolterraKernel, HighPrecisionSpotValues) {
    // 30-digit quadrature of the desingularized integral, H = 0.7
    EXPECT_NEAR(volterra_kernel(1.0, 0.3, 0.7), 1.07363571553022562, 1e-12);
    EXPECT_NEAR(volterra_kernel(0.5, 0.2, 0.7), 0.89201511147789332, 1e-12);
}

TEST(VolterraKernel, ReproducesCovariance) {
    const double h = 0.7;
    const auto rule = tanh_sinh(1.0 / 64.0, 4.0);
    const double v = rule.integrate(0.0, 0.5, [&](double r) { return volterra_kernel(1.0, r, h) * volterra_kernel(0.5, r, h); });
    EXPECT_NEAR(v, fbm_covariance(1.0, 0.5, h), 1e-6);
}

TEST(VolterraKernel, DerivativeMatchesFiniteDifference) {
    const double h = 0.8, t = 0.3, s = 0.9, e = 1e-5;
    const double fd = (volterra_kernel(s + e, t, h) - volterra_kernel(s - e, t, h)) / (2 * e);
    EXPECT_NEAR(volterra_kernel_ds(s, t, h), fd, 1e-6);
}

double empirical_cov(const std::vector<SamplePath>& paths, std::size_t i, std::size_t j, double* se) {
    const double n = static_cast<double>(paths.size());
    double m = 0.0, m2 = 0.0;
    for (const auto& p : paths) {
        const double x = p(i, 0) * p(j, 0);
        m += x;
        m2 += x * x;
    }
    m /= n;
    *se = std::sqrt((m2 / n - m * m) / n);
    return m;
}

TEST(SampleFbm, BrownianIncrementVariance) {
    TimeGrid grid(1.0, 32);
    FbmSamplerConfig cfg{0.5, FbmMethod::circulant, 11, 1e-12};
    const auto sample = sample_fbm(grid, 1, 10000, cfg);
    for (std::size_t k = 0; k < 32; ++k) {
        double m2 = 0.0, m4 = 0.0;
        for (const auto& p : sample.paths) {
            const double d = p(k + 1, 0) - p(k, 0);
            m2 += d * d;
            m4 += d * d * d * d;
        }
        m2 /= 1e4;
        const double se = std::sqrt((m4 / 1e4 - m2 * m2) / 1e4);
        EXPECT_NEAR(m2, grid.dt(), 4.0 * se);
    }
}

TEST(SampleFbm, CovarianceBothMethods) {
    TimeGrid grid(1.0, 16);
    for (auto method : {FbmMethod::cholesky, FbmMethod::circulant}) {
        FbmSamplerConfig cfg{0.75, method, 5, 1e-12};
        const auto sample = sample_fbm(grid, 1, 10000, cfg);
        for (std::size_t i : {4u, 9u, 16u})
            for (std::size_t j : {1u, 8u, 16u}) {
                double se = 0.0;
                const double c = empirical_cov(sample.paths, i, j, &se);
                EXPECT_NEAR(c, fbm_covariance(grid.node(i), grid.node(j), 0.75), 4.5 * se);
            }
    }
}

TEST(SampleFbm, DeterministicAndStartsAtZero) {
    TimeGrid grid(2.0, 50);
    FbmSamplerConfig cfg{0.8, FbmMethod::circulant, 99, 1e-12};
    const auto a = sample_fbm(grid, 3, 5, cfg);
    const auto b = sample_fbm(grid, 3, 5, cfg);
    ASSERT_EQ(a.paths.size(), 5u);
    for (std::size_t p = 0; p < 5; ++p) {
        EXPECT_EQ(a.paths[p].values(), b.paths[p].values());
        for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.paths[p](0, c), 0.0);
    }
    cfg.seed = 100;
    EXPECT_NE(sample_fbm(grid, 3, 5, cfg).paths[0].values(), a.paths[0].values());
}

TEST(SampleFbm, PrefixOfPathsDoesNotDependOnCount) {
    TimeGrid grid(1.0, 20);
    FbmSamplerConfig cfg{0.7, FbmMethod::cholesky, 3, 1e-12};
    const auto few = sample_fbm(grid, 2, 2, cfg);
    const auto many = sample_fbm(grid, 2, 7, cfg);
    EXPECT_EQ(few.paths[1].values(), many.paths[1].values());
}

TEST(SampleFbm, RejectsBadArguments) {
    TimeGrid grid(1.0, 4);
    EXPECT_THROW(sample_fbm(grid, 0, 1, {}), DomainError);
    EXPECT_THROW(sample_fbm(grid, 1, 0, {}), DomainError);
    FbmSamplerConfig cfg;
    cfg.hurst = 1.2;
    EXPECT_THROW(sample_fbm(grid, 1, 1, cfg), DomainError);
}

SamplePath from_values(TimeGrid grid, std::vector<double> v) { return SamplePath(grid, 1, std::move(v)); }

TEST(HolderSeminorm, ReferenceValues) {
    TimeGrid g(1.0, 10);
    std::vector<double> lin(11), cst(11, 3.0);
    for (int k = 0; k <= 10; ++k) lin[k] = g.node(k);
    EXPECT_NEAR(holder_seminorm(from_values(g, lin), 0, 10, 0.6), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(holder_seminorm(from_values(g, cst), 0, 10, 0.6), 0.0);
    EXPECT_NEAR(holder_seminorm(from_values(TimeGrid(1.0, 2), {0.0, 1.0, 0.0}), 0, 2, 0.5), 1.4142136, 1e-7);
    EXPECT_THROW(holder_seminorm(from_values(g, lin), 3, 3, 0.5), DomainError);
}

TEST(HolderSeminorm, Homogeneous) {
    TimeGrid grid(1.0, 64);
    const auto path = sample_fbm(grid, 2, 1, {0.7, FbmMethod::circulant, 1, 1e-12}).paths[0];
    SamplePath scaled = path;
    for (auto& v : scaled.values()) v *= -2.5;
    const double a = holder_seminorm(path, 0, 64, 0.6);
    EXPECT_NEAR(holder_seminorm(scaled, 0, 64, 0.6), 2.5 * a, 1e-12 * a);
}

TEST(HolderSeminorm, SpanCapGivesLowerBound) {
    TimeGrid grid(1.0, 300);
    const auto path = sample_fbm(grid, 1, 1, {0.7, FbmMethod::circulant, 2, 1e-12}).paths[0];
    const double exact = holder_seminorm(path, 0, 300, 0.6);
    const double capped = holder_seminorm(path, 0, 300, 0.6, 50);
    EXPECT_LE(capped, exact);
    EXPECT_GT(capped, 0.5 * exact);
}

TEST(HolderSubdivision, InequalityHolds) {
    TimeGrid g(1.0, 64);
    std::vector<double> lin(65);
    for (int k = 0; k <= 64; ++k) lin[k] = g.node(k);
    const auto linear = holder_subdivision_check(from_values(g, lin), 0.5, {0, 7, 30, 64});
    EXPECT_NEAR(linear.lhs, 1.0, 1e-15);
    EXPECT_LE(linear.lhs, linear.rhs + 1e-12);

    const auto path = sample_fbm(g, 2, 1, {0.75, FbmMethod::circulant, 8, 1e-12}).paths[0];
    const auto single = holder_subdivision_check(path, 0.6, {0, 64});
    EXPECT_DOUBLE_EQ(single.lhs, single.rhs);
    const auto dyadic = holder_subdivision_check(path, 0.6, {0, 8, 16, 24, 32, 40, 48, 56, 64});
    EXPECT_LE(dyadic.lhs, dyadic.rhs + 1e-12);
    EXPECT_THROW(holder_subdivision_check(path, 0.6, {0, 32}), DomainError);
    EXPECT_THROW(holder_subdivision_check(path, 0.6, {0, 40, 32, 64}), DomainError);
}

}  // namespace
}  // namespace fracmv
