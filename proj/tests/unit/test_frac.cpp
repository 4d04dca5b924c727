#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/fbm/fbm.hpp"
#include "fracmv/frac/fractional.hpp"

namespace fracmv {
namespace {

template <class F>
HolderFunction sampled(std::size_t n, double exponent, F&& f, double t_end = 1.0) {
    TimeGrid grid(t_end, n);
    SamplePath p(grid, 1);
    for (std::size_t k = 0; k <= n; ++k) p(k, 0) = f(grid.node(k));
    return {p, exponent};
}

TEST(FracIntegral, ConstantFunction) {
    const auto f = sampled(64, 1.0, [](double) { return 1.0; });
    const auto out = frac_integral_left(f, 0.5);
    for (std::size_t k = 0; k <= 64; ++k)
        EXPECT_NEAR(out(k, 0), std::sqrt(f.path.grid().node(k)) / std::tgamma(1.5), 1e-8);
}

TEST(FracIntegral, ZeroAndNearUnitOrder) {
    const auto zero = sampled(32, 1.0, [](double) { return 0.0; });
    const auto zero_out = frac_integral_left(zero, 0.3);
    for (double v : zero_out.values()) EXPECT_EQ(v, 0.0);
    const auto f = sampled(256, 1.0, [](double x) { return std::cos(3.0 * x); });
    const auto out = frac_integral_left(f, 0.999);
    for (std::size_t k = 0; k <= 256; ++k) {
        const double x = f.path.grid().node(k);
        EXPECT_NEAR(out(k, 0), std::sin(3.0 * x) / 3.0, 1e-2);
    }
    EXPECT_THROW(frac_integral_left(f, 1.0), DomainError);
    EXPECT_THROW(frac_integral_left(f, 0.0), DomainError);
}

TEST(FracDerivative, ConstantFunction) {
    const double alpha = 0.35;
    const auto f = sampled(50, 1.0, [](double) { return 2.5; });
    const auto out = frac_derivative_left(f, alpha);
    EXPECT_TRUE(out.origin_singular);
    for (std::size_t k = 1; k <= 50; ++k) {
        const double x = f.path.grid().node(k);
        EXPECT_NEAR(out.path(k, 0), 2.5 * std::pow(x, -alpha) / std::tgamma(1.0 - alpha), 1e-8);
    }
}

TEST(FracDerivative, PowerFunctionGivesGammaConstant) {
    // D^alpha x^alpha = Gamma(1 + alpha). The interpolation error near the
    // origin is scale invariant, so the check uses nodes with x >= 1/2.
    for (double alpha : {0.3, 0.5, 0.7}) {
        const auto f = sampled(2048, 1.0, [&](double x) { return std::pow(x, alpha); });
        auto g = f;
        g.exponent = alpha + 1e-9;  // declared regularity only needs to exceed alpha
        const auto out = frac_derivative_left(g, alpha);
        EXPECT_FALSE(out.origin_singular);
        for (std::size_t k = 1024; k <= 2048; ++k) EXPECT_NEAR(out.path(k, 0), std::tgamma(1.0 + alpha), 1e-4);
    }
}

TEST(FracDerivative, InversePairOnSmoothFunction) {
    for (double alpha : {0.2, 0.5, 0.8}) {
        const auto f = sampled(512, 1.0, [](double x) { return std::sin(2.0 * std::numbers::pi * x); });
        const HolderFunction integ{frac_integral_left(f, alpha), 1.0};
        const auto back = frac_derivative_left(integ, alpha);
        double err = 0.0;
        for (std::size_t k = 0; k <= 512; ++k) err = std::max(err, std::abs(back.path(k, 0) - f.path(k, 0)));
        EXPECT_LE(err, 5e-3) << "alpha=" << alpha;
    }
}

TEST(FracDerivative, RegularityViolation) {
    const auto f = sampled(16, 0.4, [](double x) { return x; });
    EXPECT_THROW(frac_derivative_left(f, 0.5), DomainError);
    EXPECT_THROW(frac_derivative_right(f, 0.5), DomainError);
}

TEST(FracDerivative, PointEvaluationAgreesWithNodes) {
    const auto f = sampled(40, 1.0, [](double x) { return std::exp(x) - 0.3; });
    const auto nodes = frac_derivative_left(f, 0.45);
    for (std::size_t k : {1u, 7u, 40u})
        EXPECT_NEAR(frac_derivative_left_at(f.path, 0, 0.45, f.path.grid().node(k)), nodes.path(k, 0), 1e-12);
}

TEST(FracDerivativeRight, ConstantIsZero) {
    const auto g = sampled(20, 1.0, [](double) { return -4.0; });
    const auto out = frac_derivative_right(g, 0.4);
    for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(FracDerivativeRight, LinearFunctionOracle) {
    // g_{b-}(t) = t - 1 = -(1 - t), so the mirrored derivative is -(1-x)^{0.7} / Gamma(1.7)
    const auto g = sampled(100, 1.0, [](double x) { return x; });
    const auto out = frac_derivative_right(g, 0.3);
    for (std::size_t k = 0; k <= 100; ++k) {
        const double x = g.path.grid().node(k);
        EXPECT_NEAR(out(k, 0), -std::pow(1.0 - x, 0.7) / std::tgamma(1.7), 1e-4);
    }
}

TEST(FracDerivativeRight, FbmPathBound) {
    const double hurst = 0.8, alpha = 0.35, beta1 = 0.75;
    TimeGrid grid(1.0, 256);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto path = sample_fbm(grid, 1, 1, {hurst, FbmMethod::circulant, seed, 1e-12}).paths[0];
        const double c0 = beta1 / (std::tgamma(alpha) * (alpha + beta1 - 1.0));
        const double norm = holder_seminorm(path, 0, 256, beta1);
        const auto d = frac_derivative_right({path, hurst - 0.01}, 1.0 - alpha);
        for (std::size_t k = 0; k < 256; ++k) {
            const double bound = c0 * norm * std::pow(1.0 - grid.node(k), alpha + beta1 - 1.0);
            EXPECT_LE(std::abs(d(k, 0)), bound * (1.0 + 1e-12));
        }
    }
}

TEST(Zahle, IdentityIntegrand) {
    const auto f = sampled(200, 1.0, [](double x) { return x; });
    EXPECT_NEAR(zahle_integral(f, f, 0.4), 0.5, 1e-6);
}

TEST(Zahle, SmoothPairMatchesClassicalIntegral) {
    const auto f = sampled(1024, 1.0, [](double x) { return std::cos(x); });
    const auto g = sampled(1024, 1.0, [](double x) { return x * x; });
    const double exact = 2.0 * (std::sin(1.0) + std::cos(1.0) - 1.0);  // int 2x cos x
    EXPECT_NEAR(zahle_integral(f, g, 0.5), exact, 1e-6);
    EXPECT_NEAR(zahle_integral(f, g, 0.2), exact, 1e-6);
}

TEST(Zahle, NonzeroStartingValue) {
    // f(0) != 0 exercises the f(a)(x-a)^{-alpha} term
    const auto f = sampled(256, 1.0, [](double x) { return 1.0 + x; });
    const auto g = sampled(256, 1.0, [](double x) { return std::sin(x); });
    const double exact = 2.0 * std::sin(1.0) - 1.0 + std::cos(1.0);  // int (1+x) cos x
    EXPECT_NEAR(zahle_integral(f, g, 0.45), exact, 1e-5);
}

TEST(Zahle, PreconditionErrors) {
    const auto f = sampled(16, 0.6, [](double x) { return x; });
    const auto g = sampled(16, 0.3, [](double x) { return x; });
    EXPECT_THROW(zahle_integral(f, g, 0.5), DomainError);
    const auto g2 = sampled(16, 0.6, [](double x) { return x; });
    EXPECT_THROW(zahle_integral(f, g2, 0.65), DomainError);
    EXPECT_THROW(zahle_integral(f, g2, 0.3), DomainError);
}

TEST(YoungRs, ReferenceValues) {
    const auto one = sampled(10, 1.0, [](double) { return 1.0; });
    const auto g = sampled(10, 1.0, [](double x) { return x * x * x; });
    EXPECT_NEAR(young_integral_rs(one.path, g.path), 1.0, 1e-15);
    const auto t = sampled(1000, 1.0, [](double x) { return x; });
    EXPECT_NEAR(young_integral_rs(t.path, t.path), 0.4995, 1e-12);
    const auto c = sampled(10, 1.0, [](double) { return 3.0; });
    EXPECT_EQ(young_integral_rs(g.path, c.path), 0.0);
    EXPECT_THROW(young_integral_rs(t.path, g.path), DomainError);
}

}  // namespace
}  // namespace fracmv
