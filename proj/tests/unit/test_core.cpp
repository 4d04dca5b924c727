#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "fracmv/core/error.hpp"
#include "fracmv/core/grid.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/core/rng.hpp"

namespace fracmv {
namespace {

TEST(TimeGrid, NodesAreUniform) {
    TimeGrid g(2.0, 8);
    EXPECT_EQ(g.n_nodes(), 9u);
    EXPECT_DOUBLE_EQ(g.dt(), 0.25);
    EXPECT_DOUBLE_EQ(g.node(8), 2.0);
    EXPECT_THROW(TimeGrid(0.0, 4), DomainError);
    EXPECT_THROW(TimeGrid(1.0, 0), DomainError);
}

TEST(TimeGrid, WindowRebasesToZero) {
    TimeGrid g(1.0, 10);
    const auto w = g.window(4, 8);
    EXPECT_EQ(w.n_steps(), 4u);
    EXPECT_NEAR(w.t_end(), 0.4, 1e-15);
}

TEST(SamplePath, RejectsNonFinite) {
    SamplePath p(TimeGrid(1.0, 2), 1, {0.0, NAN, 1.0});
    EXPECT_THROW(p.check_finite(), DomainError);
    EXPECT_THROW(SamplePath(TimeGrid(1.0, 2), 1, {0.0, 1.0}), DomainError);
}

TEST(SteppedFunction, RefinementKeepsL2Norm) {
    SteppedFunction f(TimeGrid(1.0, 4), 2, {1, 2, 3, 4, 5, 6, 7, 8});
    EXPECT_NEAR(f.refined(3).l2_norm_squared(), f.l2_norm_squared(), 1e-12);
    const auto ind = SteppedFunction::indicator(TimeGrid(1.0, 4), 2, 3, 1);
    EXPECT_DOUBLE_EQ(ind.l2_norm_squared(), 0.75);
}

TEST(RandomStream, StreamsAreReproducibleAndDistinct) {
    RandomStream a(7, "x", 0), b(7, "x", 0), c(7, "x", 1), d(7, "y", 0);
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
    EXPECT_NE(va, d.next_u64());
}

TEST(RandomStream, NormalMoments) {
    RandomStream s(1, "moments", 0);
    const int n = 200000;
    double m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        m1 += z;
        m2 += z * z;
    }
    EXPECT_NEAR(m1 / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(RandomStream, UniformIsOpenInterval) {
    RandomStream s(3, "u", 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(Numeric, GaussLegendreIsExactForPolynomials) {
    const auto& rule = gauss_legendre(8);
    // degree 15 is the exactness limit for 8 nodes
    EXPECT_NEAR(rule.integrate(0.0, 2.0, [](double x) { return std::pow(x, 15); }), std::pow(2.0, 16) / 16.0, 1e-9);
    EXPECT_NEAR(gauss_legendre(64).integrate(0.0, std::numbers::pi, [](double x) { return std::sin(x); }), 2.0, 1e-14);
}

TEST(Numeric, TanhSinhHandlesEndpointSingularities) {
    const auto rule = tanh_sinh(1.0 / 16.0, 4.5);
    const double v =
        rule.integrate_offsets(0.0, 1.0, [](double a, double b) { return std::pow(a, -0.5) + std::pow(b, -0.7); });
    EXPECT_NEAR(v, 2.0 + 1.0 / 0.3, 1e-7);
}

TEST(Numeric, PairwiseSumMatchesKahanReference) {
    std::vector<double> v(1000);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / static_cast<double>(i + 1);
    double s = 0.0, comp = 0.0;
    for (double x : v) {
        const double y = x - comp;
        const double t = s + y;
        comp = (t - s) - y;
        s = t;
    }
    EXPECT_NEAR(pairwise_sum(v), s, 1e-13);
}

TEST(Numeric, DftOfImpulseIsFlat) {
    std::vector<std::complex<double>> x(8, 0.0);
    x[0] = 1.0;
    for (const auto& y : dft(x)) EXPECT_NEAR(std::abs(y - std::complex<double>(1.0, 0.0)), 0.0, 1e-15);
    x[0] = 0.0;
    x[1] = 1.0;
    const auto y = dft(x);
    EXPECT_NEAR(y[2].real(), std::cos(-2.0 * std::numbers::pi * 2.0 / 8.0), 1e-15);
    EXPECT_NEAR(y[2].imag(), std::sin(-2.0 * std::numbers::pi * 2.0 / 8.0), 1e-15);
}

TEST(Numeric, CholeskyJitterEscalation) {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 1.0, 1.0, 1.0;  // singular PSD
    const auto res = cholesky_with_jitter(m);
    EXPECT_GT(res.jitter, 0.0);
    EXPECT_LE(res.jitter, 1e-8);
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(cholesky_with_jitter(bad), NumericError);
}

TEST(Parallel, ResultsIndependentOfThreadCount) {
    std::vector<double> one(100), four(100);
    set_max_threads(1);
    parallel_for(100, [&](std::size_t i) { one[i] = RandomStream(5, "p", i).normal(); });
    set_max_threads(4);
    parallel_for(100, [&](std::size_t i) { four[i] = RandomStream(5, "p", i).normal(); });
    set_max_threads(1);
    EXPECT_EQ(one, four);
}

TEST(Parallel, PropagatesExceptions) {
    set_max_threads(3);
    EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                     if (i == 7) throw NumericError("boom");
                 }),
                 NumericError);
    set_max_threads(1);
}

}  // namespace
}  // namespace fracmv
