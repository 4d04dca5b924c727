#include "fracmv/frac/rkhs.hpp"

#include <cmath>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/fbm/fbm.hpp"

namespace fracmv {

namespace {

void require_regular(double hurst) { require(hurst > 0.5 && hurst < 1.0, "hurst must lie in (1/2, 1)"); }

std::vector<double> lag_covariances(std::size_t n, double hurst, double dt) {
    const double scale = std::pow(dt, 2.0 * hurst);
    std::vector<double> g(n);
    for (std::size_t k = 0; k < n; ++k) g[k] = scale * fgn_autocovariance(static_cast<long long>(k), hurst);
    return g;
}

// <1_{[0,t]}, 1_{[a,b)}> = R(t, b) - R(t, a)
double indicator_product(double t, double a, double b, double hurst) {
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(b, two_h) - std::pow(a, two_h) + std::pow(std::abs(t - a), two_h) -
                  std::pow(std::abs(t - b), two_h));
}

}  // namespace

double h_inner(const SteppedFunction& psi, const SteppedFunction& phi, double hurst) {
    require_regular(hurst);
    require(psi.grid() == phi.grid(), "h_inner: grid mismatch");
    require(psi.dim() == phi.dim(), "h_inner: dimension mismatch");
    const std::size_t n = psi.n_cells();
    const std::size_t d = psi.dim();
    const auto gamma = lag_covariances(n, hurst, psi.grid().dt());
    std::vector<double> rows(n);
    parallel_for(n, [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double g = gamma[i > j ? i - j : j - i];
            double dot = 0.0;
            for (std::size_t c = 0; c < d; ++c) dot += psi(i, c) * phi(j, c);
            s += g * dot;
        }
        rows[i] = s;
    });
    return pairwise_sum(rows);
}

Eigen::MatrixXd h_gram(const TimeGrid& grid, double hurst) {
    require_regular(hurst);
    const std::size_t n = grid.n_steps();
    const auto gamma = lag_covariances(n, hurst, grid.dt());
    Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gamma[i > j ? i - j : j - i];
    return g;
}

std::vector<double> khstar_at(const SteppedFunction& psi, double hurst, double t) {
    require_regular(hurst);
    const auto& grid = psi.grid();
    require(t > 0.0 && t <= grid.t_end() * (1.0 + 1e-14), "khstar_at: t must lie in (0, T]");
    const std::size_t d = psi.dim();
    std::vector<double> out(d, 0.0);
    for (std::size_t j = 0; j < grid.n_steps(); ++j) {
        const double hi = grid.node(j + 1);
        if (hi <= t) continue;
        const double lo = std::max(grid.node(j), t);
        // int_lo^hi dK(s,t)/ds ds = K(hi, t) - K(lo, t), K(t, t) = 0
        const double w = volterra_kernel(hi, t, hurst) - volterra_kernel(lo, t, hurst);
        for (std::size_t c = 0; c < d; ++c) out[c] += psi(j, c) * w;
    }
    return out;
}

OperatorOutput khstar(const SteppedFunction& psi, double hurst) {
    require_regular(hurst);
    const auto& grid = psi.grid();
    const std::size_t n = grid.n_steps();
    const std::size_t d = psi.dim();
    OperatorOutput out{SamplePath(grid, d), false};
    for (double v : psi.levels())
        if (v != 0.0) out.origin_singular = true;
    parallel_for(n, [&](std::size_t k0) {
        const std::size_t k = k0 + 1;
        const auto v = khstar_at(psi, hurst, grid.node(k));
        for (std::size_t c = 0; c < d; ++c) out.path(k, c) = v[c];
    });
    return out;
}

std::vector<double> rh_at(const SteppedFunction& h, double hurst, double t) {
    require_regular(hurst);
    const auto& grid = h.grid();
    require(t >= 0.0 && t <= grid.t_end() * (1.0 + 1e-14), "rh_at: t must lie in [0, T]");
    const std::size_t n = grid.n_steps();
    const std::size_t d = h.dim();
    std::vector<std::vector<double>> terms(d, std::vector<double>(n));
    for (std::size_t m = 0; m < n; ++m) {
        const double w = indicator_product(t, grid.node(m), grid.node(m + 1), hurst);
        for (std::size_t c = 0; c < d; ++c) terms[c][m] = w * h(m, c);
    }
    std::vector<double> out(d);
    for (std::size_t c = 0; c < d; ++c) out[c] = pairwise_sum(terms[c]);
    return out;
}

Eigen::MatrixXd rh_matrix(const TimeGrid& grid, double hurst, const std::vector<double>& points) {
    require_regular(hurst);
    const std::size_t n = grid.n_steps();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(points.size()), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                indicator_product(points[i], grid.node(j), grid.node(j + 1), hurst);
    return m;
}

SamplePath rh_operator(const SteppedFunction& h, double hurst) {
    require_regular(hurst);
    const auto& grid = h.grid();
    const std::size_t n = grid.n_steps();
    const std::size_t d = h.dim();
    const auto gamma = lag_covariances(n, hurst, grid.dt());
    // (Gamma h)_i = <1_{cell i}, h>; R_H h at node k is the running sum over i < k.
    std::vector<double> cell(n * d);
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t c = 0; c < d; ++c) {
            double s = 0.0;
            for (std::size_t m = 0; m < n; ++m) s += gamma[i > m ? i - m : m - i] * h(m, c);
            cell[i * d + c] = s;
        }
    });
    SamplePath out(grid, d);
    for (std::size_t c = 0; c < d; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            acc += cell[k * d + c];
            out(k + 1, c) = acc;
        }
    }
    return out;
}

}  // namespace fracmv
