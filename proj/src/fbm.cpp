#include "fracmv/fbm/fbm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/core/rng.hpp"

namespace fracmv {

namespace {

void require_hurst_open_unit(double hurst) {
    require(hurst > 0.0 && hurst < 1.0, "hurst must lie in (0, 1)");
}

void require_hurst_regular(double hurst) {
    require(hurst > 0.5 && hurst < 1.0, "hurst must lie in (1/2, 1)");
}

}  // namespace

double fbm_covariance(double t, double s, double hurst) {
    require_hurst_open_unit(hurst);
    require(t >= 0.0 && s >= 0.0, "fbm_covariance: times must be nonnegative");
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) - std::pow(std::abs(t - s), two_h));
}

double fgn_autocovariance(long long lag, double hurst) {
    const double k = std::abs(static_cast<double>(lag));
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) + std::pow(std::abs(k - 1.0), two_h));
}

double volterra_constant(double hurst) {
    require_hurst_regular(hurst);
    return std::sqrt(hurst * (2.0 * hurst - 1.0) / std::beta(2.0 - 2.0 * hurst, hurst - 0.5));
}

double volterra_kernel(double t, double s, double hurst) {
    require_hurst_regular(hurst);
    require(s > 0.0, "volterra_kernel: s must be positive");
    if (t <= s) return 0.0;
    // With u = (r - s)^p, p = H - 1/2, the integrand becomes (s + u^{1/p})^p / p.
    const double p = hurst - 0.5;
    const double upper = std::pow(t - s, p);
    const auto& rule = gauss_legendre(64);
    const double inner = rule.integrate(0.0, upper, [&](double u) { return std::pow(s + std::pow(u, 1.0 / p), p); }) / p;
    return volterra_constant(hurst) * std::pow(s, 0.5 - hurst) * inner;
}

double volterra_kernel_ds(double s, double t, double hurst) {
    require_hurst_regular(hurst);
    require(s > t && t > 0.0, "volterra_kernel_ds: requires s > t > 0");
    return volterra_constant(hurst) * std::pow(s / t, hurst - 0.5) * std::pow(s - t, hurst - 1.5);
}

namespace {

// Increment generators for one scalar coordinate: fill `increments` (length n)
// with fGn scaled to the grid step from the given stream.
struct CholeskyGenerator {
    Eigen::MatrixXd lower;

    void draw(RandomStream& stream, std::vector<double>& increments) const {
        const auto n = static_cast<Eigen::Index>(increments.size());
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z[i] = stream.normal();
        for (Eigen::Index i = 0; i < n; ++i) {
            double s = 0.0;
            for (Eigen::Index k = 0; k <= i; ++k) s += lower(i, k) * z[k];
            increments[static_cast<std::size_t>(i)] = s;
        }
    }
};

struct CirculantGenerator {
    std::vector<double> sqrt_eig;  // sqrt(lambda_j / M)

    void draw(RandomStream& stream, std::vector<double>& increments) const {
        const std::size_t m = sqrt_eig.size();
        std::vector<std::complex<double>> w(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double re = stream.normal();
            const double im = stream.normal();
            w[j] = sqrt_eig[j] * std::complex<double>(re, im);
        }
        const auto y = dft(w);
        for (std::size_t k = 0; k < increments.size(); ++k) increments[k] = y[k].real();
    }
};

CholeskyGenerator make_cholesky(std::size_t n, double hurst, double scale, double jitter) {
    Eigen::MatrixXd cov(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                scale * fgn_autocovariance(static_cast<long long>(i) - static_cast<long long>(j), hurst);
    auto chol = cholesky_with_jitter(cov, jitter > 0.0 ? jitter : 1e-14, 1e-8);
    return CholeskyGenerator{std::move(chol.lower)};
}

// Returns false when the embedding has eigenvalues below -1e-10 * max.
bool make_circulant(std::size_t n, double hurst, double scale, CirculantGenerator& out,
                    std::vector<std::string>& warnings) {
    const std::size_t half = next_power_of_two(n);
    const std::size_t m = 2 * half;
    std::vector<std::complex<double>> c(m);
    for (std::size_t k = 0; k <= half; ++k) c[k] = scale * fgn_autocovariance(static_cast<long long>(k), hurst);
    for (std::size_t k = half + 1; k < m; ++k) c[k] = c[m - k];
    const auto eig = dft(c);
    double max_eig = 0.0;
    for (const auto& e : eig) max_eig = std::max(max_eig, e.real());
    out.sqrt_eig.assign(m, 0.0);
    bool clamped = false;
    for (std::size_t j = 0; j < m; ++j) {
        double lambda = eig[j].real();
        if (lambda < -1e-10 * max_eig) return false;
        if (lambda < 0.0) {
            lambda = 0.0;
            clamped = true;
        }
        out.sqrt_eig[j] = std::sqrt(lambda / static_cast<double>(m));
    }
    if (clamped) warnings.emplace_back("circulant embedding: small negative eigenvalues clamped to zero");
    return true;
}

}  // namespace

FbmSample sample_fbm(const TimeGrid& grid, std::size_t dim, std::size_t n_paths, const FbmSamplerConfig& config,
                     std::string_view label) {
    require_hurst_open_unit(config.hurst);
    require(dim >= 1, "sample_fbm: dim must be at least 1");
    require(n_paths >= 1, "sample_fbm: n_paths must be at least 1");
    require(config.jitter >= 0.0, "sample_fbm: jitter must be nonnegative");

    const std::size_t n = grid.n_steps();
    const double scale = std::pow(grid.dt(), 2.0 * config.hurst);
    FbmSample out;

    FbmMethod method = config.method;
    CirculantGenerator circulant;
    if (method == FbmMethod::circulant && !make_circulant(n, config.hurst, scale, circulant, out.warnings)) {
        out.warnings.emplace_back("circulant embedding: negative eigenvalues beyond tolerance, using cholesky");
        method = FbmMethod::cholesky;
    }
    CholeskyGenerator cholesky;
    if (method == FbmMethod::cholesky) cholesky = make_cholesky(n, config.hurst, scale, config.jitter);

    out.paths.assign(n_paths, SamplePath(grid, dim));
    parallel_for(n_paths * dim, [&](std::size_t item) {
        const std::size_t p = item / dim;
        const std::size_t c = item % dim;
        RandomStream stream(config.seed, label, item);
        std::vector<double> inc(n);
        if (method == FbmMethod::cholesky)
            cholesky.draw(stream, inc);
        else
            circulant.draw(stream, inc);
        SamplePath& path = out.paths[p];
        double x = 0.0;
        path(0, c) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            x += inc[k];
            path(k + 1, c) = x;
        }
    });
    return out;
}

double holder_seminorm(const SamplePath& path, std::size_t a, std::size_t b, double beta, std::size_t exact_span_cap) {
    require(a < b, "holder_seminorm: empty index range");
    require(b < path.n_nodes(), "holder_seminorm: index beyond grid");
    require(beta > 0.0 && beta <= 1.0, "holder_seminorm: beta must lie in (0, 1]");
    const std::size_t d = path.dim();
    const double dt = path.grid().dt();
    const std::size_t span = b - a;
    std::vector<double> inv_pow(span + 1, 0.0);
    for (std::size_t k = 1; k <= span; ++k) inv_pow[k] = std::pow(static_cast<double>(k) * dt, -beta);

    auto pair_ratio = [&](std::size_t i, std::size_t j) {
        double sq = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
            const double diff = path(j, c) - path(i, c);
            sq += diff * diff;
        }
        return std::sqrt(sq) * inv_pow[j - i];
    };

    double best = 0.0;
    const bool capped = exact_span_cap > 0 && span > exact_span_cap;
    const std::size_t local = capped ? exact_span_cap : span;
    for (std::size_t i = a; i < b; ++i) {
        const std::size_t j_end = std::min(b, i + local);
        for (std::size_t j = i + 1; j <= j_end; ++j) best = std::max(best, pair_ratio(i, j));
    }
    if (capped) {
        const std::size_t stride = (span + exact_span_cap - 1) / exact_span_cap;
        for (std::size_t i = a; i < b; i += stride)
            for (std::size_t j = i + stride; j <= b; j += stride) best = std::max(best, pair_ratio(i, j));
    }
    return best;
}

SubdivisionCheck holder_subdivision_check(const SamplePath& path, double beta,
                                          const std::vector<std::size_t>& partition) {
    const std::size_t n = path.grid().n_steps();
    require(partition.size() >= 2, "holder_subdivision_check: partition needs at least two indices");
    require(partition.front() == 0 && partition.back() == n, "holder_subdivision_check: partition must cover [0, n]");
    for (std::size_t k = 1; k < partition.size(); ++k)
        require(partition[k] > partition[k - 1], "holder_subdivision_check: partition must be increasing");
    SubdivisionCheck out;
    out.lhs = holder_seminorm(path, 0, n, beta);
    double piece_max = 0.0;
    for (std::size_t k = 1; k < partition.size(); ++k)
        piece_max = std::max(piece_max, holder_seminorm(path, partition[k - 1], partition[k], beta));
    const double pieces = static_cast<double>(partition.size() - 1);
    out.rhs = std::pow(pieces, 1.0 - beta) * piece_max;
    return out;
}

}  // namespace fracmv
