#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fracmv/core/grid.hpp"

namespace fracmv {

/// E[B_t B_s] = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2.
double fbm_covariance(double t, double s, double hurst);

/// Autocovariance of unit-step fractional Gaussian noise at lag k:
/// (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
double fgn_autocovariance(long long lag, double hurst);

/// Normalizing constant C_H of the Volterra kernel, H in (1/2, 1).
double volterra_constant(double hurst);

/// K_H(t, s) for s > 0; zero when t <= s.
double volterra_kernel(double t, double s, double hurst);

/// Partial derivative of K_H(s, t) in its first argument, defined for s > t > 0.
double volterra_kernel_ds(double s, double t, double hurst);

enum class FbmMethod { cholesky, circulant };

struct FbmSamplerConfig {
    double hurst = 0.75;
    FbmMethod method = FbmMethod::circulant;
    std::uint64_t seed = 0;
    double jitter = 1e-12;
};

struct FbmSample {
    std::vector<SamplePath> paths;
    std::vector<std::string> warnings;
};

/// Draws n_paths independent d-dimensional fBm paths starting at 0. The
/// coordinate c of path p consumes the random stream (seed, label, p * dim + c),
/// so the output does not depend on the number of worker threads.
FbmSample sample_fbm(const TimeGrid& grid, std::size_t dim, std::size_t n_paths, const FbmSamplerConfig& config,
                     std::string_view label = "fbm");

/// max over grid pairs a <= i < j <= b of |x(t_j) - x(t_i)| / (t_j - t_i)^beta.
/// With exact_span_cap > 0 and b - a above it, pairs are restricted to
/// spans <= exact_span_cap plus pairs on a stride grid (a lower bound).
double holder_seminorm(const SamplePath& path, std::size_t a, std::size_t b, double beta,
                       std::size_t exact_span_cap = 0);

struct SubdivisionCheck {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Compares the seminorm over [0, T] with n_pieces^{1-beta} times the largest
/// seminorm over the pieces of `partition` (increasing node indices from 0 to n).
SubdivisionCheck holder_subdivision_check(const SamplePath& path, double beta,
                                          const std::vector<std::size_t>& partition);

}  // namespace fracmv
