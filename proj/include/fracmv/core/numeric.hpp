#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace fracmv {

/// Pairwise (tree) summation; order depends only on the input length.
double pairwise_sum(std::span<const double> values);

/// Quadrature rule on [0, 1]. `complements` holds 1 - node computed without
/// cancellation, for integrands singular at the right end.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> complements;
    std::vector<double> weights;

    /// f is called as f(y - lo, hi - y) with both offsets accurate.
    template <class F>
    double integrate_offsets(double lo, double hi, F&& f) const {
        const double len = hi - lo;
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(len * nodes[i], len * complements[i]);
        return s * len;
    }

    template <class F>
    double integrate(double lo, double hi, F&& f) const {
        const double len = hi - lo;
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(lo + len * nodes[i]);
        return s * len;
    }
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
const QuadratureRule& gauss_legendre(std::size_t n);

/// Tanh-sinh rule mapped to [0, 1] with step `h` and truncation |k h| <= t_max.
/// Endpoints are never sampled, so integrable endpoint singularities are fine.
QuadratureRule tanh_sinh(double h, double t_max);

/// Forward DFT, y_j = sum_k x_k exp(-2 pi i j k / n), computed by FFTW with
/// estimate-mode plans on aligned buffers so repeated calls are bit-identical.
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x);

std::size_t next_power_of_two(std::size_t n);

struct CholeskyResult {
    Eigen::MatrixXd lower;
    double jitter = 0.0;  // diagonal shift that was needed
};

/// Cholesky with jitter escalation: tries shift 0, then initial_relative *
/// max diag, multiplying by 10 up to max_relative * max diag. Throws NumericError.
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& m, double initial_relative = 1e-14,
                                    double max_relative = 1e-8);

}  // namespace fracmv
