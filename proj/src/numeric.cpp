#include "fracmv/core/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fftw3.h>

#include "fracmv/core/error.hpp"

namespace fracmv {

double pairwise_sum(std::span<const double> values) {
    if (values.size() <= 8) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

QuadratureRule build_gauss_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.complements.resize(n);
    rule.weights.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
                p0 = p1;
                p1 = pk;
            }
            dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
        rule.complements[n - 1 - i] = 0.5 * (1.0 - x);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, QuadratureRule> cache;
    require(n >= 1, "gauss_legendre: need at least one node");
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, build_gauss_legendre(n)).first;
    return it->second;
}

QuadratureRule tanh_sinh(double h, double t_max) {
    require(h > 0.0 && t_max > 0.0, "tanh_sinh: step and range must be positive");
    QuadratureRule rule;
    const double half_pi = 0.5 * std::numbers::pi;
    const int k_max = static_cast<int>(std::floor(t_max / h));
    for (int k = -k_max; k <= k_max; ++k) {
        const double t = k * h;
        const double s = half_pi * std::sinh(t);
        const double c = std::cosh(s);
        const double x = 1.0 / (1.0 + std::exp(-2.0 * s));  // (1 + tanh s) / 2
        const double xc = 1.0 / (1.0 + std::exp(2.0 * s));
        const double w = 0.5 * h * half_pi * std::cosh(t) / (c * c);
        if (!(x > 0.0 && xc > 0.0) || !(w > 0.0)) continue;
        rule.nodes.push_back(x);
        rule.complements.push_back(xc);
        rule.weights.push_back(w);
    }
    return rule;
}

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x) {
    const int n = static_cast<int>(x.size());
    require(n > 0, "dft: empty input");
    static std::mutex plan_mutex;  // FFTW planning is not thread-safe, execution is
    fftw_complex* buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    if (buf == nullptr) throw NumericError("dft: allocation failed");
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    for (int k = 0; k < n; ++k) {
        buf[k][0] = x[k].real();
        buf[k][1] = x[k].imag();
    }
    fftw_execute(plan);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out[k] = {buf[k][0], buf[k][1]};
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);
    return out;
}

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& m, double initial_relative, double max_relative) {
    require(m.rows() == m.cols(), "cholesky: matrix must be square");
    const double max_diag = m.diagonal().cwiseAbs().maxCoeff();
    CholeskyResult out;
    auto attempt = [&](double shift) {
        Eigen::MatrixXd shifted = m;
        shifted.diagonal().array() += shift;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() != Eigen::Success) return false;
        out.lower = llt.matrixL();
        return out.lower.allFinite();
    };
    if (attempt(0.0)) return out;
    require(initial_relative > 0.0, "cholesky: initial jitter must be positive");
    for (double rel = initial_relative; rel <= max_relative * (1.0 + 1e-12); rel *= 10.0) {
        if (attempt(rel * max_diag)) {
            out.jitter = rel * max_diag;
            return out;
        }
    }
    throw NumericError("cholesky: matrix not positive definite after maximal jitter");
}

}  // namespace fracmv
