#include "fracmv/frac/fractional.hpp"

#include <cmath>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"

namespace fracmv {

namespace {

void require_order(double alpha) { require(alpha > 0.0 && alpha < 1.0, "fractional order must lie in (0, 1)"); }

// Jumps of the slope of the interpolant: A_j = s_j - s_{j-1}, s_{-1} = 0.
std::vector<double> slope_jumps(const std::vector<double>& values, double h) {
    const std::size_t n = values.size() - 1;
    std::vector<double> jumps(n);
    double prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double s = (values[j + 1] - values[j]) / h;
        jumps[j] = s - prev;
        prev = s;
    }
    return jumps;
}

// sum_{j <= m} A_j (m - j + theta)^p, with theta in [0, 1); the j = m term is
// dropped when theta = 0.
double kernel_sum(const std::vector<double>& jumps, std::size_t m, double theta, double p) {
    double s = 0.0;
    for (std::size_t j = 0; j <= m && j < jumps.size(); ++j) {
        const double lag = static_cast<double>(m - j) + theta;
        if (lag > 0.0) s += jumps[j] * std::pow(lag, p);
    }
    return s;
}

std::vector<double> reflected_anchored(const std::vector<double>& g, double anchor) {
    const std::size_t n = g.size() - 1;
    std::vector<double> out(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out[i] = g[n - i] - anchor;
    return out;
}

}  // namespace

SamplePath frac_integral_left(const HolderFunction& f, double alpha) {
    require_order(alpha);
    const auto& grid = f.path.grid();
    const std::size_t n = grid.n_steps();
    const double h = grid.dt();
    SamplePath out(grid, f.path.dim());
    const double g1 = std::tgamma(1.0 + alpha);
    const double g2 = std::tgamma(2.0 + alpha);
    for (std::size_t c = 0; c < f.path.dim(); ++c) {
        const auto v = f.path.coordinate(c);
        const auto jumps = slope_jumps(v, h);
        for (std::size_t k = 1; k <= n; ++k) {
            const double x = grid.node(k);
            out(k, c) = v[0] * std::pow(x, alpha) / g1 + std::pow(h, 1.0 + alpha) * kernel_sum(jumps, k, 0.0, 1.0 + alpha) / g2;
        }
    }
    return out;
}

OperatorOutput frac_derivative_left(const HolderFunction& f, double alpha) {
    require_order(alpha);
    require(f.exponent > alpha, "frac_derivative_left: declared Hoelder exponent must exceed alpha");
    const auto& grid = f.path.grid();
    const std::size_t n = grid.n_steps();
    const double h = grid.dt();
    OperatorOutput out{SamplePath(grid, f.path.dim()), false};
    const double g0 = std::tgamma(1.0 - alpha);
    const double g1 = std::tgamma(2.0 - alpha);
    for (std::size_t c = 0; c < f.path.dim(); ++c) {
        const auto v = f.path.coordinate(c);
        if (v[0] != 0.0) out.origin_singular = true;
        const auto jumps = slope_jumps(v, h);
        for (std::size_t k = 1; k <= n; ++k) {
            const double x = grid.node(k);
            out.path(k, c) = v[0] * std::pow(x, -alpha) / g0 + std::pow(h, 1.0 - alpha) * kernel_sum(jumps, k, 0.0, 1.0 - alpha) / g1;
        }
    }
    return out;
}

double frac_derivative_left_at(const SamplePath& f, std::size_t coord, double alpha, double x) {
    require_order(alpha);
    const auto& grid = f.grid();
    require(coord < f.dim(), "frac_derivative_left_at: coordinate out of range");
    require(x > 0.0 && x <= grid.t_end() * (1.0 + 1e-14), "frac_derivative_left_at: x must lie in (a, b]");
    const double h = grid.dt();
    const auto v = f.coordinate(coord);
    const auto jumps = slope_jumps(v, h);
    const double pos = x / h;
    std::size_t m = static_cast<std::size_t>(std::floor(pos));
    if (m >= grid.n_steps()) m = grid.n_steps() - 1;
    const double theta = pos - static_cast<double>(m);
    return v[0] * std::pow(x, -alpha) / std::tgamma(1.0 - alpha) +
           std::pow(h, 1.0 - alpha) * kernel_sum(jumps, m, theta, 1.0 - alpha) / std::tgamma(2.0 - alpha);
}

SamplePath frac_derivative_right(const HolderFunction& g, double alpha, const std::optional<std::vector<double>>& b_anchor) {
    require_order(alpha);
    require(g.exponent > alpha, "frac_derivative_right: declared Hoelder exponent must exceed alpha");
    const auto& grid = g.path.grid();
    const std::size_t n = grid.n_steps();
    const std::size_t d = g.path.dim();
    if (b_anchor) require(b_anchor->size() == d, "frac_derivative_right: anchor dimension mismatch");
    const double h = grid.dt();
    SamplePath out(grid, d);
    const double g0 = std::tgamma(1.0 - alpha);
    const double g1 = std::tgamma(2.0 - alpha);
    for (std::size_t c = 0; c < d; ++c) {
        const auto v = g.path.coordinate(c);
        const double anchor = b_anchor ? (*b_anchor)[c] : v[n];
        const auto r = reflected_anchored(v, anchor);
        const auto jumps = slope_jumps(r, h);
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t m = n - k;  // reflected node index
            const double u = grid.node(m);
            out(k, c) = r[0] * std::pow(u, -alpha) / g0 + std::pow(h, 1.0 - alpha) * kernel_sum(jumps, m, 0.0, 1.0 - alpha) / g1;
        }
        out(n, c) = 0.0;
        if (r[0] != 0.0) out(n, c) = std::copysign(INFINITY, r[0]);
    }
    return out;
}

double zahle_integral(const HolderFunction& f, const HolderFunction& g, double alpha) {
    require_order(alpha);
    require(f.path.grid() == g.path.grid(), "zahle_integral: grid mismatch");
    require(f.path.dim() == g.path.dim(), "zahle_integral: dimension mismatch");
    require(f.exponent + g.exponent > 1.0, "zahle_integral: exponents must sum to more than 1");
    require(f.exponent > alpha, "zahle_integral: integrand exponent must exceed alpha");
    require(g.exponent > 1.0 - alpha, "zahle_integral: integrator exponent must exceed 1 - alpha");

    const auto& grid = f.path.grid();
    const std::size_t n = grid.n_steps();
    const double h = grid.dt();
    const double beta = 1.0 - alpha;  // order of the right derivative
    const auto rule = tanh_sinh(1.0 / 8.0, 3.2);
    const std::size_t q_count = rule.nodes.size();

    const double left_scale = std::pow(h, 1.0 - alpha) / std::tgamma(2.0 - alpha);
    const double right_scale = std::pow(h, 1.0 - beta) / std::tgamma(2.0 - beta);

    double total = 0.0;
    for (std::size_t c = 0; c < f.path.dim(); ++c) {
        const auto fv = f.path.coordinate(c);
        const auto gv = g.path.coordinate(c);
        const auto fj = slope_jumps(fv, h);
        const auto gr = reflected_anchored(gv, gv[n]);
        const auto gj = slope_jumps(gr, h);

        std::vector<double> cell_sums(n, 0.0);
        std::vector<double> kern(n);
        std::vector<double> left(n), right(n);
        for (std::size_t q = 0; q < q_count; ++q) {
            const double theta = rule.nodes[q];
            const double phi = rule.complements[q];
            // left derivative at t_m + theta h:  sum_{j<=m} A_j (m-j+theta)^{1-alpha}
            for (std::size_t i = 0; i < n; ++i) kern[i] = std::pow(static_cast<double>(i) + theta, 1.0 - alpha);
            for (std::size_t m = 0; m < n; ++m) {
                double s = 0.0;
                for (std::size_t j = 0; j <= m; ++j) s += fj[j] * kern[m - j];
                left[m] = fv[0] * std::pow((static_cast<double>(m) + theta) * h, -alpha) / std::tgamma(1.0 - alpha) +
                          left_scale * s;
            }
            // right derivative at the same point; reflected cell n-1-m, offset phi
            for (std::size_t i = 0; i < n; ++i) kern[i] = std::pow(static_cast<double>(i) + phi, 1.0 - beta);
            for (std::size_t mr = 0; mr < n; ++mr) {
                double s = 0.0;
                for (std::size_t j = 0; j <= mr; ++j) s += gj[j] * kern[mr - j];
                right[n - 1 - mr] = right_scale * s;
            }
            for (std::size_t m = 0; m < n; ++m) cell_sums[m] += rule.weights[q] * left[m] * right[m];
        }
        // (-1)^alpha (-1)^{1-alpha} = -1 from the two dropped phases
        total -= h * pairwise_sum(cell_sums);
    }
    return total;
}

double young_integral_rs(const SamplePath& f, const SamplePath& g) {
    require(f.grid() == g.grid(), "young_integral_rs: grid mismatch");
    require(f.dim() == g.dim(), "young_integral_rs: dimension mismatch");
    const std::size_t n = f.grid().n_steps();
    std::vector<double> terms(n);
    for (std::size_t k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t c = 0; c < f.dim(); ++c) s += f(k, c) * (g(k + 1, c) - g(k, c));
        terms[k] = s;
    }
    return pairwise_sum(terms);
}

}  // namespace fracmv
