#include "fracmv/mkv/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracmv/core/error.hpp"

namespace fracmv {

double exponent_condition_lhs(double alpha, double beta, double b) {
    return alpha / (beta * beta * (alpha + b)) + 1.0 / (alpha + b);
}

double moment_condition_lhs(double alpha, double beta, double beta1) {
    return 2.0 * alpha / ((2.0 * (alpha + beta1) - 1.0) * beta);
}

void validate_exponents(const ExponentSet& e, std::optional<double> eps0_prime) {
    require(e.hurst > kGoldenHurstBound && e.hurst < 1.0,
            "exponents: hurst must exceed (sqrt(5)-1)/2 = 0.6180 and be below 1");
    require(kGoldenHurstBound < e.beta, "exponents: beta must exceed (sqrt(5)-1)/2");
    require(e.beta < e.beta1 && e.beta1 < e.hurst, "exponents: need beta < beta1 < hurst");
    require(1.0 - e.beta < e.alpha && e.alpha < e.beta, "exponents: need 1 - beta < alpha < beta");
    require(exponent_condition_lhs(e.alpha, e.beta, e.beta) < 2.0, "exponents: alpha/(beta^2(alpha+beta)) + 1/(alpha+beta) < 2 fails");
    require(exponent_condition_lhs(e.alpha, e.beta, e.beta1) < 2.0, "exponents: condition with beta1 fails");
    if (eps0_prime)
        require(moment_condition_lhs(e.alpha, e.beta, e.beta1) < 2.0 * (1.0 - e.hurst) / e.hurst + *eps0_prime,
                "exponents: moment condition with eps0' fails");
}

ExponentSet choose_exponents(double hurst, std::optional<double> eps0_prime) {
    require(hurst > kGoldenHurstBound && hurst < 1.0,
            "unsupported Hurst parameter: the solver requires H in ((sqrt(5)-1)/2, 1) = (0.6180, 1)");
    if (eps0_prime) require(*eps0_prime > 0.0, "choose_exponents: eps0' must be positive");
    const double step = 1e-3;
    const double beta_lo = std::max(kGoldenHurstBound, 0.5);
    ExponentSet best{hurst, 0.0, 0.0, 0.0};
    double best_margin = -std::numeric_limits<double>::infinity();
    for (long ib = static_cast<long>(std::floor(beta_lo / step)) + 1;; ++ib) {
        const double beta = static_cast<double>(ib) * step;
        if (beta >= hurst) break;
        if (beta <= beta_lo) continue;
        const double beta1 = 0.5 * (beta + hurst);
        for (long ia = static_cast<long>(std::floor((1.0 - beta) / step)) + 1;; ++ia) {
            const double alpha = static_cast<double>(ia) * step;
            if (alpha >= beta) break;
            if (alpha <= 1.0 - beta) continue;
            const double margin = 2.0 - exponent_condition_lhs(alpha, beta, beta);
            if (margin <= 0.0) continue;
            if (eps0_prime && !(moment_condition_lhs(alpha, beta, beta1) < 2.0 * (1.0 - hurst) / hurst + *eps0_prime))
                continue;
            if (margin > best_margin) {
                best_margin = margin;
                best = ExponentSet{hurst, alpha, beta, beta1};
            }
        }
    }
    if (!(best_margin > 0.0)) throw NumericError("choose_exponents: no feasible exponent pair on the scan grid");
    validate_exponents(best, eps0_prime);
    return best;
}

Lambdas lambda_constants(const ModelConstants& k, const ExponentSet& e, const LambdaInputs& in) {
    const double a = e.alpha, b = e.beta, b1 = e.beta1;
    require(a > 0.0 && a < 1.0, "lambda_constants: alpha must lie in (0, 1)");
    require(b > a && b < 1.0, "lambda_constants: beta must lie in (alpha, 1)");
    require(b1 >= b && b1 < 1.0, "lambda_constants: beta1 must lie in [beta, 1)");
    require(a + b1 > 1.0, "lambda_constants: alpha + beta1 must exceed 1");
    require(in.x_holder_mu >= 0.0 && in.x_holder_nu >= 0.0 && in.mu_norm >= 0.0 && in.nu_norm >= 0.0,
            "lambda_constants: inputs must be nonnegative");
    k.validate();
    const double c0 = b1 / (std::tgamma(a) * (a + b1 - 1.0));
    const double g1a = std::tgamma(1.0 - a);
    const double ba1 = std::beta(1.0 - a, a + b1);
    const double ba2 = std::beta(b - a + 1.0, a + b1);
    const double two_pow = std::pow(2.0, 3.0 - a / b);
    const double ratio = a / b;
    const double expo = (b - a) / b;

    Lambdas l{};
    l[0] = c0 * ba1 / g1a * k.grad_sigma;
    l[1] = two_pow * b * c0 * std::pow(k.grad_sigma, expo) / ((b - a) * (a + b1) * g1a) *
           (std::pow(k.hess_sigma * std::max(in.x_holder_mu, in.x_holder_nu), ratio) +
            std::pow(k.dl_grad_sigma * std::min(in.mu_norm, in.nu_norm), ratio));
    l[2] = a * c0 * k.grad_sigma * ba2 / ((b - a) * g1a);
    l[3] = c0 * k.dl_sigma / g1a * (ba1 + a * ba2 / (b - a));
    l[4] = two_pow * b * c0 * std::pow(k.dl_sigma, expo) / ((b - a) * (b1 + a) * g1a) *
           (std::pow(k.grad1_dl_sigma * std::min(in.x_holder_mu, in.x_holder_nu), ratio) +
            std::pow((k.dl2_sigma + k.grad2_dl_sigma) * std::max(in.mu_norm, in.nu_norm), ratio));
    return l;
}

double contraction_step(const Lambdas& lambdas, double k_b, double bh_holder, const ExponentSet& e, double horizon) {
    require(horizon > 0.0, "contraction_step: horizon must be positive");
    require(k_b >= 0.0 && bh_holder >= 0.0, "contraction_step: inputs must be nonnegative");
    for (double v : lambdas) require(v >= 0.0, "contraction_step: Lambda constants must be nonnegative");
    const double inf = std::numeric_limits<double>::infinity();
    const double top = std::min(1.0, std::pow(horizon, e.beta1));
    const double g1 = std::max({3.0 * lambdas[0], lambdas[2], 3.0 * lambdas[3]}) * bh_holder;
    const double g2 = std::max(lambdas[1], lambdas[4]) * bh_holder;
    const double t1 = g1 > 0.0 ? std::pow(top / (3.0 * g1), 1.0 / e.beta1) : inf;
    const double t2 = g2 > 0.0 ? std::pow(top / (9.0 * g2), 1.0 / (e.alpha + e.beta1)) : inf;
    const double t3 = std::pow(top / (9.0 * std::max(1.0, k_b)), 1.0 / e.beta1);
    return std::min({t1, t2, t3});
}

double moment_bound_G(double horizon, double k_btilde, double k_sigmatilde, double bh_holder, double beta,
                      double gamma0, double c) {
    require(horizon >= 0.0 && k_btilde >= 0.0 && k_sigmatilde >= 0.0 && bh_holder >= 0.0,
            "moment_bound_G: inputs must be nonnegative");
    require(beta > 0.0 && beta < 1.0, "moment_bound_G: beta must lie in (0, 1)");
    require(gamma0 >= 0.0, "moment_bound_G: gamma0 must be nonnegative");
    require(c > 0.0, "moment_bound_G: the generic constant must be positive");
    const double h = horizon;
    const double first = std::max(1.0, h) * std::pow(bh_holder, 1.0 / beta);
    const double second = std::pow((1.0 + k_sigmatilde) * bh_holder, 1.0 / (gamma0 + beta)) *
                          std::max(h, std::pow(h, gamma0 / (gamma0 + beta)));
    const double third = (1.0 + k_btilde) * std::max(h, std::pow(h, 1.0 - beta));
    return c * std::max({first, second, third});
}

double moment_sup_bound(double horizon, double x_start_norm, double g_value, double beta, double c) {
    require(horizon >= 0.0 && x_start_norm >= 0.0 && g_value >= 0.0 && c > 0.0,
            "moment_sup_bound: inputs must be nonnegative");
    const double small = std::min(1.0, std::pow(horizon, beta));
    return std::exp(2.0 * c * horizon + small) * x_start_norm + small * std::exp(2.0 * c * horizon) * (1.0 + g_value);
}

double tele1_integral(double x, double y, double alpha, double beta, double length) {
    require(x > 0.0 && y > 0.0 && length > 0.0, "tele1_integral: inputs must be positive");
    require(alpha > 0.0 && alpha < beta && beta < 1.0, "tele1_integral: need 0 < alpha < beta < 1");
    // With v = r - u the integrand is x v^{beta-alpha-1} below v* = (y/x)^{1/beta}
    // and y v^{-alpha-1} above it.
    const double v_star = std::pow(y / x, 1.0 / beta);
    if (length <= v_star) return x * std::pow(length, beta - alpha) / (beta - alpha);
    return x * std::pow(v_star, beta - alpha) / (beta - alpha) +
           y * (std::pow(v_star, -alpha) - std::pow(length, -alpha)) / alpha;
}

double tele1_bound(double x, double y, double alpha, double beta) {
    return 4.0 * beta / ((beta - alpha) * alpha) * std::pow(x, alpha / beta) * std::pow(y, (beta - alpha) / beta);
}

}  // namespace fracmv
