#pragma once

#include <array>
#include <optional>

#include "fracmv/mkv/model.hpp"

namespace fracmv {

/// (sqrt(5) - 1) / 2, the lower admissible Hurst bound of the solver.
inline constexpr double kGoldenHurstBound = 0.61803398874989484820;

struct ExponentSet {
    double hurst = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double beta1 = 0.0;
};

/// alpha / (beta^2 (alpha + b)) + 1 / (alpha + b); must stay below 2.
double exponent_condition_lhs(double alpha, double beta, double b);

/// 2 alpha / ((2 (alpha + beta1) - 1) beta), compared against 2(1-H)/H + eps0'.
double moment_condition_lhs(double alpha, double beta, double beta1);

/// Throws DomainError naming the failed invariant.
void validate_exponents(const ExponentSet& e, std::optional<double> eps0_prime = std::nullopt);

/// Scans beta and alpha on a 1e-3 grid strictly inside their intervals and
/// returns the pair with the largest margin in the exponent condition, with
/// beta1 = (beta + H) / 2.
ExponentSet choose_exponents(double hurst, std::optional<double> eps0_prime = std::nullopt);

struct LambdaInputs {
    double x_holder_mu = 0.0;  // beta-Hoelder seminorm of X^mu on the window
    double x_holder_nu = 0.0;
    double mu_norm = 0.0;      // window norm of mu, i.e. distance to the zero-path Dirac law
    double nu_norm = 0.0;
};

using Lambdas = std::array<double, 5>;

/// The five noise-estimate constants of the contraction argument. Requires
/// alpha in (0, 1), beta in (alpha, 1), beta1 >= beta and alpha + beta1 > 1.
Lambdas lambda_constants(const ModelConstants& k, const ExponentSet& e, const LambdaInputs& in);

/// Largest window length for which the contraction estimate closes; terms whose
/// Lambda group or noise norm vanishes are +infinity and drop out.
double contraction_step(const Lambdas& lambdas, double k_b, double bh_holder, const ExponentSet& e, double horizon);

/// Moment bound G(h, K_b~, K_sigma~, B^H) with a user-supplied generic constant C.
double moment_bound_G(double horizon, double k_btilde, double k_sigmatilde, double bh_holder, double beta,
                      double gamma0, double c);

/// exp(2Ch + (1 ^ h^beta)) |X(S)| + (1 ^ h^beta) e^{2Ch} (1 + G): companion bound
/// on the sup norm over the window.
double moment_sup_bound(double horizon, double x_start_norm, double g_value, double beta, double c);

/// Closed form of int_s^r ((x (r-u)^beta) ^ y) / (r-u)^{alpha+1} du.
double tele1_integral(double x, double y, double alpha, double beta, double length);

/// The bound 4 beta / ((beta - alpha) alpha) x^{alpha/beta} y^{(beta-alpha)/beta}.
double tele1_bound(double x, double y, double alpha, double beta);

}  // namespace fracmv
