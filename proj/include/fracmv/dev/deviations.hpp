#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracmv/core/grid.hpp"
#include "fracmv/fbm/fbm.hpp"
#include "fracmv/mkv/model.hpp"

namespace fracmv {

/// A step-function element of the reproducing kernel Hilbert space, with its
/// squared norm cached.
class Control {
public:
    Control(SteppedFunction h, double hurst);
    static Control zero(const TimeGrid& grid, std::size_t dim, double hurst);

    const SteppedFunction& h() const { return h_; }
    double hurst() const { return hurst_; }
    double norm_squared() const { return norm_sq_; }

private:
    SteppedFunction h_;
    double hurst_;
    double norm_sq_;
};

/// Number of internal RK4 cells per control cell.
inline constexpr std::size_t kSkeletonRefinement = 4;

/// Solves Z' = b(Z, delta_{X0_t}) + sigma(Z, delta_{X0_t}) (R_H h)' jointly with
/// the deterministic limit X0, on a 4x finer grid where (R_H h)' is the
/// centered difference over each fine cell. Returned on the control grid.
SamplePath skeleton_ldp(const ModelSpec& model, std::span<const double> x0, const Control& control);

/// Linearized skeleton Z' = grad_x b(., delta_{X0_t})(X0_t) Z + sigma(X0_t, delta_{X0_t}) (R_H h)', Z(0) = 0.
SamplePath skeleton_mdp(const ModelSpec& model, std::span<const double> x0, const Control& control);

/// (1/2) ||h||_H^2.
double cameron_martin_cost(const Control& control);

struct RateOptions {
    double initial_penalty = 10.0;
    double penalty_factor = 10.0;
    std::size_t stages = 6;
    double inner_tol = 1e-8;
    std::size_t max_inner_iter = 400;
    double residual_tol = 1e-4;
};

struct RateResult {
    double value = 0.0;
    Control control;
    double residual = 0.0;
    bool converged = false;    // residual within residual_tol
    bool unreachable = false;  // endpoint insensitive to the control
    std::size_t inner_iterations = 0;
    std::vector<double> stage_residuals;
};

/// Minimizes (1/2)||h||_H^2 over step controls on `grid` subject to
/// skeleton_ldp(h)(T) = y, by penalty continuation with a BFGS inner loop in
/// whitened coordinates.
RateResult rate_endpoint(const ModelSpec& model, std::span<const double> x0, std::span<const double> target,
                         const TimeGrid& grid, double hurst, const RateOptions& options = {});

enum class DeviationMode { ldp, mdp };

struct DeviationOptions {
    std::vector<double> eps_list;
    std::vector<double> deltas;
    std::size_t n_samples = 1000;
    DeviationMode mode = DeviationMode::ldp;
    /// zeta(eps) = eps^zeta_exponent; defaults to -H/2.
    std::optional<double> zeta_exponent;
    FbmSamplerConfig sampler;
    std::size_t max_iter = 50;
    double tol = 1e-3;
    double z_score = 1.959963984540054;
};

struct DeviationPoint {
    double eps = 0.0;
    double delta = 0.0;
    double zeta = 1.0;  // 1 in ldp mode
    std::size_t count = 0;
    std::size_t n = 0;
    double p_hat = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    /// -eps^{2H} log p (ldp) or -zeta^{-2} log p (mdp); absent when p = 0.
    std::optional<double> transformed;
    bool degenerate = false;  // count is 0 or n
};

struct DeviationEstimate {
    DeviationMode mode = DeviationMode::ldp;
    double hurst = 0.0;
    std::optional<double> zeta_exponent;
    std::vector<DeviationPoint> points;  // eps-major, then delta
    std::vector<std::string> warnings;
};

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z);

/// Monte Carlo estimate of P(||X^eps - X0||_inf >= delta) (ldp mode) or of the
/// same event for (X^eps - X0) / (eps^H zeta(eps)) (mdp mode). X^eps is the
/// fixed-point law with noise scale eps^H; all eps share the noise draws.
DeviationEstimate mc_deviation_probability(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                                           const DeviationOptions& options);

struct ConvergenceRate {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> eps_list;
    std::vector<double> mean_sq;  // E ||X^eps - X0||_inf^2
};

/// Least-squares slope of log E||X^eps - X0||^2 against log eps. The list must
/// span at least one decade.
ConvergenceRate convergence_rate_check(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                                       const std::vector<double>& eps_list, std::size_t n_samples,
                                       const FbmSamplerConfig& sampler);

}  // namespace fracmv
