#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fracmv {

/// View of one time marginal of an empirical law: `count` atoms of dimension
/// `dim` stored row-major, plus their mean.
struct Marginal {
    std::span<const double> atoms;
    std::span<const double> mean;
    std::size_t dim = 0;

    std::size_t count() const { return dim == 0 ? 0 : atoms.size() / dim; }
};

/// Owning storage for a Marginal.
struct MarginalData {
    std::vector<double> atoms;
    std::vector<double> mean;
    std::size_t dim = 0;

    MarginalData() = default;
    MarginalData(std::vector<double> atoms, std::size_t dim);
    /// The Dirac law at `point`.
    static MarginalData dirac(std::span<const double> point);

    Marginal view() const { return Marginal{atoms, mean, dim}; }
};

/// Sup-norm bounds on the coefficients and their state and Lions derivatives.
struct ModelConstants {
    double k_b = 0.0;             // Lipschitz constant of b in (x, mu)
    double b_zero = 0.0;          // |b(0, delta_0)|
    double sigma_sup = 0.0;       // ||sigma||
    double grad_sigma = 0.0;      // ||grad sigma||
    double hess_sigma = 0.0;      // ||grad^2 sigma||
    double dl_sigma = 0.0;        // ||D^L sigma||
    double dl_grad_sigma = 0.0;   // ||D^L grad sigma||
    double grad1_dl_sigma = 0.0;  // ||grad_1 D^L sigma||
    double grad2_dl_sigma = 0.0;  // ||grad_2 D^L sigma||
    double dl2_sigma = 0.0;       // ||D^{L,2} sigma||
    double k_btilde = 0.0;        // Lipschitz constant of grad_x b

    /// Throws DomainError unless every constant is finite and nonnegative.
    void validate() const;
};

/// out = b(x, mu), length d.
using DriftFn = std::function<void(std::span<const double> x, const Marginal& mu, std::span<double> out)>;
/// out = sigma(x, mu), d x d row-major.
using DiffusionFn = std::function<void(std::span<const double> x, const Marginal& mu, std::span<double> out)>;
/// out = grad_x b(., mu)(x), d x d row-major with out[i*d + j] = d b_i / d x_j.
using DriftJacobianFn = std::function<void(std::span<const double> x, const Marginal& mu, std::span<double> out)>;

struct ModelSpec {
    std::string family;
    std::size_t dim = 1;
    DriftFn drift;
    DiffusionFn diffusion;
    DriftJacobianFn drift_jacobian;  // optional
    ModelConstants constants;
    /// False when neither coefficient reads the measure argument.
    bool measure_dependent = true;

    void validate() const;
};

/// b(x, mu) = -a x + c mean(mu) + b0, sigma = s0 I.
struct LinearModelParams {
    std::size_t dim = 1;
    double a = 1.0;
    double c = 0.0;
    double b0 = 0.0;
    double s0 = 1.0;
};

/// b(x, mu) = -a x + c mean(mu) + b0,
/// sigma(x, mu) = diag(s0 + s1 tanh(x_i) + s2 tanh(mean_i(mu))).
struct TanhModelParams {
    std::size_t dim = 1;
    double a = 1.0;
    double c = 0.5;
    double b0 = 0.0;
    double s0 = 0.5;
    double s1 = 0.25;
    double s2 = 0.25;
};

ModelSpec linear_model(const LinearModelParams& p);
ModelSpec tanh_model(const TanhModelParams& p);

}  // namespace fracmv
