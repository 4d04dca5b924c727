#include "fracmv/mkv/model.hpp"

#include <algorithm>
#include <cmath>

#include "fracmv/core/error.hpp"

namespace fracmv {

namespace {

// sup |tanh''| = 4 / (3 sqrt 3).
constexpr double kTanhSecondDerivativeSup = 0.76980035891950100;

bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

MarginalData::MarginalData(std::vector<double> atoms_in, std::size_t dim_in)
    : atoms(std::move(atoms_in)), dim(dim_in) {
    require(dim > 0, "MarginalData: dimension must be positive");
    require(!atoms.empty() && atoms.size() % dim == 0, "MarginalData: atom array must be a nonempty multiple of dim");
    const std::size_t n = atoms.size() / dim;
    mean.assign(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += atoms[i * dim + c];
        mean[c] = s / static_cast<double>(n);
    }
}

MarginalData MarginalData::dirac(std::span<const double> point) {
    return MarginalData(std::vector<double>(point.begin(), point.end()), point.size());
}

void ModelConstants::validate() const {
    for (double v : {k_b, b_zero, sigma_sup, grad_sigma, hess_sigma, dl_sigma, dl_grad_sigma, grad1_dl_sigma,
                     grad2_dl_sigma, dl2_sigma, k_btilde})
        require(finite_nonnegative(v), "model constants must be finite and nonnegative");
}

void ModelSpec::validate() const {
    require(dim >= 1, "model: dimension must be at least 1");
    require(static_cast<bool>(drift), "model: drift evaluator missing");
    require(static_cast<bool>(diffusion), "model: diffusion evaluator missing");
    constants.validate();
}

ModelSpec linear_model(const LinearModelParams& p) {
    require(p.dim >= 1, "linear model: dimension must be at least 1");
    for (double v : {p.a, p.c, p.b0, p.s0}) require(std::isfinite(v), "linear model: parameters must be finite");
    ModelSpec m;
    m.family = "linear";
    m.dim = p.dim;
    m.measure_dependent = p.c != 0.0;
    m.drift = [p](std::span<const double> x, const Marginal& mu, std::span<double> out) {
        for (std::size_t i = 0; i < p.dim; ++i) out[i] = -p.a * x[i] + p.c * mu.mean[i] + p.b0;
    };
    m.diffusion = [p](std::span<const double>, const Marginal&, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < p.dim; ++i) out[i * p.dim + i] = p.s0;
    };
    m.drift_jacobian = [p](std::span<const double>, const Marginal&, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < p.dim; ++i) out[i * p.dim + i] = -p.a;
    };
    m.constants.k_b = std::max(std::abs(p.a), std::abs(p.c));
    m.constants.b_zero = std::abs(p.b0);
    m.constants.sigma_sup = std::abs(p.s0);
    return m;
}

ModelSpec tanh_model(const TanhModelParams& p) {
    require(p.dim >= 1, "tanh model: dimension must be at least 1");
    for (double v : {p.a, p.c, p.b0, p.s0, p.s1, p.s2}) require(std::isfinite(v), "tanh model: parameters must be finite");
    ModelSpec m;
    m.family = "tanh";
    m.dim = p.dim;
    m.measure_dependent = p.c != 0.0 || p.s2 != 0.0;
    m.drift = [p](std::span<const double> x, const Marginal& mu, std::span<double> out) {
        for (std::size_t i = 0; i < p.dim; ++i) out[i] = -p.a * x[i] + p.c * mu.mean[i] + p.b0;
    };
    m.diffusion = [p](std::span<const double> x, const Marginal& mu, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < p.dim; ++i)
            out[i * p.dim + i] = p.s0 + p.s1 * std::tanh(x[i]) + p.s2 * std::tanh(mu.mean[i]);
    };
    m.drift_jacobian = [p](std::span<const double>, const Marginal&, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t i = 0; i < p.dim; ++i) out[i * p.dim + i] = -p.a;
    };
    auto& k = m.constants;
    k.k_b = std::max(std::abs(p.a), std::abs(p.c));
    k.b_zero = std::abs(p.b0);
    k.sigma_sup = std::abs(p.s0) + std::abs(p.s1) + std::abs(p.s2);
    k.grad_sigma = std::abs(p.s1);
    k.hess_sigma = kTanhSecondDerivativeSup * std::abs(p.s1);
    // The Lions derivative of tanh(mean(mu)) is sech^2(mean) s2, constant in the
    // auxiliary variable, so only its measure derivative survives.
    k.dl_sigma = std::abs(p.s2);
    k.dl2_sigma = kTanhSecondDerivativeSup * std::abs(p.s2);
    return m;
}

}  // namespace fracmv
