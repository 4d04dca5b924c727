#pragma once

#include <optional>
#include <vector>

#include "fracmv/core/grid.hpp"

namespace fracmv {

/// A sampled path together with its declared Hoelder exponent. Between nodes the
/// function is taken to be the piecewise-linear interpolant of the samples.
struct HolderFunction {
    SamplePath path;
    double exponent = 1.0;
};

/// Grid output of an operator whose value at the left end may be infinite.
/// When origin_singular is set, row 0 holds 0 and must not be used.
struct OperatorOutput {
    SamplePath path;
    bool origin_singular = false;
};

/// Left Riemann-Liouville integral of order alpha at every node, exact for the
/// piecewise-linear interpolant.
SamplePath frac_integral_left(const HolderFunction& f, double alpha);

/// Left Weyl derivative of order alpha at every node. The interpolant's
/// derivative is evaluated in closed form: f(a)(x-a)^{-alpha}/Gamma(1-alpha)
/// plus a sum over slope jumps, so no singular quadrature is involved.
/// Requires f.exponent > alpha.
OperatorOutput frac_derivative_left(const HolderFunction& f, double alpha);

/// Right Weyl derivative of g_{b-} = g - g(b), with the complex phase (-1)^alpha
/// dropped. `b_anchor` overrides g(b) when given.
SamplePath frac_derivative_right(const HolderFunction& g, double alpha,
                                 const std::optional<std::vector<double>>& b_anchor = std::nullopt);

/// Left Weyl derivative of the interpolant at an arbitrary x in (a, b].
double frac_derivative_left_at(const SamplePath& f, std::size_t coord, double alpha, double x);

/// Pathwise integral sum_c int_a^b f_c dg_c through the fractional
/// integration-by-parts formula, with per-cell tanh-sinh quadrature of the
/// product of the two fractional derivatives. Requires
/// lambda + mu > 1, lambda > alpha, mu > 1 - alpha.
double zahle_integral(const HolderFunction& f, const HolderFunction& g, double alpha);

/// Left-point Riemann-Stieltjes sum sum_k <f(t_k), g(t_{k+1}) - g(t_k)>.
double young_integral_rs(const SamplePath& f, const SamplePath& g);

}  // namespace fracmv
