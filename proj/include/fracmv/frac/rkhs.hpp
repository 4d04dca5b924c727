#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fracmv/core/grid.hpp"
#include "fracmv/frac/fractional.hpp"

namespace fracmv {

/// Scalar product of the fBm reproducing kernel Hilbert space on step
/// functions. Each cell pair integrates |t-s|^{2H-2} in closed form, which
/// gives dt^{2H} times the fractional Gaussian noise autocovariance.
double h_inner(const SteppedFunction& psi, const SteppedFunction& phi, double hurst);

/// (K_H^* psi)(t) = int_t^T psi(s) dK_H(s, t)/ds ds at every node. The value at
/// t = 0 diverges like t^{1/2-H} unless psi vanishes, so row 0 is flagged.
OperatorOutput khstar(const SteppedFunction& psi, double hurst);

/// (K_H^* psi)(t) at an arbitrary t in (0, T].
std::vector<double> khstar_at(const SteppedFunction& psi, double hurst, double t);

/// (R_H h)(t_k) = <1_{[0, t_k]} e_j, h> for every node and coordinate.
SamplePath rh_operator(const SteppedFunction& h, double hurst);

/// (R_H h)(t) at an arbitrary t in [0, T], coordinatewise.
std::vector<double> rh_at(const SteppedFunction& h, double hurst, double t);

/// Matrix M with (R_H h)(x_i) = sum_m M(i, m) h_m for a scalar step function on
/// `grid` and evaluation points x_i.
Eigen::MatrixXd rh_matrix(const TimeGrid& grid, double hurst, const std::vector<double>& points);

/// Gram matrix G(i, j) = <1_{cell i}, 1_{cell j}> for scalar step functions.
Eigen::MatrixXd h_gram(const TimeGrid& grid, double hurst);

}  // namespace fracmv
