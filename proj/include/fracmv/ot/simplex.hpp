#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fracmv {

enum class LpStatus { optimal, infeasible, unbounded, iteration_limit };

struct LpResult {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;
    Eigen::VectorXd x;
};

/// Dense two-phase tableau simplex with Bland's anti-cycling rule for
/// min c^T x subject to A x = b, x >= 0. Redundant equality rows are detected
/// and dropped after phase 1. Intended for small problems (a few hundred
/// variables); used as an independent check of the assignment solver.
LpResult solve_lp_standard_form(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                                double tol = 1e-11);

/// Equal-weight optimal transport between N atoms written as an LP over the
/// coupling pi (row-major N x N, rows/cols summing to 1/N). If `side_cost` is
/// non-empty the LP additionally enforces <side_cost, pi> <= side_bound.
LpResult solve_transport_lp(const Eigen::MatrixXd& cost, const Eigen::MatrixXd& side_cost = {},
                            double side_bound = 0.0);

}  // namespace fracmv
