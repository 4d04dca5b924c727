#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace fracmv {

/// Optimal assignment for a square cost matrix, with dual potentials such that
/// cost(i, j) - row_dual[i] - col_dual[j] >= 0 (up to rounding) with equality
/// on the assignment.
struct Assignment {
    std::vector<std::size_t> col_of_row;
    double total_cost = 0.0;
    std::vector<double> row_dual;
    std::vector<double> col_dual;
};

/// Shortest-augmenting-path Hungarian algorithm, O(N^3).
Assignment solve_assignment(const Eigen::MatrixXd& cost);

}  // namespace fracmv
