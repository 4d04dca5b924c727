#include "fracmv/ot/assignment.hpp"

#include <limits>

#include "fracmv/core/error.hpp"

namespace fracmv {

Assignment solve_assignment(const Eigen::MatrixXd& cost) {
    const auto n = static_cast<std::size_t>(cost.rows());
    require(n >= 1 && cost.cols() == cost.rows(), "assignment: cost matrix must be square and nonempty");
    require(cost.allFinite(), "assignment: cost matrix must be finite");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; p[j] is the row matched to column j, row 0 is virtual.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    Assignment out;
    out.col_of_row.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) out.col_of_row[p[j] - 1] = j - 1;
    out.row_dual.assign(u.begin() + 1, u.end());
    out.col_dual.assign(v.begin() + 1, v.end());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        total += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.col_of_row[i]));
    out.total_cost = total;
    return out;
}

}  // namespace fracmv
