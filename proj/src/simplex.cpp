#include "fracmv/ot/simplex.hpp"

#include <cmath>
#include <limits>

#include "fracmv/core/error.hpp"

namespace fracmv {

namespace {

struct Tableau {
    // rows 0..m-1 are constraints, last row is the objective (reduced costs);
    // last column is the right-hand side.
    Eigen::MatrixXd t;
    std::vector<Eigen::Index> basis;

    Eigen::Index rows() const { return t.rows() - 1; }
    Eigen::Index cols() const { return t.cols() - 1; }

    void pivot(Eigen::Index r, Eigen::Index c) {
        t.row(r) /= t(r, c);
        for (Eigen::Index i = 0; i < t.rows(); ++i) {
            if (i == r) continue;
            const double f = t(i, c);
            if (f != 0.0) t.row(i) -= f * t.row(r);
        }
        basis[static_cast<std::size_t>(r)] = c;
    }

    // Bland's rule over columns [0, allowed); returns false when unbounded.
    LpStatus run(Eigen::Index allowed, double tol, int max_iter) {
        const Eigen::Index obj = rows();
        for (int it = 0; it < max_iter; ++it) {
            Eigen::Index enter = -1;
            for (Eigen::Index j = 0; j < allowed; ++j)
                if (t(obj, j) < -tol) {
                    enter = j;
                    break;
                }
            if (enter < 0) return LpStatus::optimal;
            Eigen::Index leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < obj; ++i) {
                if (t(i, enter) > tol) {
                    const double ratio = t(i, cols()) / t(i, enter);
                    if (ratio < best - 1e-15 ||
                        (std::abs(ratio - best) <= 1e-15 && leave >= 0 && basis[i] < basis[leave])) {
                        best = ratio;
                        leave = i;
                    }
                }
            }
            if (leave < 0) return LpStatus::unbounded;
            pivot(leave, enter);
        }
        return LpStatus::iteration_limit;
    }
};

}  // namespace

LpResult solve_lp_standard_form(const Eigen::MatrixXd& a_in, const Eigen::VectorXd& b_in, const Eigen::VectorXd& c,
                                double tol) {
    const Eigen::Index m = a_in.rows();
    const Eigen::Index n = a_in.cols();
    require(b_in.size() == m && c.size() == n, "lp: dimension mismatch");
    Eigen::MatrixXd a = a_in;
    Eigen::VectorXd b = b_in;
    for (Eigen::Index i = 0; i < m; ++i)
        if (b[i] < 0.0) {
            a.row(i) *= -1.0;
            b[i] = -b[i];
        }

    // Phase 1: artificials in columns n..n+m-1.
    Tableau tab;
    tab.t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    tab.t.block(0, 0, m, n) = a;
    tab.t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    tab.t.block(0, n + m, m, 1) = b;
    tab.basis.resize(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) tab.basis[static_cast<std::size_t>(i)] = n + i;
    for (Eigen::Index i = 0; i < m; ++i) tab.t.row(m) -= tab.t.row(i);
    for (Eigen::Index i = 0; i < m; ++i) tab.t(m, n + i) = 0.0;

    const int max_iter = 50 * static_cast<int>(n + m) + 1000;
    LpResult out;
    if (tab.run(n + m, tol, max_iter) == LpStatus::iteration_limit) {
        out.status = LpStatus::iteration_limit;
        return out;
    }
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    if (-tab.t(m, n + m) > 1e-9 * scale) {
        out.status = LpStatus::infeasible;
        return out;
    }

    // Drive artificials out of the basis; rows that cannot be pivoted are redundant.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (tab.basis[static_cast<std::size_t>(i)] < n) {
            keep.push_back(i);
            continue;
        }
        Eigen::Index col = -1;
        for (Eigen::Index j = 0; j < n; ++j)
            if (std::abs(tab.t(i, j)) > 1e-9) {
                col = j;
                break;
            }
        if (col >= 0) {
            tab.pivot(i, col);
            keep.push_back(i);
        }
    }
    const auto mk = static_cast<Eigen::Index>(keep.size());
    Tableau p2;
    p2.t = Eigen::MatrixXd::Zero(mk + 1, n + 1);
    p2.basis.resize(keep.size());
    for (Eigen::Index r = 0; r < mk; ++r) {
        p2.t.block(r, 0, 1, n) = tab.t.block(keep[static_cast<std::size_t>(r)], 0, 1, n);
        p2.t(r, n) = tab.t(keep[static_cast<std::size_t>(r)], n + m);
        p2.basis[static_cast<std::size_t>(r)] = tab.basis[static_cast<std::size_t>(keep[static_cast<std::size_t>(r)])];
    }
    p2.t.block(mk, 0, 1, n) = c.transpose();
    for (Eigen::Index r = 0; r < mk; ++r) {
        const double f = p2.t(mk, p2.basis[static_cast<std::size_t>(r)]);
        if (f != 0.0) p2.t.row(mk) -= f * p2.t.row(r);
    }
    out.status = p2.run(n, tol, max_iter);
    if (out.status != LpStatus::optimal) return out;
    out.x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index r = 0; r < mk; ++r) out.x[p2.basis[static_cast<std::size_t>(r)]] = std::max(0.0, p2.t(r, n));
    out.objective = c.dot(out.x);
    return out;
}

LpResult solve_transport_lp(const Eigen::MatrixXd& cost, const Eigen::MatrixXd& side_cost, double side_bound) {
    const Eigen::Index n = cost.rows();
    require(n >= 1 && cost.cols() == n, "transport lp: cost must be square");
    const bool side = side_cost.size() > 0;
    if (side) require(side_cost.rows() == n && side_cost.cols() == n, "transport lp: side cost shape mismatch");
    const Eigen::Index vars = n * n + (side ? 1 : 0);
    const Eigen::Index rows = 2 * n + (side ? 1 : 0);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, vars);
    Eigen::VectorXd b = Eigen::VectorXd::Constant(rows, 1.0 / static_cast<double>(n));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(vars);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::Index v = i * n + j;
            a(i, v) = 1.0;
            a(n + j, v) = 1.0;
            c[v] = cost(i, j);
        }
    if (side) {
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) a(2 * n, i * n + j) = side_cost(i, j);
        a(2 * n, n * n) = 1.0;  // slack
        b[2 * n] = side_bound;
    }
    auto res = solve_lp_standard_form(a, b, c);
    if (res.status == LpStatus::optimal && side) res.x.conservativeResize(n * n);
    return res;
}

}  // namespace fracmv
