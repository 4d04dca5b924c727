#include "fracmv/measure/measure_path.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/ot/simplex.hpp"

namespace fracmv {

EmpiricalMeasurePath::EmpiricalMeasurePath(TimeGrid grid, std::size_t dim, std::vector<SamplePath> trajectories)
    : grid_(grid), dim_(dim), paths_(std::move(trajectories)) {
    require(!paths_.empty(), "measure path: need at least one trajectory");
    for (const auto& p : paths_) {
        require(p.grid() == grid_, "measure path: trajectories must share the grid");
        require(p.dim() == dim_, "measure path: trajectories must share the dimension");
        p.check_finite();
    }
}

EmpiricalMeasurePath EmpiricalMeasurePath::dirac_zero(TimeGrid grid, std::size_t dim, std::size_t n_atoms) {
    return EmpiricalMeasurePath(grid, dim, std::vector<SamplePath>(n_atoms, SamplePath(grid, dim)));
}

std::vector<double> EmpiricalMeasurePath::marginal(std::size_t node) const {
    require(node < grid_.n_nodes(), "measure path: node out of range");
    std::vector<double> out(paths_.size() * dim_);
    for (std::size_t i = 0; i < paths_.size(); ++i)
        for (std::size_t c = 0; c < dim_; ++c) out[i * dim_ + c] = paths_[i](node, c);
    return out;
}

std::vector<double> EmpiricalMeasurePath::marginal_mean(std::size_t node) const {
    require(node < grid_.n_nodes(), "measure path: node out of range");
    std::vector<double> out(dim_);
    std::vector<double> column(paths_.size());
    for (std::size_t c = 0; c < dim_; ++c) {
        for (std::size_t i = 0; i < paths_.size(); ++i) column[i] = paths_[i](node, c);
        out[c] = pairwise_sum(column) / static_cast<double>(paths_.size());
    }
    return out;
}

EmpiricalMeasurePath EmpiricalMeasurePath::window(std::size_t first, std::size_t last) const {
    const TimeGrid w = grid_.window(first, last);
    std::vector<SamplePath> out;
    out.reserve(paths_.size());
    for (const auto& p : paths_) {
        std::vector<double> v(p.values().begin() + static_cast<std::ptrdiff_t>(first * dim_),
                              p.values().begin() + static_cast<std::ptrdiff_t>((last + 1) * dim_));
        out.emplace_back(w, dim_, std::move(v));
    }
    return EmpiricalMeasurePath(w, dim_, std::move(out));
}

namespace {

void require_compatible(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu) {
    require(mu.grid() == nu.grid(), "metric: grid mismatch");
    require(mu.dim() == nu.dim(), "metric: dimension mismatch");
    require(mu.size() == nu.size(), "metric: atom count mismatch");
}

double sq_dist(const SamplePath& a, const SamplePath& b, std::size_t node) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.dim(); ++c) {
        const double d = a(node, c) - b(node, c);
        s += d * d;
    }
    return s;
}

double sq_increment_mismatch(const SamplePath& a, const SamplePath& b, std::size_t s1, std::size_t s2) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.dim(); ++c) {
        const double d = (a(s1, c) - b(s1, c)) - (a(s2, c) - b(s2, c));
        s += d * d;
    }
    return s;
}

double mean_over_assignment(const Eigen::MatrixXd& cost, const std::vector<std::size_t>& col_of_row) {
    std::vector<double> terms(col_of_row.size());
    for (std::size_t i = 0; i < col_of_row.size(); ++i)
        terms[i] = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col_of_row[i]));
    return pairwise_sum(terms) / static_cast<double>(col_of_row.size());
}

}  // namespace

double wasserstein2(const Atoms& mu_atoms, const Atoms& nu_atoms) {
    require(!mu_atoms.empty(), "wasserstein2: empty atom sets");
    require(mu_atoms.size() == nu_atoms.size(), "wasserstein2: atom count mismatch");
    const std::size_t n = mu_atoms.size();
    const std::size_t d = mu_atoms[0].size();
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        require(mu_atoms[i].size() == d && nu_atoms[i].size() == d, "wasserstein2: atom dimension mismatch");
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = mu_atoms[i][c] - nu_atoms[j][c];
                s += diff * diff;
            }
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
        }
    }
    const auto a = solve_assignment(cost);
    return std::sqrt(std::max(0.0, mean_over_assignment(cost, a.col_of_row)));
}

double path_wasserstein_sup(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu) {
    require_compatible(mu, nu);
    const std::size_t n = mu.size();
    const std::size_t nodes = mu.grid().n_nodes();
    Eigen::MatrixXd cost(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    parallel_for(n, [&](std::size_t i) {
        for (std::size_t j = 0; j < n; ++j) {
            double m = 0.0;
            for (std::size_t k = 0; k < nodes; ++k) m = std::max(m, sq_dist(mu[i], nu[j], k));
            cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m;
        }
    });
    const auto a = solve_assignment(cost);
    return std::sqrt(std::max(0.0, mean_over_assignment(cost, a.col_of_row)));
}

PairCoupling pair_marginal_w2(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, std::size_t s1,
                              std::size_t s2) {
    require_compatible(mu, nu);
    require(s1 < s2, "pair_marginal_w2: requires s1 < s2");
    require(s2 < mu.grid().n_nodes(), "pair_marginal_w2: index beyond grid");
    const std::size_t n = mu.size();
    PairCoupling out;
    out.cost.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            out.cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::max(sq_dist(mu[i], nu[j], s1), sq_dist(mu[i], nu[j], s2));
    out.assignment = solve_assignment(out.cost);
    out.value = std::sqrt(std::max(0.0, mean_over_assignment(out.cost, out.assignment.col_of_row)));
    return out;
}

WcResult wc_increment_detail(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, std::size_t s1,
                             std::size_t s2, double lex_tol, OtBackend backend) {
    require(lex_tol >= 0.0, "wc_increment: lex_tol must be nonnegative");
    const auto stage1 = pair_marginal_w2(mu, nu, s1, s2);
    const std::size_t n = mu.size();
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd c2(ni, ni);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            c2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = sq_increment_mismatch(mu[i], nu[j], s1, s2);

    WcResult out;
    out.stage1 = stage1.value * stage1.value;
    const double max_c1 = stage1.cost.cwiseAbs().maxCoeff();
    const double eps = std::numeric_limits<double>::epsilon();

    if (backend == OtBackend::simplex) {
        const auto lp1 = solve_transport_lp(stage1.cost);
        if (lp1.status != LpStatus::optimal) throw NumericError("wc_increment: stage-1 LP failed");
        const double bound = lp1.objective * (1.0 + lex_tol) + 64.0 * eps * std::max(1.0, max_c1);
        const auto lp2 = solve_transport_lp(c2, stage1.cost, bound);
        if (lp2.status != LpStatus::optimal) throw NumericError("wc_increment: stage-2 LP infeasible");
        out.stage1 = lp1.objective;
        out.value = std::sqrt(std::max(0.0, lp2.objective));
        for (Eigen::Index k = 0; k < lp2.x.size(); ++k)
            if (lp2.x[k] > 0.0) ++out.face_edges;
        return out;
    }

    // Edges whose reduced cost against the optimal duals is (numerically) zero
    // span the optimal face; stage 2 is an assignment restricted to them.
    const double opt_raw = stage1.assignment.total_cost;
    const double threshold =
        lex_tol * std::max(opt_raw, 0.0) / static_cast<double>(n) + 64.0 * eps * static_cast<double>(n) * std::max(1.0, max_c1);
    const double max_c2 = c2.cwiseAbs().maxCoeff();
    const double forbidden = 2.0 * static_cast<double>(n) * (max_c2 + 1.0);
    Eigen::MatrixXd restricted = c2;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
            const double reduced = stage1.cost(ii, jj) - stage1.assignment.row_dual[i] - stage1.assignment.col_dual[j];
            if (reduced <= threshold) {
                ++out.face_edges;
            } else {
                restricted(ii, jj) = forbidden;
                if (reduced <= 1e3 * threshold) ++out.ambiguous_edges;
            }
        }
    out.degenerate = out.ambiguous_edges > 0;
    const auto a2 = solve_assignment(restricted);
    const double v = mean_over_assignment(c2, a2.col_of_row);
    out.value = std::sqrt(std::max(0.0, v));
    return out;
}

double wc_increment(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, std::size_t s1, std::size_t s2,
                    double lex_tol, OtBackend backend) {
    return wc_increment_detail(mu, nu, s1, s2, lex_tol, backend).value;
}

std::vector<std::pair<std::size_t, std::size_t>> metric_pairs(std::size_t n_steps, std::size_t thin_above) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    const bool thin = thin_above > 0 && n_steps > thin_above;
    for (std::size_t s1 = 0; s1 < n_steps; ++s1) {
        if (thin) {
            for (std::size_t span = 1; s1 + span <= n_steps; span *= 2) pairs.emplace_back(s1, s1 + span);
        } else {
            for (std::size_t s2 = s1 + 1; s2 <= n_steps; ++s2) pairs.emplace_back(s1, s2);
        }
    }
    return pairs;
}

MetricReport holder_wasserstein(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, double beta,
                                const MetricOptions& options) {
    require_compatible(mu, nu);
    require(beta > 0.0 && beta < 1.0, "holder_wasserstein: beta must lie in (0, 1)");
    const auto pairs = metric_pairs(mu.grid().n_steps(), options.thin_above);
    MetricReport report;
    report.pairs.resize(pairs.size());
    report.w2_sup = path_wasserstein_sup(mu, nu);
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [s1, s2] = pairs[p];
        const auto detail = wc_increment_detail(mu, nu, s1, s2, options.lex_tol, options.backend);
        report.pairs[p] = PairEntry{s1, s2, std::sqrt(detail.stage1), detail.value};
    });
    const double dt = mu.grid().dt();
    for (const auto& e : report.pairs)
        report.wc_sup_ratio = std::max(report.wc_sup_ratio, e.wc / std::pow(static_cast<double>(e.s2 - e.s1) * dt, beta));
    report.combined = report.w2_sup + report.wc_sup_ratio;
    return report;
}

double mean_sq_increment(const EmpiricalMeasurePath& mu, std::size_t s1, std::size_t s2) {
    require(s1 < s2, "mean_sq_increment: requires s1 < s2");
    require(s2 < mu.grid().n_nodes(), "mean_sq_increment: index beyond grid");
    std::vector<double> terms(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < mu.dim(); ++c) {
            const double d = mu[i](s2, c) - mu[i](s1, c);
            s += d * d;
        }
        terms[i] = s;
    }
    return pairwise_sum(terms) / static_cast<double>(mu.size());
}

double measure_holder_norm(const EmpiricalMeasurePath& mu, double beta, std::size_t thin_above) {
    require(beta > 0.0 && beta < 1.0, "measure_holder_norm: beta must lie in (0, 1)");
    std::vector<double> sup_sq(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double m = 0.0;
        for (std::size_t k = 0; k < mu.grid().n_nodes(); ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < mu.dim(); ++c) s += mu[i](k, c) * mu[i](k, c);
            m = std::max(m, s);
        }
        sup_sq[i] = m;
    }
    const double sup_part = std::sqrt(pairwise_sum(sup_sq) / static_cast<double>(mu.size()));
    double ratio = 0.0;
    const double dt = mu.grid().dt();
    for (const auto& [s1, s2] : metric_pairs(mu.grid().n_steps(), thin_above))
        ratio = std::max(ratio, std::sqrt(mean_sq_increment(mu, s1, s2)) / std::pow(static_cast<double>(s2 - s1) * dt, beta));
    return sup_part + ratio;
}

}  // namespace fracmv
