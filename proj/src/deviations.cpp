#include "fracmv/dev/deviations.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <gsl/gsl_blas.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/frac/rkhs.hpp"
#include "fracmv/mkv/solver.hpp"

namespace fracmv {

Control::Control(SteppedFunction h, double hurst) : h_(std::move(h)), hurst_(hurst), norm_sq_(0.0) {
    for (double v : h_.levels()) require(std::isfinite(v), "control: levels must be finite");
    norm_sq_ = std::max(0.0, h_inner(h_, h_, hurst_));
}

Control Control::zero(const TimeGrid& grid, std::size_t dim, double hurst) {
    return Control(SteppedFunction(grid, dim), hurst);
}

double cameron_martin_cost(const Control& control) { return 0.5 * control.norm_squared(); }

namespace {

enum class SkeletonKind { ldp, mdp };

std::vector<double> node_points(const TimeGrid& grid) {
    std::vector<double> pts(grid.n_nodes());
    for (std::size_t k = 0; k < pts.size(); ++k) pts[k] = grid.node(k);
    return pts;
}

// Rows: increments of the basis images R_H 1_{cell m} over each fine cell.
Eigen::MatrixXd fine_increment_matrix(const TimeGrid& grid, double hurst, const TimeGrid& fine) {
    const Eigen::MatrixXd m = rh_matrix(grid, hurst, node_points(fine));
    const Eigen::Index nf = static_cast<Eigen::Index>(fine.n_steps());
    return m.bottomRows(nf) - m.topRows(nf);
}

// dR stored row-major n_fine x d.
std::vector<double> control_increments(const Eigen::MatrixXd& p, const SteppedFunction& h) {
    const std::size_t d = h.dim();
    const auto nf = static_cast<std::size_t>(p.rows());
    std::vector<double> out(nf * d);
    for (std::size_t c = 0; c < d; ++c) {
        const auto col = h.coordinate(c);
        const Eigen::VectorXd dr = p * Eigen::Map<const Eigen::VectorXd>(col.data(), static_cast<Eigen::Index>(col.size()));
        for (std::size_t j = 0; j < nf; ++j) out[j * d + c] = dr[static_cast<Eigen::Index>(j)];
    }
    return out;
}

// Joint RK4 for (X0, Z) on the fine grid; the control derivative is constant
// on each fine cell. Returns the Z values at every fine node.
std::vector<double> integrate_skeleton(const ModelSpec& model, std::span<const double> x0, const TimeGrid& fine,
                                       const std::vector<double>& increments, SkeletonKind kind) {
    const std::size_t d = model.dim;
    const std::size_t nf = fine.n_steps();
    const double h = fine.dt();
    std::vector<double> state(2 * d);
    std::copy(x0.begin(), x0.end(), state.begin());
    if (kind == SkeletonKind::ldp)
        std::copy(x0.begin(), x0.end(), state.begin() + static_cast<std::ptrdiff_t>(d));
    std::vector<double> out((nf + 1) * d);
    std::copy(state.begin() + static_cast<std::ptrdiff_t>(d), state.end(), out.begin());

    std::vector<double> b(d), sigma(d * d), jac(d * d), v(d);
    auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds) {
        const std::span<const double> xs(s.data(), d), zs(s.data() + d, d);
        const auto law = MarginalData::dirac(xs);
        const Marginal mu = law.view();
        model.drift(xs, mu, b);
        for (std::size_t i = 0; i < d; ++i) ds[i] = b[i];
        if (kind == SkeletonKind::ldp) {
            model.drift(zs, mu, b);
            model.diffusion(zs, mu, sigma);
            for (std::size_t i = 0; i < d; ++i) {
                double acc = b[i];
                for (std::size_t j = 0; j < d; ++j) acc += sigma[i * d + j] * v[j];
                ds[d + i] = acc;
            }
        } else {
            model.drift_jacobian(xs, mu, jac);
            model.diffusion(xs, mu, sigma);
            for (std::size_t i = 0; i < d; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < d; ++j) acc += jac[i * d + j] * zs[j] + sigma[i * d + j] * v[j];
                ds[d + i] = acc;
            }
        }
        for (double x : ds)
            if (!std::isfinite(x) || std::abs(x) > kBlowUpThreshold) throw NumericError("blow-up: skeleton diverged");
    };

    std::vector<double> k1(2 * d), k2(2 * d), k3(2 * d), k4(2 * d), tmp(2 * d);
    for (std::size_t j = 0; j < nf; ++j) {
        for (std::size_t c = 0; c < d; ++c) v[c] = increments[j * d + c] / h;
        rhs(state, k1);
        for (std::size_t i = 0; i < 2 * d; ++i) tmp[i] = state[i] + 0.5 * h * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < 2 * d; ++i) tmp[i] = state[i] + 0.5 * h * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < 2 * d; ++i) tmp[i] = state[i] + h * k3[i];
        rhs(tmp, k4);
        for (std::size_t i = 0; i < 2 * d; ++i) state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (double x : state)
            if (!std::isfinite(x) || std::abs(x) > kBlowUpThreshold) throw NumericError("blow-up: skeleton diverged");
        std::copy(state.begin() + static_cast<std::ptrdiff_t>(d), state.end(),
                  out.begin() + static_cast<std::ptrdiff_t>((j + 1) * d));
    }
    return out;
}

SamplePath run_skeleton(const ModelSpec& model, std::span<const double> x0, const Control& control, SkeletonKind kind) {
    model.validate();
    const std::size_t d = model.dim;
    require(x0.size() == d, "skeleton: initial point dimension mismatch");
    require(control.h().dim() == d, "skeleton: control dimension mismatch");
    if (kind == SkeletonKind::mdp)
        require(static_cast<bool>(model.drift_jacobian), "skeleton_mdp: the model provides no drift Jacobian");
    const TimeGrid& grid = control.h().grid();
    const TimeGrid fine = grid.refined(kSkeletonRefinement);
    const auto p = fine_increment_matrix(grid, control.hurst(), fine);
    const auto z = integrate_skeleton(model, x0, fine, control_increments(p, control.h()), kind);
    SamplePath out(grid, d);
    for (std::size_t k = 0; k < grid.n_nodes(); ++k)
        for (std::size_t c = 0; c < d; ++c) out(k, c) = z[k * kSkeletonRefinement * d + c];
    return out;
}

}  // namespace

SamplePath skeleton_ldp(const ModelSpec& model, std::span<const double> x0, const Control& control) {
    return run_skeleton(model, x0, control, SkeletonKind::ldp);
}

SamplePath skeleton_mdp(const ModelSpec& model, std::span<const double> x0, const Control& control) {
    return run_skeleton(model, x0, control, SkeletonKind::mdp);
}

namespace {

struct PenaltyProblem {
    const ModelSpec* model;
    std::span<const double> x0;
    std::span<const double> target;
    TimeGrid fine;
    Eigen::MatrixXd q;  // whitened fine increment matrix, n_fine x n
    std::size_t n = 0;  // control cells
    std::size_t d = 0;
    double penalty = 1.0;

    std::vector<double> residual(const double* w) const {
        const auto nf = static_cast<std::size_t>(q.rows());
        std::vector<double> inc(nf * d);
        for (std::size_t c = 0; c < d; ++c) {
            const Eigen::VectorXd dr = q * Eigen::Map<const Eigen::VectorXd>(w + c * n, static_cast<Eigen::Index>(n));
            for (std::size_t j = 0; j < nf; ++j) inc[j * d + c] = dr[static_cast<Eigen::Index>(j)];
        }
        const auto z = integrate_skeleton(*model, x0, fine, inc, SkeletonKind::ldp);
        std::vector<double> r(d);
        for (std::size_t c = 0; c < d; ++c) r[c] = z[nf * d + c] - target[c];
        return r;
    }

    // Central-difference Jacobian, d x (n d) row-major.
    std::vector<double> jacobian(const double* w) const {
        const std::size_t m = n * d;
        std::vector<double> jac(d * m);
        parallel_for(m, [&](std::size_t i) {
            std::vector<double> local(w, w + m);
            const double step = 1e-6 * std::max(1.0, std::abs(local[i]));
            local[i] = w[i] + step;
            const auto rp = residual(local.data());
            local[i] = w[i] - step;
            const auto rm = residual(local.data());
            for (std::size_t c = 0; c < d; ++c) jac[c * m + i] = (rp[c] - rm[c]) / (2.0 * step);
        });
        return jac;
    }

    double objective(const double* w) const {
        double s = 0.0;
        for (std::size_t i = 0; i < n * d; ++i) s += w[i] * w[i];
        double r2 = 0.0;
        for (double r : residual(w)) r2 += r * r;
        return 0.5 * s + 0.5 * penalty * r2;
    }

    void gradient(const double* w, double* g) const {
        const std::size_t m = n * d;
        const auto r = residual(w);
        const auto jac = jacobian(w);
        for (std::size_t i = 0; i < m; ++i) {
            double acc = w[i];
            for (std::size_t c = 0; c < d; ++c) acc += penalty * jac[c * m + i] * r[c];
            g[i] = acc;
        }
    }
};

double gsl_f(const gsl_vector* x, void* params) {
    return static_cast<const PenaltyProblem*>(params)->objective(x->data);
}

void gsl_df(const gsl_vector* x, void* params, gsl_vector* g) {
    static_cast<const PenaltyProblem*>(params)->gradient(x->data, g->data);
}

void gsl_fdf(const gsl_vector* x, void* params, double* f, gsl_vector* g) {
    *f = gsl_f(x, params);
    gsl_df(x, params, g);
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

RateResult rate_endpoint(const ModelSpec& model, std::span<const double> x0, std::span<const double> target,
                         const TimeGrid& grid, double hurst, const RateOptions& options) {
    model.validate();
    const std::size_t d = model.dim, n = grid.n_steps();
    require(x0.size() == d && target.size() == d, "rate_endpoint: point dimension mismatch");
    require(options.initial_penalty > 0.0 && options.penalty_factor > 1.0 && options.stages >= 1,
            "rate_endpoint: invalid penalty schedule");
    require(options.inner_tol > 0.0 && options.residual_tol > 0.0, "rate_endpoint: tolerances must be positive");

    PenaltyProblem prob{&model, x0, target, grid.refined(kSkeletonRefinement), {}, n, d, options.initial_penalty};
    // Whitening: h = L^{-T} w turns the Cameron-Martin cost into |w|^2 / 2.
    const auto chol = cholesky_with_jitter(h_gram(grid, hurst));
    const Eigen::MatrixXd p = fine_increment_matrix(grid, hurst, prob.fine);
    prob.q = chol.lower.triangularView<Eigen::Lower>().solve(p.transpose()).transpose();

    const std::size_t m = n * d;
    gsl_set_error_handler_off();
    gsl_vector* w = gsl_vector_calloc(m);
    gsl_multimin_fdfminimizer* solver = gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, m);
    gsl_multimin_function_fdf fdf{&gsl_f, &gsl_df, &gsl_fdf, m, &prob};

    std::vector<double> stage_residuals;
    std::size_t total_iter = 0;
    for (std::size_t stage = 0; stage < options.stages; ++stage) {
        gsl_multimin_fdfminimizer_set(solver, &fdf, w, 0.1, 0.1);
        for (std::size_t it = 0; it < options.max_inner_iter; ++it) {
            const double wn = gsl_blas_dnrm2(solver->x);
            if (gsl_multimin_test_gradient(solver->gradient, options.inner_tol * std::max(1.0, wn)) == GSL_SUCCESS) break;
            ++total_iter;
            if (gsl_multimin_fdfminimizer_iterate(solver) != GSL_SUCCESS) break;
        }
        gsl_vector_memcpy(w, solver->x);
        stage_residuals.push_back(norm2(prob.residual(w->data)));
        prob.penalty *= options.penalty_factor;
    }
    const double residual = norm2(prob.residual(w->data));
    const auto jac = prob.jacobian(w->data);
    std::vector<double> wv(w->data, w->data + m);
    gsl_multimin_fdfminimizer_free(solver);
    gsl_vector_free(w);

    SteppedFunction h(grid, d);
    for (std::size_t c = 0; c < d; ++c) {
        const Eigen::VectorXd wc = Eigen::Map<const Eigen::VectorXd>(wv.data() + c * n, static_cast<Eigen::Index>(n));
        const Eigen::VectorXd hc = chol.lower.transpose().triangularView<Eigen::Upper>().solve(wc);
        for (std::size_t k = 0; k < n; ++k) h(k, c) = hc[static_cast<Eigen::Index>(k)];
    }
    Control control(std::move(h), hurst);
    const double value = cameron_martin_cost(control);
    const bool converged = residual <= options.residual_tol;
    return RateResult{value, std::move(control), residual, converged, !converged && norm2(jac) < 1e-10, total_iter,
                      std::move(stage_residuals)};
}

std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double z) {
    require(n > 0 && k <= n, "wilson_interval: need 0 <= k <= n and n > 0");
    require(z > 0.0, "wilson_interval: z must be positive");
    const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

namespace {

// sup_k |X_i(t_k) - X0(t_k)| for every trajectory.
std::vector<double> sup_deviation(const EmpiricalMeasurePath& law, const SamplePath& x_ref) {
    std::vector<double> out(law.size(), 0.0);
    for (std::size_t i = 0; i < law.size(); ++i)
        for (std::size_t k = 0; k < x_ref.n_nodes(); ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < law.dim(); ++c) {
                const double diff = law[i](k, c) - x_ref(k, c);
                s += diff * diff;
            }
            out[i] = std::max(out[i], std::sqrt(s));
        }
    return out;
}

EmpiricalMeasurePath small_noise_law(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                                     double eps, std::size_t n_samples, const FbmSamplerConfig& sampler,
                                     std::size_t max_iter, double tol, std::vector<std::string>& warnings) {
    FixpointOptions opt;
    opt.n_particles = n_samples;
    opt.max_iter = max_iter;
    opt.tol = tol;
    opt.sampler = sampler;
    opt.noise_scale = std::pow(eps, sampler.hurst);
    auto res = law_fixpoint(model, InitialLaw{std::vector<double>(x0.begin(), x0.end()), 0.0}, grid, opt);
    for (auto& w : res.report.warnings) warnings.push_back("eps=" + std::to_string(eps) + ": " + w);
    return std::move(res.law);
}

}  // namespace

DeviationEstimate mc_deviation_probability(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                                           const DeviationOptions& options) {
    model.validate();
    require(x0.size() == model.dim, "mc_deviation_probability: initial point dimension mismatch");
    require(!options.eps_list.empty(), "mc_deviation_probability: empty eps list");
    require(!options.deltas.empty(), "mc_deviation_probability: empty delta list");
    require(options.n_samples >= 1, "mc_deviation_probability: need at least one sample");
    for (double e : options.eps_list) require(e > 0.0 && e <= 1.0, "mc_deviation_probability: eps must lie in (0, 1]");
    for (double dl : options.deltas) require(dl > 0.0, "mc_deviation_probability: delta must be positive");
    const double hurst = options.sampler.hurst;

    DeviationEstimate est;
    est.mode = options.mode;
    est.hurst = hurst;
    if (options.mode == DeviationMode::mdp) {
        const double ze = options.zeta_exponent.value_or(-0.5 * hurst);
        require(ze < 0.0, "mc_deviation_probability: zeta(eps) must diverge as eps -> 0 (negative exponent)");
        require(hurst + ze > 0.0, "mc_deviation_probability: eps^H zeta(eps) must vanish as eps -> 0");
        for (double e : options.eps_list)
            require(e < 1.0, "mc_deviation_probability: mdp mode needs eps < 1 so that zeta(eps) > 1");
        est.zeta_exponent = ze;
    }
    // The zero-noise fixed point: the Euler scheme of the deterministic limit.
    const SamplePath x_ref = deterministic_limit(model, x0, grid, OdeScheme::euler);

    for (double eps : options.eps_list) {
        const auto law = small_noise_law(model, x0, grid, eps, options.n_samples, options.sampler, options.max_iter,
                                         options.tol, est.warnings);
        auto dev = sup_deviation(law, x_ref);
        double zeta = 1.0;
        if (options.mode == DeviationMode::mdp) {
            zeta = std::pow(eps, *est.zeta_exponent);
            const double scale = std::pow(eps, hurst) * zeta;
            for (double& v : dev) v /= scale;
        }
        for (double delta : options.deltas) {
            DeviationPoint pt;
            pt.eps = eps;
            pt.delta = delta;
            pt.zeta = zeta;
            pt.n = dev.size();
            pt.count = static_cast<std::size_t>(std::count_if(dev.begin(), dev.end(), [&](double v) { return v >= delta; }));
            pt.p_hat = static_cast<double>(pt.count) / static_cast<double>(pt.n);
            std::tie(pt.lower, pt.upper) = wilson_interval(pt.count, pt.n, options.z_score);
            pt.degenerate = pt.count == 0 || pt.count == pt.n;
            if (pt.count > 0) {
                const double speed = options.mode == DeviationMode::ldp ? std::pow(eps, 2.0 * hurst) : 1.0 / (zeta * zeta);
                pt.transformed = -speed * std::log(pt.p_hat);
            }
            if (pt.degenerate)
                est.warnings.push_back("eps=" + std::to_string(eps) + ", delta=" + std::to_string(delta) +
                                       ": all-zero or all-one count, estimate degenerate at this sample size");
            est.points.push_back(pt);
        }
    }
    return est;
}

ConvergenceRate convergence_rate_check(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                                       const std::vector<double>& eps_list, std::size_t n_samples,
                                       const FbmSamplerConfig& sampler) {
    require(eps_list.size() >= 2, "convergence_rate_check: regression needs at least two eps values");
    for (double e : eps_list) require(e > 0.0 && e <= 1.0, "convergence_rate_check: eps must lie in (0, 1]");
    const auto [lo, hi] = std::minmax_element(eps_list.begin(), eps_list.end());
    require(*hi / *lo >= 10.0 * (1.0 - 1e-12), "convergence_rate_check: eps list must span at least one decade");
    require(n_samples >= 2, "convergence_rate_check: need at least two samples");
    model.validate();
    const SamplePath x_ref = deterministic_limit(model, x0, grid, OdeScheme::euler);
    ConvergenceRate out;
    out.eps_list = eps_list;
    std::vector<std::string> warnings;
    for (double eps : eps_list) {
        const auto law = small_noise_law(model, x0, grid, eps, n_samples, sampler, 50, 1e-3, warnings);
        auto dev = sup_deviation(law, x_ref);
        for (double& v : dev) v *= v;
        out.mean_sq.push_back(pairwise_sum(dev) / static_cast<double>(dev.size()));
    }
    const std::size_t m = eps_list.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        require(out.mean_sq[i] > 0.0, "convergence_rate_check: zero mean-square deviation, regression degenerate");
        lx[i] = std::log(eps_list[i]);
        ly[i] = std::log(out.mean_sq[i]);
        mx += lx[i] / static_cast<double>(m);
        my += ly[i] / static_cast<double>(m);
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    return out;
}

}  // namespace fracmv
