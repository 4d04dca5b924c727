#include "fracmv/mkv/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fracmv/core/error.hpp"
#include "fracmv/core/numeric.hpp"
#include "fracmv/core/parallel.hpp"
#include "fracmv/core/rng.hpp"

namespace fracmv {

namespace {

void guard_state(std::span<const double> x) {
    for (double v : x)
        if (!std::isfinite(v) || std::abs(v) > kBlowUpThreshold)
            throw NumericError("blow-up: state left the region |x| <= 1e12");
}

void dirac_drift(const ModelSpec& model, std::span<const double> x, std::span<double> out) {
    const auto law = MarginalData::dirac(x);
    model.drift(x, law.view(), out);
    for (double v : out)
        if (!std::isfinite(v)) throw NumericError("deterministic_limit: non-finite drift");
}

std::vector<SamplePath> solve_all(const ModelSpec& model, const std::vector<MarginalData>& law,
                                  const std::vector<SamplePath>& noises, const std::vector<std::vector<double>>& starts,
                                  double noise_scale) {
    std::vector<SamplePath> out(noises.size(), SamplePath(noises.front().grid(), model.dim));
    parallel_for(noises.size(), [&](std::size_t i) { out[i] = solve_frozen(model, law, noises[i], starts[i], noise_scale); });
    return out;
}

SamplePath slice(const SamplePath& path, std::size_t first, std::size_t last) {
    const std::size_t d = path.dim();
    std::vector<double> v(path.values().begin() + static_cast<std::ptrdiff_t>(first * d),
                          path.values().begin() + static_cast<std::ptrdiff_t>((last + 1) * d));
    return SamplePath(path.grid().window(first, last), d, std::move(v));
}

}  // namespace

SamplePath deterministic_limit(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                               OdeScheme scheme) {
    model.validate();
    const std::size_t d = model.dim;
    require(x0.size() == d, "deterministic_limit: initial point dimension mismatch");
    SamplePath out(grid, d);
    std::copy(x0.begin(), x0.end(), out.at(0).begin());
    const double h = grid.dt();
    std::vector<double> x(x0.begin(), x0.end()), tmp(d), k1(d), k2(d), k3(d), k4(d);
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        dirac_drift(model, x, k1);
        if (scheme == OdeScheme::euler) {
            for (std::size_t c = 0; c < d; ++c) x[c] += h * k1[c];
        } else {
            for (std::size_t c = 0; c < d; ++c) tmp[c] = x[c] + 0.5 * h * k1[c];
            dirac_drift(model, tmp, k2);
            for (std::size_t c = 0; c < d; ++c) tmp[c] = x[c] + 0.5 * h * k2[c];
            dirac_drift(model, tmp, k3);
            for (std::size_t c = 0; c < d; ++c) tmp[c] = x[c] + h * k3[c];
            dirac_drift(model, tmp, k4);
            for (std::size_t c = 0; c < d; ++c) x[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        guard_state(x);
        std::copy(x.begin(), x.end(), out.at(k + 1).begin());
    }
    return out;
}

std::vector<MarginalData> marginals_of(const EmpiricalMeasurePath& law) {
    std::vector<MarginalData> out;
    out.reserve(law.grid().n_nodes());
    for (std::size_t k = 0; k < law.grid().n_nodes(); ++k) out.emplace_back(law.marginal(k), law.dim());
    return out;
}

SamplePath solve_frozen(const ModelSpec& model, const EmpiricalMeasurePath& law, const SamplePath& noise,
                        std::span<const double> x0, double noise_scale) {
    require(law.grid() == noise.grid(), "solve_frozen: law and noise must share the grid");
    return solve_frozen(model, marginals_of(law), noise, x0, noise_scale);
}

SamplePath solve_frozen(const ModelSpec& model, const std::vector<MarginalData>& law, const SamplePath& noise,
                        std::span<const double> x0, double noise_scale) {
    const std::size_t d = model.dim;
    require(noise.dim() == d, "solve_frozen: noise dimension mismatch");
    require(x0.size() == d, "solve_frozen: initial point dimension mismatch");
    require(law.size() == noise.n_nodes(), "solve_frozen: law must have one marginal per grid node");
    const TimeGrid& grid = noise.grid();
    const double h = grid.dt();
    SamplePath out(grid, d);
    std::vector<double> x(x0.begin(), x0.end()), b(d), sigma(d * d);
    guard_state(x);
    std::copy(x.begin(), x.end(), out.at(0).begin());
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const Marginal mu = law[k].view();
        model.drift(x, mu, b);
        model.diffusion(x, mu, sigma);
        for (std::size_t i = 0; i < d; ++i) {
            double s = b[i] * h;
            for (std::size_t j = 0; j < d; ++j) s += noise_scale * sigma[i * d + j] * (noise(k + 1, j) - noise(k, j));
            x[i] += s;
        }
        guard_state(x);
        std::copy(x.begin(), x.end(), out.at(k + 1).begin());
    }
    return out;
}

std::vector<std::vector<double>> InitialLaw::sample(std::uint64_t seed, std::string_view label, std::size_t n) const {
    require(!mean.empty(), "initial law: mean must be nonempty");
    require(std::isfinite(spread) && spread >= 0.0, "initial law: spread must be finite and nonnegative");
    std::vector<std::vector<double>> out(n, mean);
    if (spread == 0.0) return out;
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(seed, label, i);
        for (double& v : out[i]) v += spread * rng.normal();
    }
    return out;
}

EmpiricalMeasurePath particle_system(const ModelSpec& model, std::size_t n_particles, const TimeGrid& grid,
                                     const FbmSamplerConfig& sampler, const InitialLaw& x0, double noise_scale) {
    model.validate();
    require(n_particles >= 1, "particle_system: need at least one particle");
    require(x0.mean.size() == model.dim, "particle_system: initial point dimension mismatch");
    const std::size_t d = model.dim;
    const auto noise = sample_fbm(grid, d, n_particles, sampler, "particles.noise");
    const auto starts = x0.sample(sampler.seed, "particles.x0", n_particles);
    std::vector<SamplePath> paths(n_particles, SamplePath(grid, d));
    std::vector<double> state(n_particles * d);
    for (std::size_t i = 0; i < n_particles; ++i) {
        guard_state(starts[i]);
        std::copy(starts[i].begin(), starts[i].end(), state.begin() + static_cast<std::ptrdiff_t>(i * d));
        std::copy(starts[i].begin(), starts[i].end(), paths[i].at(0).begin());
    }
    const double h = grid.dt();
    std::vector<double> next(state.size());
    for (std::size_t k = 0; k < grid.n_steps(); ++k) {
        const MarginalData law(state, d);
        const Marginal mu = law.view();
        parallel_for(n_particles, [&](std::size_t i) {
            std::vector<double> b(d), sigma(d * d);
            const std::span<const double> x(state.data() + i * d, d);
            model.drift(x, mu, b);
            model.diffusion(x, mu, sigma);
            for (std::size_t r = 0; r < d; ++r) {
                double s = x[r] + b[r] * h;
                for (std::size_t c = 0; c < d; ++c)
                    s += noise_scale * sigma[r * d + c] * (noise.paths[i](k + 1, c) - noise.paths[i](k, c));
                next[i * d + r] = s;
            }
            guard_state(std::span<const double>(next.data() + i * d, d));
        });
        state.swap(next);
        for (std::size_t i = 0; i < n_particles; ++i)
            std::copy(state.begin() + static_cast<std::ptrdiff_t>(i * d),
                      state.begin() + static_cast<std::ptrdiff_t>((i + 1) * d), paths[i].at(k + 1).begin());
    }
    return EmpiricalMeasurePath(grid, d, std::move(paths));
}

double synchronous_distance_bound(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, double beta,
                                  std::size_t thin_above) {
    require(mu.grid() == nu.grid() && mu.dim() == nu.dim() && mu.size() == nu.size(),
            "synchronous_distance_bound: incompatible measure paths");
    require(beta > 0.0 && beta < 1.0, "synchronous_distance_bound: beta must lie in (0, 1)");
    const std::size_t n = mu.size(), nodes = mu.grid().n_nodes(), d = mu.dim();
    // err[k * n + i] = |x_i(t_k) - y_i(t_k)|^2
    std::vector<double> err(nodes * n);
    std::vector<double> sup_sq(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < nodes; ++k) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) {
                const double diff = mu[i](k, c) - nu[i](k, c);
                s += diff * diff;
            }
            err[k * n + i] = s;
            sup_sq[i] = std::max(sup_sq[i], s);
        }
    const double sup_part = std::sqrt(pairwise_sum(sup_sq) / static_cast<double>(n));
    // Any coupling on the optimal face of the max cost has increment cost at
    // most 4 times its max cost, which the synchronous coupling bounds.
    double ratio = 0.0;
    std::vector<double> pair_terms(n);
    const double dt = mu.grid().dt();
    for (const auto& [s1, s2] : metric_pairs(mu.grid().n_steps(), thin_above)) {
        for (std::size_t i = 0; i < n; ++i) pair_terms[i] = std::max(err[s1 * n + i], err[s2 * n + i]);
        const double m = pairwise_sum(pair_terms) / static_cast<double>(n);
        ratio = std::max(ratio, 2.0 * std::sqrt(m) / std::pow(static_cast<double>(s2 - s1) * dt, beta));
    }
    return sup_part + ratio;
}

FixpointResult law_fixpoint(const ModelSpec& model, const InitialLaw& x0, const TimeGrid& grid,
                            const FixpointOptions& options) {
    const auto wall_start = std::chrono::steady_clock::now();
    model.validate();
    require(options.n_particles >= 1, "law_fixpoint: need at least one particle");
    require(options.max_iter >= 1, "law_fixpoint: max_iter must be at least 1");
    require(options.tol > 0.0, "law_fixpoint: tol must be positive");
    require(std::isfinite(options.noise_scale) && options.noise_scale >= 0.0,
            "law_fixpoint: noise scale must be finite and nonnegative");
    require(x0.mean.size() == model.dim, "law_fixpoint: initial point dimension mismatch");

    FixpointReport report;
    if (options.exponents) {
        validate_exponents(*options.exponents);
        require(options.exponents->hurst == options.sampler.hurst, "law_fixpoint: exponents were chosen for another H");
        report.exponents = *options.exponents;
    } else {
        report.exponents = choose_exponents(options.sampler.hurst);
    }
    const ExponentSet& exps = report.exponents;
    const std::size_t n_part = options.n_particles, d = model.dim, n = grid.n_steps();
    const bool exact = n_part <= options.exact_metric_limit;
    report.metric = exact ? "exact" : "synchronous-bound";

    auto sample = sample_fbm(grid, d, n_part, options.sampler, "fixpoint.noise");
    report.warnings = std::move(sample.warnings);
    const auto starts0 = x0.sample(options.sampler.seed, "fixpoint.x0", n_part);
    std::vector<SamplePath> result(n_part, SamplePath(grid, d));
    for (std::size_t i = 0; i < n_part; ++i) std::copy(starts0[i].begin(), starts0[i].end(), result[i].at(0).begin());

    auto distance = [&](const std::vector<SamplePath>& a, const std::vector<SamplePath>& b) {
        const TimeGrid& g = a.front().grid();
        const EmpiricalMeasurePath ma(g, d, a), mb(g, d, b);
        if (exact) {
            MetricOptions mo;
            mo.thin_above = options.thin_above;
            return holder_wasserstein(ma, mb, exps.beta, mo).combined;
        }
        return synchronous_distance_bound(ma, mb, exps.beta, options.thin_above);
    };

    bool all_converged = true;
    std::size_t first = 0;
    while (first < n) {
        std::vector<std::vector<double>> starts(n_part);
        for (std::size_t i = 0; i < n_part; ++i) {
            const auto s = result[i].at(first);
            starts[i].assign(s.begin(), s.end());
        }
        std::vector<double> start_atoms;
        for (const auto& s : starts) start_atoms.insert(start_atoms.end(), s.begin(), s.end());
        const MarginalData start_law(start_atoms, d);

        auto frozen_initial = [&](std::size_t last, const std::vector<SamplePath>& noise_w) {
            const std::vector<MarginalData> constant(last - first + 1, start_law);
            return solve_all(model, constant, noise_w, starts, options.noise_scale);
        };
        auto noise_window = [&](std::size_t last) {
            std::vector<SamplePath> w;
            w.reserve(n_part);
            for (const auto& p : sample.paths) w.push_back(slice(p, first, last));
            return w;
        };

        std::size_t len = n - first;
        std::optional<double> delta;
        if (options.window_policy == WindowPolicy::delta) {
            const auto noise_w = noise_window(n);
            const auto mu0 = frozen_initial(n, noise_w);
            double bh = 0.0, xh = 0.0;
            for (std::size_t i = 0; i < n_part; ++i) {
                bh = std::max(bh, options.noise_scale * holder_seminorm(noise_w[i], 0, n - first, exps.beta1));
                xh = std::max(xh, holder_seminorm(mu0[i], 0, n - first, exps.beta));
            }
            const double norm = measure_holder_norm(EmpiricalMeasurePath(noise_w.front().grid(), d, mu0), exps.beta,
                                                    options.thin_above);
            const auto lambdas = lambda_constants(model.constants, exps, LambdaInputs{xh, xh, norm, norm});
            delta = contraction_step(lambdas, model.constants.k_b, bh, exps, grid.node(n - first));
            const auto steps = static_cast<std::size_t>(std::floor(*delta / grid.dt()));
            len = std::clamp<std::size_t>(steps, 1, n - first);
        }

        WindowRecord rec;
        rec.delta = delta;
        std::vector<SamplePath> current;
        for (;;) {
            const std::size_t last = first + len;
            const auto noise_w = noise_window(last);
            current = frozen_initial(last, noise_w);
            rec.first = first;
            rec.last = last;
            rec.iterations = 0;
            rec.distances.clear();
            rec.ratios.clear();
            rec.converged = false;
            bool restart = false;
            const TimeGrid wgrid = grid.window(first, last);
            for (std::size_t it = 0; it < options.max_iter; ++it) {
                const auto law = marginals_of(EmpiricalMeasurePath(wgrid, d, current));
                auto next = solve_all(model, law, noise_w, starts, options.noise_scale);
                const double dist = distance(next, current);
                ++rec.iterations;
                if (!rec.distances.empty() && rec.distances.back() > 0.0) {
                    const double ratio = dist / rec.distances.back();
                    rec.ratios.push_back(ratio);
                    if (ratio >= 1.0 && options.window_policy == WindowPolicy::halving && len > 1 &&
                        rec.rejected_attempts < options.max_halvings) {
                        restart = true;
                    }
                }
                rec.distances.push_back(dist);
                current = std::move(next);
                if (restart) break;
                if (dist < options.tol) {
                    rec.converged = true;
                    break;
                }
            }
            if (!restart) break;
            ++rec.rejected_attempts;
            len = std::max<std::size_t>(1, len / 2);
        }
        if (!rec.converged) {
            all_converged = false;
            report.warnings.push_back("law_fixpoint: window [" + std::to_string(rec.first) + ", " +
                                      std::to_string(rec.last) + "] did not converge within max_iter");
        }
        for (double r : rec.ratios)
            if (r >= 1.0) {
                report.warnings.push_back("law_fixpoint: a contraction ratio >= 1 was accepted on window [" +
                                          std::to_string(rec.first) + ", " + std::to_string(rec.last) + "]");
                break;
            }
        for (std::size_t i = 0; i < n_part; ++i)
            for (std::size_t k = 0; k <= rec.last - rec.first; ++k)
                std::copy(current[i].at(k).begin(), current[i].at(k).end(), result[i].at(first + k).begin());
        report.iterations += rec.iterations;
        report.distances.insert(report.distances.end(), rec.distances.begin(), rec.distances.end());
        report.ratios.insert(report.ratios.end(), rec.ratios.begin(), rec.ratios.end());
        report.window_lengths.push_back(grid.node(rec.last) - grid.node(rec.first));
        report.final_residual = std::max(report.final_residual, rec.distances.back());
        first = rec.last;
        report.windows.push_back(std::move(rec));
    }
    report.converged = all_converged;
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return FixpointResult{EmpiricalMeasurePath(grid, d, std::move(result)), std::move(report)};
}

}  // namespace fracmv
