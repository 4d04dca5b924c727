#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracmv/core/grid.hpp"
#include "fracmv/fbm/fbm.hpp"
#include "fracmv/measure/measure_path.hpp"
#include "fracmv/mkv/diagnostics.hpp"
#include "fracmv/mkv/model.hpp"

namespace fracmv {

/// Threshold on |X| beyond which a trajectory is declared exploded.
inline constexpr double kBlowUpThreshold = 1e12;

enum class OdeScheme { rk4, euler };

/// Solves X' = b(X, delta_X) on the grid; the measure argument is the Dirac law
/// at the current (stage) state.
SamplePath deterministic_limit(const ModelSpec& model, std::span<const double> x0, const TimeGrid& grid,
                               OdeScheme scheme = OdeScheme::rk4);

/// Per-node marginals of a law, computed once and shared by all frozen solves.
std::vector<MarginalData> marginals_of(const EmpiricalMeasurePath& law);

/// Euler scheme for the equation with the law frozen to `law`:
/// X_{k+1} = X_k + b(X_k, law_k) dt + noise_scale * sigma(X_k, law_k) (B_{k+1} - B_k).
SamplePath solve_frozen(const ModelSpec& model, const EmpiricalMeasurePath& law, const SamplePath& noise,
                        std::span<const double> x0, double noise_scale = 1.0);

/// Same, with precomputed marginals (one per grid node of `noise`).
SamplePath solve_frozen(const ModelSpec& model, const std::vector<MarginalData>& law, const SamplePath& noise,
                        std::span<const double> x0, double noise_scale = 1.0);

/// Initial condition x0 = mean + spread * N(0, I); spread 0 gives a fixed point.
struct InitialLaw {
    std::vector<double> mean;
    double spread = 0.0;

    /// n draws; draw i uses the stream (seed, label, i).
    std::vector<std::vector<double>> sample(std::uint64_t seed, std::string_view label, std::size_t n) const;
};

/// Interacting particles driven by i.i.d. fBm noises; at each Euler step the
/// measure argument is the empirical law of the current particle states.
EmpiricalMeasurePath particle_system(const ModelSpec& model, std::size_t n_particles, const TimeGrid& grid,
                                     const FbmSamplerConfig& sampler, const InitialLaw& x0,
                                     double noise_scale = 1.0);

enum class WindowPolicy { halving, delta };

struct FixpointOptions {
    std::size_t n_particles = 512;
    std::size_t max_iter = 50;
    double tol = 1e-3;
    WindowPolicy window_policy = WindowPolicy::halving;
    FbmSamplerConfig sampler;
    double noise_scale = 1.0;
    std::optional<ExponentSet> exponents;  // chosen from the Hurst parameter when absent
    /// Exact optimal-transport distances up to this many particles; above it
    /// the synchronous-coupling upper bound is used.
    std::size_t exact_metric_limit = 64;
    std::size_t thin_above = 64;
    std::size_t max_halvings = 10;
};

struct WindowRecord {
    std::size_t first = 0;
    std::size_t last = 0;
    std::size_t iterations = 0;
    std::size_t rejected_attempts = 0;
    std::vector<double> distances;
    std::vector<double> ratios;
    bool converged = false;
    std::optional<double> delta;  // theoretical step, delta policy only
};

struct FixpointReport {
    std::size_t iterations = 0;
    std::vector<double> distances;
    std::vector<double> ratios;
    std::vector<double> window_lengths;
    std::vector<WindowRecord> windows;
    double final_residual = 0.0;
    double wall_time_seconds = 0.0;
    bool converged = false;
    std::string metric;  // "exact" or "synchronous-bound"
    ExponentSet exponents;
    std::vector<std::string> warnings;
};

struct FixpointResult {
    EmpiricalMeasurePath law;
    FixpointReport report;
};

/// Law-freeze iteration on successive time windows with fixed noises and
/// initial points.
FixpointResult law_fixpoint(const ModelSpec& model, const InitialLaw& x0, const TimeGrid& grid,
                            const FixpointOptions& options);

/// Upper bound on the Hoelder-Wasserstein distance obtained from the coupling
/// that pairs trajectory i of mu with trajectory i of nu.
double synchronous_distance_bound(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, double beta,
                                  std::size_t thin_above);

}  // namespace fracmv
