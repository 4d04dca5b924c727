#pragma once

#include <cstddef>
#include <vector>

#include "fracmv/core/grid.hpp"
#include "fracmv/ot/assignment.hpp"

namespace fracmv {

/// N equally weighted trajectories on a shared grid.
class EmpiricalMeasurePath {
public:
    EmpiricalMeasurePath(TimeGrid grid, std::size_t dim, std::vector<SamplePath> trajectories);

    /// The Dirac law at the zero path, written with n_atoms equal atoms.
    static EmpiricalMeasurePath dirac_zero(TimeGrid grid, std::size_t dim, std::size_t n_atoms);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t size() const { return paths_.size(); }
    const SamplePath& operator[](std::size_t i) const { return paths_[i]; }
    const std::vector<SamplePath>& trajectories() const { return paths_; }

    /// Atoms of the time-k marginal, row-major size() x dim().
    std::vector<double> marginal(std::size_t node) const;
    std::vector<double> marginal_mean(std::size_t node) const;

    /// Restriction to nodes [first, last], re-based to time zero.
    EmpiricalMeasurePath window(std::size_t first, std::size_t last) const;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<SamplePath> paths_;
};

using Atoms = std::vector<std::vector<double>>;

/// W2 between two equal-weight point clouds of equal size.
double wasserstein2(const Atoms& mu_atoms, const Atoms& nu_atoms);

/// Optimal coupling of trajectories for the squared grid sup-norm cost.
double path_wasserstein_sup(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu);

/// Optimal coupling of the two-time marginals (s1, s2) under the max cost
/// |x - y|_M = |x1 - y1| v |x2 - y2|. The assignment keeps its dual
/// potentials, which describe the whole optimal face.
struct PairCoupling {
    double value = 0.0;          // W2 under |.|_M
    Eigen::MatrixXd cost;        // squared max cost, N x N
    Assignment assignment;
};

PairCoupling pair_marginal_w2(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, std::size_t s1,
                              std::size_t s2);

enum class OtBackend { assignment, simplex };

struct WcResult {
    double value = 0.0;
    double stage1 = 0.0;       // mean squared max cost at the optimum
    std::size_t face_edges = 0;       // edges admitted to the second stage
    std::size_t ambiguous_edges = 0;  // rejected edges within 1e3 x the face threshold
    bool degenerate = false;          // set when ambiguous edges exist
};

/// Increment cost minimized over couplings that are (lex_tol-)optimal for the
/// squared max cost.
WcResult wc_increment_detail(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, std::size_t s1,
                             std::size_t s2, double lex_tol = 1e-9, OtBackend backend = OtBackend::assignment);

double wc_increment(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, std::size_t s1, std::size_t s2,
                    double lex_tol = 1e-9, OtBackend backend = OtBackend::assignment);

struct PairEntry {
    std::size_t s1 = 0;
    std::size_t s2 = 0;
    double w2 = 0.0;
    double wc = 0.0;
};

struct MetricReport {
    double w2_sup = 0.0;
    double wc_sup_ratio = 0.0;
    double combined = 0.0;
    std::vector<PairEntry> pairs;
};

struct MetricOptions {
    double lex_tol = 1e-9;
    OtBackend backend = OtBackend::assignment;
    /// Restrict to pairs whose span is a power of two once n exceeds this.
    std::size_t thin_above = 256;
};

/// Grid pairs (s1 < s2) over which the increment supremum is taken.
std::vector<std::pair<std::size_t, std::size_t>> metric_pairs(std::size_t n_steps, std::size_t thin_above);

MetricReport holder_wasserstein(const EmpiricalMeasurePath& mu, const EmpiricalMeasurePath& nu, double beta,
                                const MetricOptions& options = {});

/// Norm of mu in the same metric, i.e. its distance to the zero-path Dirac law.
double measure_holder_norm(const EmpiricalMeasurePath& mu, double beta, std::size_t thin_above = 256);

double mean_sq_increment(const EmpiricalMeasurePath& mu, std::size_t s1, std::size_t s2);

}  // namespace fracmv
