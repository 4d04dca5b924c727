#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fracmv {

/// Uniform grid t_k = k * t_end / n_steps, k = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_end, std::size_t n_steps);

    double t_end() const { return t_end_; }
    std::size_t n_steps() const { return n_steps_; }
    std::size_t n_nodes() const { return n_steps_ + 1; }
    double dt() const { return t_end_ / static_cast<double>(n_steps_); }
    double node(std::size_t k) const { return static_cast<double>(k) * dt(); }

    /// Grid over nodes [first, last] re-based to start at zero.
    TimeGrid window(std::size_t first, std::size_t last) const;
    /// Grid with `factor` times as many steps over the same horizon.
    TimeGrid refined(std::size_t factor) const;

    bool operator==(const TimeGrid& other) const;
    bool operator!=(const TimeGrid& other) const { return !(*this == other); }

private:
    double t_end_;
    std::size_t n_steps_;
};

/// One d-dimensional trajectory sampled at every grid node; values are
/// stored row-major as (n+1) x d.
class SamplePath {
public:
    SamplePath(TimeGrid grid, std::size_t dim);
    SamplePath(TimeGrid grid, std::size_t dim, std::vector<double> values);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t n_nodes() const { return grid_.n_nodes(); }

    double operator()(std::size_t node, std::size_t coord) const { return values_[node * dim_ + coord]; }
    double& operator()(std::size_t node, std::size_t coord) { return values_[node * dim_ + coord]; }

    std::span<const double> at(std::size_t node) const { return {values_.data() + node * dim_, dim_}; }
    std::span<double> at(std::size_t node) { return {values_.data() + node * dim_, dim_}; }

    /// Copy of one coordinate as a scalar series over the nodes.
    std::vector<double> coordinate(std::size_t coord) const;

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// Throws DomainError if any entry is non-finite.
    void check_finite() const;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> values_;
};

/// Step function: a constant level on each cell [t_k, t_{k+1}); levels are
/// row-major n x d.
class SteppedFunction {
public:
    SteppedFunction(TimeGrid grid, std::size_t dim);
    SteppedFunction(TimeGrid grid, std::size_t dim, std::vector<double> levels);

    /// Indicator of [0, t_cell_end) in coordinate `coord` where the interval
    /// ends at node `cell_end`.
    static SteppedFunction indicator(TimeGrid grid, std::size_t dim, std::size_t cell_end, std::size_t coord);

    const TimeGrid& grid() const { return grid_; }
    std::size_t dim() const { return dim_; }
    std::size_t n_cells() const { return grid_.n_steps(); }

    double operator()(std::size_t cell, std::size_t coord) const { return levels_[cell * dim_ + coord]; }
    double& operator()(std::size_t cell, std::size_t coord) { return levels_[cell * dim_ + coord]; }

    std::vector<double> coordinate(std::size_t coord) const;

    const std::vector<double>& levels() const { return levels_; }
    std::vector<double>& levels() { return levels_; }

    SteppedFunction scaled(double c) const;
    /// Same function expressed on a grid with `factor` times finer cells.
    SteppedFunction refined(std::size_t factor) const;

    double l2_norm_squared() const;

private:
    TimeGrid grid_;
    std::size_t dim_;
    std::vector<double> levels_;
};

}  // namespace fracmv
