#include "fracmv/core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracmv/core/error.hpp"

namespace fracmv {

TimeGrid::TimeGrid(double t_end, std::size_t n_steps) : t_end_(t_end), n_steps_(n_steps) {
    require(std::isfinite(t_end) && t_end > 0.0, "time grid: t_end must be positive");
    require(n_steps >= 1, "time grid: n_steps must be at least 1");
}

TimeGrid TimeGrid::window(std::size_t first, std::size_t last) const {
    require(first < last && last <= n_steps_, "time grid: invalid window");
    return TimeGrid(static_cast<double>(last - first) * dt(), last - first);
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
    require(factor >= 1, "time grid: refinement factor must be positive");
    return TimeGrid(t_end_, n_steps_ * factor);
}

bool TimeGrid::operator==(const TimeGrid& other) const {
    return n_steps_ == other.n_steps_ && std::abs(t_end_ - other.t_end_) <= 1e-12 * std::max(1.0, t_end_);
}

SamplePath::SamplePath(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), values_(grid.n_nodes() * dim, 0.0) {
    require(dim >= 1, "sample path: dim must be at least 1");
}

SamplePath::SamplePath(TimeGrid grid, std::size_t dim, std::vector<double> values)
    : grid_(grid), dim_(dim), values_(std::move(values)) {
    require(dim >= 1, "sample path: dim must be at least 1");
    require(values_.size() == grid_.n_nodes() * dim_,
            "sample path: expected " + std::to_string(grid_.n_nodes() * dim_) + " values, got " +
                std::to_string(values_.size()));
}

std::vector<double> SamplePath::coordinate(std::size_t coord) const {
    std::vector<double> out(n_nodes());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (*this)(k, coord);
    return out;
}

void SamplePath::check_finite() const {
    for (double v : values_)
        if (!std::isfinite(v)) throw DomainError("sample path: non-finite entry");
}

SteppedFunction::SteppedFunction(TimeGrid grid, std::size_t dim)
    : grid_(grid), dim_(dim), levels_(grid.n_steps() * dim, 0.0) {
    require(dim >= 1, "stepped function: dim must be at least 1");
}

SteppedFunction::SteppedFunction(TimeGrid grid, std::size_t dim, std::vector<double> levels)
    : grid_(grid), dim_(dim), levels_(std::move(levels)) {
    require(dim >= 1, "stepped function: dim must be at least 1");
    require(levels_.size() == grid_.n_steps() * dim_, "stepped function: level count mismatch");
    for (double v : levels_) require(std::isfinite(v), "stepped function: non-finite level");
}

SteppedFunction SteppedFunction::indicator(TimeGrid grid, std::size_t dim, std::size_t cell_end, std::size_t coord) {
    require(cell_end <= grid.n_steps(), "indicator: end node outside grid");
    require(coord < dim, "indicator: coordinate out of range");
    SteppedFunction f(grid, dim);
    for (std::size_t k = 0; k < cell_end; ++k) f(k, coord) = 1.0;
    return f;
}

std::vector<double> SteppedFunction::coordinate(std::size_t coord) const {
    std::vector<double> out(n_cells());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = (*this)(k, coord);
    return out;
}

SteppedFunction SteppedFunction::scaled(double c) const {
    SteppedFunction out = *this;
    for (double& v : out.levels_) v *= c;
    return out;
}

SteppedFunction SteppedFunction::refined(std::size_t factor) const {
    SteppedFunction out(grid_.refined(factor), dim_);
    for (std::size_t k = 0; k < n_cells(); ++k)
        for (std::size_t r = 0; r < factor; ++r)
            for (std::size_t c = 0; c < dim_; ++c) out(k * factor + r, c) = (*this)(k, c);
    return out;
}

double SteppedFunction::l2_norm_squared() const {
    double s = 0.0;
    for (double v : levels_) s += v * v;
    return s * grid_.dt();
}

}  // namespace fracmv
