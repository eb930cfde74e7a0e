#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fuzzygeom/errors.hpp"

namespace fuzzygeom {

struct GridAxis {
    int size = 0;
    double origin = 0.0;
    double step = 0.0;
    bool periodic = false;
};

// Rectangular parameter grid, row-major storage with axis 0 slowest.
struct Grid {
    std::vector<GridAxis> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    std::size_t num_points() const;
    std::size_t stride(int axis) const;
    std::size_t flat(const std::vector<int>& idx) const;
    void unflat(std::size_t flat_idx, std::vector<int>& idx) const;
    double coordinate(int axis, int index) const {
        return axes[axis].origin + axes[axis].step * index;
    }
    double max_step() const;
    bool fully_periodic() const;
};

using GridField = std::vector<double>;

// Sample fn(u1, ..., un) at every grid point.
GridField make_field(const Grid& g,
                     const std::function<double(const std::vector<double>&)>& fn);

// First derivative along one axis: 4th-order central stencil with periodic
// wrap, or one-sided 4th-order closure at open boundaries.
GridField partial_derivative(const Grid& g, const GridField& f, int axis);

// Flat indices of points at least `margin` cells away from every open
// boundary (periodic axes are never trimmed).
std::vector<std::size_t> interior_points(const Grid& g, int margin);

// Index margin to discard after `depth` nested derivative levels near an
// open boundary (stencil half-width 2, doubled for safety).
inline int stencil_margin(int depth) { return 4 * depth; }

double max_abs_over(const GridField& f, const std::vector<std::size_t>& pts);

// Deterministic fixed-shape pairwise summation.
double pairwise_sum(const std::vector<double>& v);

// Worker count used by grid/nambu point loops (default 1); result fields are
// identical for any value because every point is computed independently and
// reductions always run serially in fixed order.
void set_grid_jobs(int jobs);
int grid_jobs();

// Run fn(begin, end) over [0, total) split into contiguous chunks.
void parallel_for(std::size_t total,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace fuzzygeom
