#pragma once

#include <cstddef>
#include <vector>

namespace kanto {

// An observable sampled on a fixed evaluation grid; the grid is strictly
// increasing and ends exactly at 1.
struct GridFunction {
    std::vector<double> grid;
    std::vector<double> values;

    void validate() const;  // throws std::domain_error on shape violations
};

// Evaluation grid for operator iteration: uniform step 1/256, geometric
// refinement 1 - 2^-p (p <= pmax) near 1, and the partition endpoints
// j/(i+j) for j <= part_cap. Deduplicated, sorted, ends at 1.
std::vector<double> standard_grid(int i, int pmax = 20, std::size_t part_cap = 256);

// index of the last grid point <= t (grid sorted); t must be >= grid.front()
std::size_t grid_segment(const std::vector<double>& grid, double t);

// piecewise-linear interpolation of (grid, values) at t in [grid.front(), 1]
double pl_interpolate(const std::vector<double>& grid, const std::vector<double>& values, double t);

} // namespace kanto
