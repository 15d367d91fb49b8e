#include "kanto/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kanto/seqcore.hpp"

namespace kanto {

void GridFunction::validate() const {
    if (grid.size() != values.size())
        throw std::domain_error("GridFunction: grid/values length mismatch");
    if (grid.empty() || grid.back() != 1.0)
        throw std::domain_error("GridFunction: grid must end at 1");
    for (std::size_t k = 0; k + 1 < grid.size(); ++k)
        if (!(grid[k] < grid[k + 1]))
            throw std::domain_error("GridFunction: grid must be strictly increasing");
    if (grid.front() < 0.0)
        throw std::domain_error("GridFunction: grid must lie in [0,1]");
}

std::vector<double> standard_grid(int i, int pmax, std::size_t part_cap) {
    if (i < 1) throw std::domain_error("standard_grid: i must be positive");
    std::vector<double> g;
    g.reserve(256 + pmax + part_cap + 2);
    for (int k = 0; k <= 256; ++k) g.push_back(k / 256.0);
    for (int p = 1; p <= pmax; ++p) g.push_back(1.0 - std::ldexp(1.0, -p));
    for (std::size_t j = 1; j <= part_cap; ++j) g.push_back(partition_point(i, j));
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

std::size_t grid_segment(const std::vector<double>& grid, double t) {
    auto it = std::upper_bound(grid.begin(), grid.end(), t);
    if (it == grid.begin()) throw std::domain_error("grid_segment: t below grid");
    return static_cast<std::size_t>(it - grid.begin()) - 1;
}

double pl_interpolate(const std::vector<double>& grid, const std::vector<double>& values, double t) {
    std::size_t s = grid_segment(grid, t);
    if (s + 1 >= grid.size()) return values.back();
    const double w = (t - grid[s]) / (grid[s + 1] - grid[s]);
    return values[s] + w * (values[s + 1] - values[s]);
}

} // namespace kanto
