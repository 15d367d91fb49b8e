#pragma once

#include <cstddef>
#include <vector>

#include "kanto/grid.hpp"
#include "kanto/quadrature.hpp"

namespace kanto {

struct OperatorSpec {
    enum class Kind { Projection, Bernstein, MKZ, Kantorovich };

    Kind kind = Kind::Kantorovich;
    int param = 1;      // k for Bernstein; i for MKZ/Kantorovich
    double eps = 1e-6;  // series tolerance for MKZ/Kantorovich

    void validate() const;  // throws std::domain_error
};

// Tf(x) = f(0)(1-x) + f(1)x
double apply_projection(const Observable& f, double x);

// (k+1)x(k+1) row-stochastic matrix; entry (m,j) is the binomial pmf
// C(k,j)(m/k)^j(1-m/k)^{k-j} at node m/k.
std::vector<std::vector<double>> bernstein_node_matrix(int k);

// B_k f(x), exact finite sum
double apply_bernstein(int k, const Observable& f, double x);

// T_i f(x), truncated series with certified tail <= eps; exact f(1) at x=1
double apply_mkz(int i, const Observable& f, double x, double eps);

// integral of f over I_j = [j/(i+j), (j+1)/(i+j+1)) for j = 0..J-1,
// fixed-order Gauss-Legendre per cell
std::vector<double> subinterval_integrals(const Observable& f, int i, std::size_t J,
                                          int quad_order = 4);

// T^_i f(x) = sum_j alpha_j(x) * integral of f over I_j; exact f(1) at x=1
double apply_kantorovich(int i, const Observable& f, double x, double eps);

// One-step grid engine for Projection/MKZ/Kantorovich. The iterate is the
// exact image of the piecewise-linear interpolant of the current grid values:
// cell integrals use the exact antiderivative of the interpolant, and for
// i <= 2 the series tail beyond the last stored partition endpoint is summed
// in closed form, so no truncation error enters; weights are renormalized so
// the step is exactly Markov on the represented function. For i >= 3 the tail
// is truncated at eps/2 and streamed term by term (cost O(J) per deep grid
// point per step).
class GridIterator {
public:
    GridIterator(const OperatorSpec& spec, std::vector<double> grid);
    ~GridIterator();
    GridIterator(GridIterator&&) noexcept;
    GridIterator& operator=(GridIterator&&) noexcept;

    const std::vector<double>& grid() const;
    std::vector<double> step(const std::vector<double>& values) const;

private:
    struct Impl;
    Impl* impl_;
};

// T^m f sampled on f.grid (m >= 1); Bernstein kind iterates exactly in node
// space and projects back through the binomial weights.
GridFunction iterate_on_grid(const OperatorSpec& spec, const GridFunction& f, int m);
GridFunction iterate_on_grid(const OperatorSpec& spec, const Observable& f, int m);

// A_m f = (f + Tf + ... + T^{m-1} f)/m
GridFunction cesaro_on_grid(const OperatorSpec& spec, const GridFunction& f, int m);
GridFunction cesaro_on_grid(const OperatorSpec& spec, const Observable& f, int m);

GridFunction sample_on_grid(const Observable& f, std::vector<double> grid);

// B_k^m f evaluated at x from the node values of f (exact node-space power)
std::vector<double> bernstein_iterate_nodes(int k, std::vector<double> node_values, int m);
double bernstein_eval_from_nodes(int k, const std::vector<double>& node_values, double x);

} // namespace kanto
