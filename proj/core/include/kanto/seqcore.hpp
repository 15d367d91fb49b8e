#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace kanto {

// Weight sequences of the generalized Kantorovich operator at one (i, x):
//   alpha_j = (i+1) C(i+j+1, j) (1-x)^i x^j      (density coefficients)
//   beta_j  = C(i+j-1, j) (1-x)^i x^j            (cell masses, sum to 1)
// together with the index landmarks on the partition I_j = [j/(i+j), (j+1)/(i+j+1)).
struct KantorovichWeights {
    int i = 1;
    double x = 0.0;
    std::size_t J = 0;          // number of stored terms
    std::vector<double> alphas;
    std::vector<double> betas;
    std::size_t pivot = 0;      // j with x in I_j
    std::size_t alpha_peak = 0; // floor((i+1)x/(1-x))
    std::size_t beta_peak = 0;  // floor((i-1)x/(1-x)), 0 for i=1
    double tail_bound = 0.0;    // certified upper bound on sum of beta_j, j >= J
};

// ln C(n,k), evaluated through lgamma; exact integers are recovered by
// rounding exp() for n <= 50.
double log_binomial(std::int64_t n, std::int64_t k);

// exact C(n,k) in 128-bit arithmetic, n <= 80 or so before overflow
__int128 binomial_exact(int n, int k);

std::vector<double> alpha_weights(int i, double x, std::size_t J);
std::vector<double> beta_weights(int i, double x, std::size_t J);

// Smallest J whose certified tail bound on sum_{j>=J} beta_j is <= eps.
// The bound is beta_J / (1 - rho_J) with rho_J = (1+(i-1)/(J+1))x, valid as
// soon as rho_J < 1 (the ratios decrease in j).
std::size_t truncation_index(int i, double x, double eps);

// The tail bound itself, at a caller-chosen J.
double beta_tail_bound(int i, double x, std::size_t J);

// The unique j with x in [j/(i+j), (j+1)/(i+j+1)).
std::size_t pivot_index(int i, double x);

// Floor-formula argmax indices of alpha and beta; requires x > 1/(i+2).
// At rational x the ratio can equal 1 exactly, so the formula index may tie
// with a neighbour; value attainment is the contract, not index uniqueness.
std::pair<std::size_t, std::size_t> argmax_indices(int i, double x);

// C_x = sum of beta_j over j in [floor((1-r) j_x), j_x].
double window_mass(int i, double x, double r);

KantorovichWeights make_weights(int i, double x, double eps);

// partition endpoint j/(i+j)
inline double partition_point(int i, std::size_t j) {
    return static_cast<double>(j) / static_cast<double>(i + j);
}

// |I_j| = i / ((i+j)(i+j+1))
inline double cell_length(int i, std::size_t j) {
    return static_cast<double>(i) /
           (static_cast<double>(i + j) * static_cast<double>(i + j + 1));
}

} // namespace kanto
