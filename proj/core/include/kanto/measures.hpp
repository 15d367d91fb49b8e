#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace kanto {

// Atom at 1 plus a piecewise-constant density on the i-partition of [0,1):
// coeffs[l] is the density value on I_l = [l/(i+l), (l+1)/(i+l+1)). Mass not
// represented by the atom or the stored cells is only known to be at most
// tail_mass_bound; TV-type results carry that slack as an explicit interval.
struct PartitionMeasure {
    int i = 1;
    double atom1 = 0.0;
    std::vector<double> coeffs;
    double tail_mass_bound = 0.0;
    bool probability = true;

    std::size_t cells() const { return coeffs.size(); }
    double cell_mass(std::size_t l) const;
    double accounted_mass() const;
    void validate() const;  // throws std::domain_error
};

// T'_i delta_x: density alpha_l(x) out to truncation_index(i, x, eps)
PartitionMeasure delta_image(int i, double x, double eps);

// delta_1, the fixed atom
PartitionMeasure dirac_one(int i);

// Lebesgue measure restricted to the first J cells; the uncovered mass
// i/(i+J) of [J/(i+J), 1) is the tail bound
PartitionMeasure lebesgue_measure(int i, std::size_t J);

// m_l = integral of (1-y)^i y^l dmu(y) for l = 0..l_max; the atom contributes
// nothing since (1-y)^i vanishes at 1
std::vector<double> moments(const PartitionMeasure& mu, std::size_t l_max);

// T'_i mu. Output truncation starts at the input's and doubles until the
// unaccounted mass is <= eps; throws accuracy_error when the input tail
// exceeds eps/2 or the bound is unattainable within the cell cap.
PartitionMeasure dual_apply(int i, const PartitionMeasure& mu, double eps);

// gamma_l(x) = T'^2_i delta_x(I_l), first J entries (zero-padded)
std::vector<double> gamma_weights(int i, double x, std::size_t J, double eps);

// TV norm of the represented difference: sum |c_l - d_l| |I_l| + |atom diff|.
// tv_interval brackets the TV of the full difference using both tail bounds.
double tv_distance(const PartitionMeasure& mu, const PartitionMeasure& nu);
std::pair<double, double> tv_interval(const PartitionMeasure& mu, const PartitionMeasure& nu);

// mass of the lattice minimum: sum min(c_l,d_l) |I_l| + min of atoms
double lattice_min_mass(const PartitionMeasure& mu, const PartitionMeasure& nu);

// ||T'^2 delta_x - T' delta_x||_TV, the 0-2-law gap at x
double gap02(int i, double x, double eps);

// I_x(l+1, i+1), the regularized incomplete beta at integer parameters,
// as the stable (i+1)-term binomial tail sum
double beta_cdf(std::size_t l, int i, double x);

// Joint evaluation of F_l(e) = I_{xs[e]}(l+1, i+1) over a fixed sorted
// abscissa list, advanced in l; entries that have decayed past reviving are
// dropped from the live prefix.
class BetaCdfSweep {
public:
    BetaCdfSweep(int i, std::vector<double> xs, std::size_t l0);

    std::size_t level() const { return l_; }
    std::size_t size() const { return xs_.size(); }
    std::size_t first_alive() const { return alive_; }
    void advance();
    double value(std::size_t e) const;

    // sum over live entries of w[e] * F_l(e)
    double weighted_sum(const std::vector<double>& w) const;

private:
    void advance_alive();

    int i_;
    std::size_t l_ = 0, alive_ = 0;
    std::vector<double> xs_;
    std::vector<double> t_;  // states, (i+1) per abscissa
};

// Cell-mass kernel of T'_i truncated to J cells: entry (l, j) is the mass
// landing in I_l from unit mass spread uniformly over I_j. Columns sum to
// 1 - escape[j]; backflow[l] is the mass I_l receives from Lebesgue measure
// on the unrepresented region [J/(i+J), 1), so that applying the kernel to
// lambda's cell masses and adding backflow reproduces them exactly.
struct DualKernel {
    int i = 1;
    std::size_t J = 0;
    std::vector<double> mass;      // row-major J x J
    std::vector<double> escape;    // per column
    std::vector<double> backflow;  // per row

    double at(std::size_t l, std::size_t j) const { return mass[l * J + j]; }
    std::vector<double> apply(const std::vector<double>& cell_masses) const;
};

DualKernel dual_kernel(int i, std::size_t J);

// ||T'_i lambda_J - lambda_J||_TV computed in O(J i) without forming measures
double lebesgue_defect(int i, std::size_t J);

} // namespace kanto
