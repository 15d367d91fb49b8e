#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kanto/operators.hpp"
#include "kanto/polynomial.hpp"

namespace kanto {

enum class Verdict { converges, diverges, inconclusive };

struct ConvergenceReport {
    OperatorSpec op;
    std::string observable_id;
    std::vector<int> m_values;
    std::vector<double> sup_errors;  // ||T^m f - target|| over the grid
    std::optional<double> rate;      // geometric rate estimate, if clean
    Verdict verdict = Verdict::inconclusive;
    double target_constant = 0.0;
    bool affine_target = false;   // Bernstein limit is a line, not a constant
    double certified_floor = 0.0; // |f(1) - integral| when the verdict is diverges
    double slack = 0.0;           // half-width of the certified interval per entry
};

struct AcuRasaResult {
    bool admissible;
    double f_at_1;
    double integral;
};

// admissible  <=>  |f(1) - integral| <= tol; integral by adaptive quadrature
// to tol/10
AcuRasaResult acu_rasa_verdict(const Observable& f, double tol);

// Iterates f on the standard grid and tracks sup|T^m f - c| for
// c = integral of f. Stops early once below tol (verdict converges). An
// inadmissible f has sup error >= |f(1) - c| at every m because the
// endpoint is fixed, so the verdict diverges is a certificate carrying that
// floor. Admissible but still above tol at m_max: inconclusive.
ConvergenceReport uniform_convergence_probe(const OperatorSpec& spec, const Observable& f,
                                            const std::string& observable_id, int m_max,
                                            double tol);

inline ConvergenceReport uniform_convergence_probe(int i, const Observable& f, int m_max,
                                                   double tol) {
    return uniform_convergence_probe(OperatorSpec{OperatorSpec::Kind::Kantorovich, i, 1e-6}, f,
                                     "f", m_max, tol);
}

struct DualProbeEntry {
    double tv;     // TV distance of the m-th dual iterate of the delta image to lambda
    double slack;  // accumulated certificate width; true TV lies in tv +- slack
};

// entry m = ||(dual)^m(delta image at x) - lambda||_TV, m = 0..m_max.
//
// The iteration runs on the difference to lambda directly: cell masses on
// the first J cells evolve through the explicit cell kernel, and everything
// beyond cell J-1 is carried as one signed scalar whose exchange with the
// near cells uses the kernel's escape and backflow columns. Entry 0 is then
// exact, and the lambda tail never enters as a constant slack term. Mass
// escaping outward is re-injected with the lambda profile; the slack grows
// by twice the escaped absolute mass per step, which certifies the shape
// assumption. Stops early once tv < stop_below (0 disables).
std::vector<DualProbeEntry> dual_convergence_probe(int i, double x, int m_max, double eps,
                                                   double stop_below = 0.0);

struct GapEntry {
    double x;
    double gap;    // ||T'^2 delta_x - T' delta_x||_TV, or a certified upper bound
    double wedge;  // lattice minimum mass, or a certified lower bound
    bool bounded;  // true when the windowed bound path was taken
};

// Per-x gap and wedge. Near 1 the truncation index explodes; past ~8192
// cells the exact path is replaced by certified bounds: the wedge is summed
// over a cell window around the weight peak (a lower bound, since every
// omitted term is nonnegative) and the gap is read off the wedge identity,
// gap <= 2(1 - wedge).
std::vector<GapEntry> gap02_detail(int i, const std::vector<double>& x_list);

struct SurveyResult {
    double max_gap;
    double min_wedge;
};

// max over x of gap, min over x of wedge; pass criterion is
// max_gap < 2 - 1e-3 and min_wedge > 1e-3
SurveyResult gap02_survey(int i, const std::vector<double>& x_list);

struct RatioBoundResult {
    double window_mass;  // C_x, beta mass over [floor((1-r) j_x), j_x]
    double min_ratio;    // min over the window of gamma_l / beta_l
};

// Checks gamma domination over the pivot window. gamma_l is evaluated from
// the truncated delta image, so the reported ratio is a lower bound on the
// true one. Requires x in (1/(i+2), 1) so the window is nonempty.
RatioBoundResult ratio_bound_check(int i, double x, double r);

struct StochasticityResult {
    double max_row_err;  // max over sampled x of |mass(delta image) - 1|
    double max_col_err;  // max over l < J of |(i+1) C(i+l+1,l) B(l+1,i+1) - 1|
};

// Row check samples x at (q+1/2)/quad_points; column check evaluates the
// normalization identity through two independent product forms, so it probes
// the identity at floating-point level rather than testing one code path
// against itself.
StochasticityResult kernel_stochasticity_check(int i, std::size_t J, int quad_points);

// Least-squares fit of ln(error) against the index, exponentiated. Needs at
// least 5 entries, all positive (else domain error). Returns nullopt when the
// fit residual is too large (not geometric) or the slope is nonnegative.
std::optional<double> rate_estimate(const std::vector<double>& sup_errors);

struct BankEntry {
    std::string id;  // parseable polynomial text
    Polynomial poly;
};

// Fixed bank of 12 polynomial observables, 5 of them admissible.
const std::vector<BankEntry>& observable_bank();

// Modulus of the third-largest eigenvalue of the Bernstein node matrix
// (exact value (k-1)/k), computed by power iteration on the invariant
// subspace {v : v_0 = v_k = 0}. The two leading eigenvectors (constants and
// the identity nodes) have nonzero endpoints, so no deflation is needed.
double bernstein_third_eigenvalue(int k);

// sup|B_k^m f - affine limit| per m on a uniform grid; the rate estimate is
// fitted on the clean mid-range of the decay, away from the transient and
// the rounding floor.
ConvergenceReport bernstein_rate_probe(int k, const Observable& f,
                                       const std::string& observable_id, int m_max, double tol);

} // namespace kanto
