#include "kanto/seqcore.hpp"

#include <cmath>
#include <stdexcept>

namespace kanto {

namespace {

void check_x(double x) {
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("x must lie in [0,1)");
}

void check_i(int i) {
    if (i < 1) throw std::domain_error("i must be a positive integer");
}

// beta ratio beta_{j+1}/beta_j
inline double beta_ratio(int i, double x, std::size_t j) {
    return (1.0 + static_cast<double>(i - 1) / static_cast<double>(j + 1)) * x;
}

} // namespace

double log_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
    if (k == 0 || k == n) return 0.0;
    return std::lgamma(static_cast<double>(n + 1)) -
           std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
}

__int128 binomial_exact(int n, int k) {
    if (n < 0 || k < 0 || k > n) throw std::domain_error("binomial_exact: need 0 <= k <= n");
    if (k > n - k) k = n - k;
    __int128 c = 1;
    for (int t = 1; t <= k; ++t) {
        c = c * (n - k + t) / t;  // product of t consecutive integers is divisible by t!
    }
    return c;
}

std::vector<double> alpha_weights(int i, double x, std::size_t J) {
    check_i(i);
    check_x(x);
    if (J < 1) throw std::domain_error("alpha_weights: J must be >= 1");
    std::vector<double> a(J);
    a[0] = (i + 1) * std::pow(1.0 - x, i);
    for (std::size_t j = 0; j + 1 < J; ++j)
        a[j + 1] = a[j] * (1.0 + static_cast<double>(i + 1) / static_cast<double>(j + 1)) * x;
    return a;
}

std::vector<double> beta_weights(int i, double x, std::size_t J) {
    check_i(i);
    check_x(x);
    if (J < 1) throw std::domain_error("beta_weights: J must be >= 1");
    std::vector<double> b(J);
    b[0] = std::pow(1.0 - x, i);
    for (std::size_t j = 0; j + 1 < J; ++j)
        b[j + 1] = b[j] * beta_ratio(i, x, j);
    return b;
}

double beta_tail_bound(int i, double x, std::size_t J) {
    check_i(i);
    check_x(x);
    const double rho = beta_ratio(i, x, J);
    if (rho >= 1.0) return 1.0;  // no geometric certificate yet
    // beta_J computed by the stable recurrence
    double b = std::pow(1.0 - x, i);
    for (std::size_t j = 0; j < J; ++j) {
        b *= beta_ratio(i, x, j);
        if (b == 0.0) return 0.0;
    }
    return b / (1.0 - rho);
}

std::size_t truncation_index(int i, double x, double eps) {
    check_i(i);
    check_x(x);
    if (!(eps > 0)) throw std::domain_error("truncation_index: eps must be positive");
    double b = std::pow(1.0 - x, i);  // beta_J as J advances
    std::size_t J = 0;
    for (;;) {
        const double rho = beta_ratio(i, x, J);
        if (rho < 1.0 && b / (1.0 - rho) <= eps) break;
        b *= rho;
        ++J;
        if (J > 100000000) throw std::domain_error("truncation_index: eps unreachable");
    }
    return J < 1 ? 1 : J;
}

std::size_t pivot_index(int i, double x) {
    check_i(i);
    check_x(x);
    double j0 = std::floor(i * x / (1.0 - x));
    auto member = [&](double j) {
        return partition_point(i, static_cast<std::size_t>(j)) <= x &&
               x < partition_point(i, static_cast<std::size_t>(j) + 1);
    };
    // floor is the analytic answer; one step of repair absorbs rounding
    if (!member(j0)) {
        if (j0 > 0 && member(j0 - 1)) j0 -= 1;
        else if (member(j0 + 1)) j0 += 1;
        else throw std::domain_error("pivot_index: membership repair failed");
    }
    return static_cast<std::size_t>(j0);
}

std::pair<std::size_t, std::size_t> argmax_indices(int i, double x) {
    check_i(i);
    if (!(x > 1.0 / (i + 2) && x < 1.0))
        throw std::domain_error("argmax_indices: x must lie in (1/(i+2), 1)");
    const double q = x / (1.0 - x);
    const auto ap = static_cast<std::size_t>(std::floor((i + 1) * q));
    const auto bp = (i == 1) ? std::size_t{0}
                             : static_cast<std::size_t>(std::floor((i - 1) * q));
    return {ap, bp};
}

double window_mass(int i, double x, double r) {
    check_i(i);
    check_x(x);
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("window_mass: r must lie in (0,1)");
    const std::size_t jx = pivot_index(i, x);
    const auto lo = static_cast<std::size_t>(std::floor((1.0 - r) * static_cast<double>(jx)));
    const std::vector<double> b = beta_weights(i, x, jx + 1);
    double s = 0.0;
    for (std::size_t j = lo; j <= jx; ++j) s += b[j];
    return s;
}

KantorovichWeights make_weights(int i, double x, double eps) {
    KantorovichWeights w;
    w.i = i;
    w.x = x;
    w.J = truncation_index(i, x, eps);
    w.alphas = alpha_weights(i, x, w.J);
    w.betas = beta_weights(i, x, w.J);
    w.pivot = pivot_index(i, x);
    w.tail_bound = beta_tail_bound(i, x, w.J);
    if (x > 1.0 / (i + 2)) {
        const auto [ap, bp] = argmax_indices(i, x);
        w.alpha_peak = ap;
        w.beta_peak = bp;
    } else {
        w.alpha_peak = 0;  // weights decrease from j=0 in this range
        w.beta_peak = 0;
    }
    return w;
}

} // namespace kanto
