#include "kanto/measures.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kanto/errors.hpp"
#include "kanto/seqcore.hpp"

namespace kanto {

namespace {

constexpr std::size_t kCellCap = std::size_t{1} << 21;
constexpr double kDeadThreshold = 1e-60;

// B(l+1, i+1) as an exact product, no cancellation at any l
double beta_function(std::size_t l, int i) {
    double b = 1.0 / static_cast<double>(l + 1);
    for (int s = 1; s <= i; ++s)
        b *= static_cast<double>(s) / static_cast<double>(l + 1 + s);
    return b;
}

} // namespace

double PartitionMeasure::cell_mass(std::size_t l) const {
    return coeffs[l] * cell_length(i, l);
}

double PartitionMeasure::accounted_mass() const {
    double m = atom1;
    for (std::size_t l = 0; l < coeffs.size(); ++l) m += cell_mass(l);
    return m;
}

void PartitionMeasure::validate() const {
    if (i < 1) throw std::domain_error("PartitionMeasure: i must be >= 1");
    if (atom1 < 0.0 || tail_mass_bound < 0.0)
        throw std::domain_error("PartitionMeasure: negative atom or tail bound");
    for (double c : coeffs)
        if (c < 0.0) throw std::domain_error("PartitionMeasure: negative density coefficient");
    if (probability) {
        const double m = accounted_mass();
        if (m < 1.0 - tail_mass_bound - 1e-10 || m > 1.0 + 1e-10)
            throw std::domain_error("PartitionMeasure: probability mass accounting violated");
    }
}

PartitionMeasure delta_image(int i, double x, double eps) {
    if (i < 1) throw std::domain_error("delta_image: i must be >= 1");
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("delta_image: x must lie in [0,1); use dirac_one for x = 1");
    if (!(eps > 0.0)) throw std::domain_error("delta_image: eps must be positive");
    PartitionMeasure mu;
    mu.i = i;
    const std::size_t J = truncation_index(i, x, eps);
    mu.coeffs = alpha_weights(i, x, J);
    mu.tail_mass_bound = beta_tail_bound(i, x, J);
    return mu;
}

PartitionMeasure dirac_one(int i) {
    if (i < 1) throw std::domain_error("dirac_one: i must be >= 1");
    PartitionMeasure mu;
    mu.i = i;
    mu.atom1 = 1.0;
    return mu;
}

PartitionMeasure lebesgue_measure(int i, std::size_t J) {
    if (i < 1) throw std::domain_error("lebesgue_measure: i must be >= 1");
    if (J < 1) throw std::domain_error("lebesgue_measure: J must be >= 1");
    PartitionMeasure mu;
    mu.i = i;
    mu.coeffs.assign(J, 1.0);
    mu.tail_mass_bound = static_cast<double>(i) / static_cast<double>(i + J);
    return mu;
}

double beta_cdf(std::size_t l, int i, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    // sum_{r=0..i} C(l+i+1, l+1+r) x^{l+1+r} (1-x)^{i-r}
    const double lx = std::log(x), lu = std::log1p(-x);
    const auto n = static_cast<std::int64_t>(l) + i + 1;
    double s = 0.0;
    for (int r = 0; r <= i; ++r)
        s += std::exp(log_binomial(n, static_cast<std::int64_t>(l) + 1 + r) +
                      (static_cast<double>(l) + 1 + r) * lx + (i - r) * lu);
    return s < 1.0 ? s : 1.0;
}

BetaCdfSweep::BetaCdfSweep(int i, std::vector<double> xs, std::size_t l0)
    : i_(i), l_(l0), xs_(std::move(xs)) {
    if (i_ < 1) throw std::domain_error("BetaCdfSweep: i must be >= 1");
    for (std::size_t e = 0; e + 1 < xs_.size(); ++e)
        if (xs_[e] > xs_[e + 1]) throw std::domain_error("BetaCdfSweep: abscissas must be sorted");
    t_.assign(xs_.size() * (i_ + 1), 0.0);
    const auto n = static_cast<std::int64_t>(l_) + i_ + 1;
    for (std::size_t e = 0; e < xs_.size(); ++e) {
        const double x = xs_[e];
        if (x <= 0.0) continue;
        if (x >= 1.0) {
            t_[e * (i_ + 1) + i_] = 1.0;
            continue;
        }
        const double lx = std::log(x), lu = std::log1p(-x);
        for (int r = 0; r <= i_; ++r)
            t_[e * (i_ + 1) + r] =
                std::exp(log_binomial(n, static_cast<std::int64_t>(l_) + 1 + r) +
                         (static_cast<double>(l_) + 1 + r) * lx + (i_ - r) * lu);
    }
    advance_alive();
}

void BetaCdfSweep::advance() {
    const double lp = static_cast<double>(l_);
    for (std::size_t e = alive_; e < xs_.size(); ++e) {
        const double x = xs_[e];
        double* t = &t_[e * (i_ + 1)];
        for (int r = 0; r <= i_; ++r) t[r] *= x * (lp + i_ + 2) / (lp + 2 + r);
    }
    ++l_;
    advance_alive();
}

void BetaCdfSweep::advance_alive() {
    const double lp = static_cast<double>(l_);
    while (alive_ < xs_.size()) {
        const double* t = &t_[alive_ * (i_ + 1)];
        double m = 0.0;
        for (int r = 0; r <= i_; ++r) m = std::max(m, t[r]);
        // gone and past its peak: can never matter again
        if (m < kDeadThreshold && xs_[alive_] * (lp + i_ + 2) <= lp + 2)
            ++alive_;
        else
            break;
    }
}

double BetaCdfSweep::value(std::size_t e) const {
    if (e < alive_) return 0.0;
    const double* t = &t_[e * (i_ + 1)];
    double s = 0.0;
    for (int r = 0; r <= i_; ++r) s += t[r];
    return s;
}

double BetaCdfSweep::weighted_sum(const std::vector<double>& w) const {
    double s = 0.0;
    for (std::size_t e = alive_; e < xs_.size(); ++e) {
        const double* t = &t_[e * (i_ + 1)];
        double f = 0.0;
        for (int r = 0; r <= i_; ++r) f += t[r];
        s += w[e] * f;
    }
    return s;
}

std::vector<double> moments(const PartitionMeasure& mu, std::size_t l_max) {
    mu.validate();
    const std::size_t J = mu.cells();
    std::vector<double> out(l_max + 1, 0.0);
    if (J == 0) return out;
    std::vector<double> xs(J), jumps(J);
    for (std::size_t k = 0; k < J; ++k) {
        xs[k] = partition_point(mu.i, k + 1);
        jumps[k] = mu.coeffs[k] - (k + 1 < J ? mu.coeffs[k + 1] : 0.0);
    }
    BetaCdfSweep sweep(mu.i, std::move(xs), 0);
    for (std::size_t l = 0; l <= l_max; ++l) {
        out[l] = beta_function(l, mu.i) * sweep.weighted_sum(jumps);
        if (out[l] < 0.0) out[l] = 0.0;
        sweep.advance();
    }
    return out;
}

PartitionMeasure dual_apply(int i, const PartitionMeasure& mu, double eps) {
    if (i < 1) throw std::domain_error("dual_apply: i must be >= 1");
    mu.validate();
    if (mu.i != i) throw std::domain_error("dual_apply: partition parameter mismatch");
    if (!(eps > 0.0)) throw std::domain_error("dual_apply: eps must be positive");
    if (!mu.probability)
        throw std::domain_error("dual_apply: input must be a probability measure");
    if (mu.tail_mass_bound > 0.5 * eps)
        throw accuracy_error("dual_apply: input tail bound exceeds eps/2", mu.tail_mass_bound);

    PartitionMeasure out;
    out.i = i;
    out.atom1 = mu.atom1;
    const std::size_t Jin = mu.cells();
    if (Jin == 0) {  // pure atom: fixed point
        out.tail_mass_bound = mu.tail_mass_bound;
        return out;
    }

    std::vector<double> xs(Jin), jumps(Jin);
    for (std::size_t k = 0; k < Jin; ++k) {
        xs[k] = partition_point(i, k + 1);
        jumps[k] = mu.coeffs[k] - (k + 1 < Jin ? mu.coeffs[k + 1] : 0.0);
    }
    BetaCdfSweep sweep(i, std::move(xs), 0);

    std::size_t target = Jin;
    double accounted = out.atom1;
    for (;;) {
        while (out.coeffs.size() < target) {
            double c = sweep.weighted_sum(jumps);
            if (c < 0.0) c = 0.0;
            accounted += c * cell_length(i, out.coeffs.size());
            out.coeffs.push_back(c);
            sweep.advance();
        }
        const double unaccounted = std::max(0.0, 1.0 - accounted);
        if (unaccounted <= eps) {
            out.tail_mass_bound = unaccounted;
            break;
        }
        if (target >= kCellCap)
            throw accuracy_error("dual_apply: eps unattainable within the cell cap", unaccounted);
        target *= 2;
    }
    return out;
}

std::vector<double> gamma_weights(int i, double x, std::size_t J, double eps) {
    const PartitionMeasure two = dual_apply(i, delta_image(i, x, 0.5 * eps), eps);
    std::vector<double> g(J, 0.0);
    for (std::size_t l = 0; l < J && l < two.cells(); ++l) g[l] = two.cell_mass(l);
    return g;
}

namespace {

void check_pair(const PartitionMeasure& mu, const PartitionMeasure& nu) {
    mu.validate();
    nu.validate();
    if (mu.i != nu.i) throw std::domain_error("measure pair: partition parameter mismatch");
}

} // namespace

double tv_distance(const PartitionMeasure& mu, const PartitionMeasure& nu) {
    check_pair(mu, nu);
    const std::size_t J = std::max(mu.cells(), nu.cells());
    double tv = std::fabs(mu.atom1 - nu.atom1);
    for (std::size_t l = 0; l < J; ++l) {
        const double c = l < mu.cells() ? mu.coeffs[l] : 0.0;
        const double d = l < nu.cells() ? nu.coeffs[l] : 0.0;
        tv += std::fabs(c - d) * cell_length(mu.i, l);
    }
    return tv;
}

std::pair<double, double> tv_interval(const PartitionMeasure& mu, const PartitionMeasure& nu) {
    const double v = tv_distance(mu, nu);
    const double slack = mu.tail_mass_bound + nu.tail_mass_bound;
    return {std::max(0.0, v - slack), v + slack};
}

double lattice_min_mass(const PartitionMeasure& mu, const PartitionMeasure& nu) {
    check_pair(mu, nu);
    if (!mu.probability || !nu.probability)
        throw std::domain_error("lattice_min_mass: both measures must be probabilities");
    const std::size_t J = std::max(mu.cells(), nu.cells());
    double w = std::min(mu.atom1, nu.atom1);
    for (std::size_t l = 0; l < J; ++l) {
        const double c = l < mu.cells() ? mu.coeffs[l] : 0.0;
        const double d = l < nu.cells() ? nu.coeffs[l] : 0.0;
        w += std::min(c, d) * cell_length(mu.i, l);
    }
    return w;
}

double gap02(int i, double x, double eps) {
    const PartitionMeasure one = delta_image(i, x, 0.5 * eps);
    const PartitionMeasure two = dual_apply(i, one, eps);
    return tv_distance(two, one);
}

std::vector<double> DualKernel::apply(const std::vector<double>& cell_masses) const {
    if (cell_masses.size() != J) throw std::domain_error("DualKernel::apply: length mismatch");
    std::vector<double> out(J, 0.0);
    for (std::size_t l = 0; l < J; ++l) {
        const double* row = &mass[l * J];
        double s = 0.0;
        for (std::size_t j = 0; j < J; ++j) s += row[j] * cell_masses[j];
        out[l] = s;
    }
    return out;
}

DualKernel dual_kernel(int i, std::size_t J) {
    if (i < 1) throw std::domain_error("dual_kernel: i must be >= 1");
    if (J < 1 || J > 6000)
        throw std::domain_error("dual_kernel: J out of range for a dense kernel (1..6000)");
    DualKernel K;
    K.i = i;
    K.J = J;
    K.mass.assign(J * J, 0.0);
    K.escape.assign(J, 0.0);
    K.backflow.assign(J, 0.0);

    std::vector<double> xs(J + 1);
    for (std::size_t e = 0; e <= J; ++e) xs[e] = partition_point(i, e);
    BetaCdfSweep sweep(i, std::move(xs), 0);
    for (std::size_t l = 0; l < J; ++l) {
        const double len_l = cell_length(i, l);
        double* row = &K.mass[l * J];
        double fl = sweep.value(0);
        for (std::size_t j = 0; j < J; ++j) {
            const double fr = sweep.value(j + 1);
            row[j] = std::max(0.0, len_l * (fr - fl) / cell_length(i, j));
            fl = fr;
        }
        sweep.advance();
    }
    for (std::size_t j = 0; j < J; ++j) {
        double col = 0.0;
        for (std::size_t l = 0; l < J; ++l) col += K.mass[l * J + j];
        K.escape[j] = std::max(0.0, 1.0 - col);
    }
    for (std::size_t l = 0; l < J; ++l) {
        double s = 0.0;
        const double* row = &K.mass[l * J];
        for (std::size_t j = 0; j < J; ++j) s += row[j] * cell_length(i, j);
        K.backflow[l] = std::max(0.0, cell_length(i, l) - s);
    }
    return K;
}

double lebesgue_defect(int i, std::size_t J) {
    if (i < 1) throw std::domain_error("lebesgue_defect: i must be >= 1");
    if (J < 1) throw std::domain_error("lebesgue_defect: J must be >= 1");
    BetaCdfSweep sweep(i, {partition_point(i, J)}, 0);
    double tv = 0.0;
    for (std::size_t l = 0; l < J; ++l) {
        tv += cell_length(i, l) * std::max(0.0, 1.0 - sweep.value(0));
        sweep.advance();
    }
    return tv;
}

} // namespace kanto
