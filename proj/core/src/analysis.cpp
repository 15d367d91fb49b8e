#include "kanto/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "kanto/grid.hpp"
#include "kanto/measures.hpp"
#include "kanto/rng.hpp"
#include "kanto/seqcore.hpp"

namespace kanto {

namespace {

// exact floating products for (i+1) C(i+l+1, l) and B(l+1, i+1); each factor
// is formed without cancellation, so the pair probes the normalization
// identity at rounding level through two independent factorizations
double choose_product(int i, std::size_t l) {
    double c = 1.0;
    for (int s = 1; s <= i + 1; ++s)
        c *= (static_cast<double>(l) + s) / static_cast<double>(s);
    return c;
}

double beta_product(int i, std::size_t l) {
    double b = 1.0 / (static_cast<double>(l) + 1.0);
    for (int s = 1; s <= i; ++s)
        b *= static_cast<double>(s) / (static_cast<double>(l) + 1.0 + s);
    return b;
}

std::vector<double> uniform_grid(std::size_t n) {
    std::vector<double> g(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        g[j] = static_cast<double>(j) / static_cast<double>(n);
    return g;
}

// density jumps of the truncated delta image at the interior partition
// points, for summation-by-parts against the incomplete-beta sweep
struct JumpForm {
    std::vector<double> jumps;  // d_e = alpha_e - alpha_{e+1}, last entry alpha_{J-1}
    std::vector<double> xs;     // partition point e+1
    std::vector<double> alpha;
};

JumpForm delta_jump_form(int i, double x, double eps) {
    JumpForm jf;
    const std::size_t J = truncation_index(i, x, eps);
    jf.alpha = alpha_weights(i, x, J);
    jf.jumps.resize(J);
    jf.xs.resize(J);
    for (std::size_t e = 0; e < J; ++e) {
        jf.jumps[e] = jf.alpha[e] - (e + 1 < J ? jf.alpha[e + 1] : 0.0);
        jf.xs[e] = partition_point(i, e + 1);
    }
    return jf;
}

std::optional<double> rate_or_nothing(const std::vector<double>& errs) {
    if (errs.size() < 5) return std::nullopt;
    for (double e : errs)
        if (!(e > 0.0)) return std::nullopt;
    return rate_estimate(errs);
}

} // namespace

AcuRasaResult acu_rasa_verdict(const Observable& f, double tol) {
    if (!(tol > 0.0)) throw std::domain_error("acu_rasa_verdict: tol must be positive");
    AcuRasaResult r;
    r.f_at_1 = f(1.0);
    r.integral = adaptive_simpson(f, 0.0, 1.0, tol / 10.0);
    r.admissible = std::abs(r.f_at_1 - r.integral) <= tol;
    return r;
}

std::optional<double> rate_estimate(const std::vector<double>& sup_errors) {
    const std::size_t n = sup_errors.size();
    if (n < 5) throw std::domain_error("rate_estimate: need at least 5 entries");
    std::vector<double> ln(n);
    for (std::size_t m = 0; m < n; ++m) {
        if (!(sup_errors[m] > 0.0))
            throw std::domain_error("rate_estimate: entries must be positive");
        ln[m] = std::log(sup_errors[m]);
    }
    double sm = 0.0, sy = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        sm += static_cast<double>(m);
        sy += ln[m];
    }
    const double mbar = sm / static_cast<double>(n);
    const double ybar = sy / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double dm = static_cast<double>(m) - mbar;
        sxx += dm * dm;
        sxy += dm * (ln[m] - ybar);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double res = ln[m] - ybar - slope * (static_cast<double>(m) - mbar);
        rss += res * res;
    }
    if (std::sqrt(rss / static_cast<double>(n)) > 0.1) return std::nullopt;
    if (slope > 0.0) return std::nullopt;
    return std::exp(slope);
}

const std::vector<BankEntry>& observable_bank() {
    static const std::vector<BankEntry> bank = [] {
        const char* ids[] = {
            "1",
            "t",
            "t^2",
            "t^3",
            "3*t^2-4*t",
            "2*t^3-3*t^2+t",
            "6*t^2-8*t+1",
            "t^4",
            "1-t",
            "4*t^3-3*t",
            "t^2-t",
            "30*t^4-60*t^3+36*t^2-6*t",
        };
        std::vector<BankEntry> v;
        for (const char* id : ids) v.push_back({id, Polynomial::parse(id)});
        return v;
    }();
    return bank;
}

ConvergenceReport uniform_convergence_probe(const OperatorSpec& spec, const Observable& f,
                                            const std::string& observable_id, int m_max,
                                            double tol) {
    spec.validate();
    if (m_max < 1 || m_max > 10000)
        throw std::domain_error("uniform_convergence_probe: m_max must lie in [1, 10^4]");
    if (!(tol > 0.0)) throw std::domain_error("uniform_convergence_probe: tol must be positive");

    const AcuRasaResult ar = acu_rasa_verdict(f, tol);
    ConvergenceReport rep;
    rep.op = spec;
    rep.observable_id = observable_id;
    rep.target_constant = ar.integral;

    const bool node_path = spec.kind == OperatorSpec::Kind::Bernstein;
    const std::vector<double> grid = standard_grid(node_path ? 1 : spec.param);

    std::vector<double> cur;
    std::vector<double> nodes;
    if (node_path) {
        const int k = spec.param;
        nodes.resize(static_cast<std::size_t>(k) + 1);
        for (int j = 0; j <= k; ++j)
            nodes[static_cast<std::size_t>(j)] = f(static_cast<double>(j) / k);
    } else {
        cur.reserve(grid.size());
        for (double t : grid) cur.push_back(f(t));
    }
    double scale = 1.0;
    if (!node_path)
        for (double v : cur) scale = std::max(scale, std::abs(v));

    GridIterator it(node_path ? OperatorSpec{OperatorSpec::Kind::Projection, 1, 1e-6} : spec,
                    grid);

    auto sup_err = [&]() {
        double s = 0.0;
        if (node_path) {
            for (double t : grid)
                s = std::max(s, std::abs(bernstein_eval_from_nodes(spec.param, nodes, t) -
                                         ar.integral));
        } else {
            for (double v : cur) s = std::max(s, std::abs(v - ar.integral));
        }
        return s;
    };

    double sup = sup_err();
    rep.m_values.push_back(0);
    rep.sup_errors.push_back(sup);
    int m_used = 0;
    while (sup >= tol && m_used < m_max) {
        if (node_path)
            nodes = bernstein_iterate_nodes(spec.param, std::move(nodes), 1);
        else
            cur = it.step(cur);
        ++m_used;
        sup = sup_err();
        rep.m_values.push_back(m_used);
        rep.sup_errors.push_back(sup);
    }

    if (sup < tol) {
        rep.verdict = Verdict::converges;
    } else if (!ar.admissible) {
        rep.verdict = Verdict::diverges;
        rep.certified_floor = std::abs(ar.f_at_1 - ar.integral);
    } else {
        rep.verdict = Verdict::inconclusive;
    }

    rep.slack = tol / 10.0;
    if (!node_path && spec.kind != OperatorSpec::Kind::Projection && spec.param >= 3)
        rep.slack += static_cast<double>(m_used) * spec.eps * scale;

    // fit on the latter part of the decay, past the transient
    const std::size_t n = rep.sup_errors.size();
    const std::size_t tail = std::min<std::size_t>(n - n / 3, 40);
    rep.rate = rate_or_nothing(
        std::vector<double>(rep.sup_errors.end() - static_cast<std::ptrdiff_t>(tail),
                            rep.sup_errors.end()));
    return rep;
}

std::vector<DualProbeEntry> dual_convergence_probe(int i, double x, int m_max, double eps,
                                                   double stop_below) {
    if (i < 1) throw std::domain_error("dual_convergence_probe: i must be >= 1");
    if (!(x >= 0.0 && x < 1.0))
        throw std::domain_error("dual_convergence_probe: x must lie in [0,1)");
    if (m_max < 0 || m_max > 1000)
        throw std::domain_error("dual_convergence_probe: m_max must lie in [0, 10^3]");
    if (!(eps > 0.0 && eps < 1.0))
        throw std::domain_error("dual_convergence_probe: eps must lie in (0,1)");

    const std::size_t J =
        std::clamp<std::size_t>(2 * truncation_index(i, x, eps), 512, 6000);
    const DualKernel K = dual_kernel(i, J);
    double R = 0.0;
    for (double b : K.backflow) R += b;
    const double lamtail = static_cast<double>(i) / static_cast<double>(i + J);

    const PartitionMeasure mu = delta_image(i, x, eps);
    std::vector<double> d(J);
    double near_mass = 0.0;
    for (std::size_t l = 0; l < J; ++l) {
        const double m_l = l < mu.cells() ? mu.cell_mass(l) : 0.0;
        near_mass += m_l;
        d[l] = m_l - cell_length(i, l);
    }
    double lumped = 0.0;  // represented mass beyond cell J-1, folded into the far bucket
    for (std::size_t l = J; l < mu.cells(); ++l) lumped += mu.cell_mass(l);
    double f = (1.0 - near_mass) - lamtail;
    double tau = 2.0 * (mu.tail_mass_bound + lumped);

    std::vector<DualProbeEntry> out;
    out.reserve(static_cast<std::size_t>(m_max) + 1);
    for (int m = 0;; ++m) {
        double tv = std::abs(f);
        for (double v : d) tv += std::abs(v);
        out.push_back({tv, tau});
        if (m == m_max) break;
        if (stop_below > 0.0 && tv < stop_below) break;

        double esc = 0.0, fesc = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            esc += std::abs(d[j]) * K.escape[j];
            fesc += d[j] * K.escape[j];
        }
        d = K.apply(d);
        const double inflow = f / lamtail;
        for (std::size_t l = 0; l < J; ++l) d[l] += inflow * K.backflow[l];
        f = fesc + (1.0 - R / lamtail) * f;
        tau += 2.0 * esc;
    }
    return out;
}

namespace {

constexpr std::size_t kExactCellCap = 8192;
constexpr double kWedgeTarget = 4e-3;

GapEntry gap_entry_exact(int i, double x, double eps) {
    const PartitionMeasure mu1 = delta_image(i, x, eps / 2.0);
    const PartitionMeasure mu2 = dual_apply(i, mu1, eps);
    return {x, tv_distance(mu2, mu1), lattice_min_mass(mu2, mu1), false};
}

// Certified bounds for x so close to 1 that the exact path would need too
// many cells. The wedge sum starts just below the weight peak and every
// term is nonnegative, so stopping early (or truncating the delta image)
// only lowers it; the gap bound follows from the wedge identity.
GapEntry gap_entry_bounded(int i, double x) {
    const JumpForm jf = delta_jump_form(i, x, 1e-3);
    const std::size_t J = jf.alpha.size();
    std::size_t l0 = static_cast<std::size_t>(std::floor(0.8 * i * x / (1.0 - x)));
    if (l0 >= J) l0 = J - 1;
    BetaCdfSweep sweep(i, jf.xs, l0);
    double wlb = 0.0;
    for (std::size_t l = l0; l < J; ++l) {
        const double len = cell_length(i, l);
        const double gamma = len * std::max(0.0, sweep.weighted_sum(jf.jumps));
        wlb += std::min(jf.alpha[l] * len, gamma);
        if (wlb >= kWedgeTarget) break;
        sweep.advance();
    }
    return {x, 2.0 * (1.0 - wlb), wlb, true};
}

} // namespace

std::vector<GapEntry> gap02_detail(int i, const std::vector<double>& x_list) {
    if (i < 1) throw std::domain_error("gap02_detail: i must be >= 1");
    if (x_list.empty()) throw std::domain_error("gap02_detail: x_list must be nonempty");
    std::vector<GapEntry> out;
    out.reserve(x_list.size());
    for (double x : x_list) {
        if (!(x >= 0.0 && x < 1.0))
            throw std::domain_error("gap02_detail: x must lie in [0,1)");
        const double eps = x <= 0.999 ? 1e-4 : 1e-3;
        if (truncation_index(i, x, eps / 2.0) <= kExactCellCap)
            out.push_back(gap_entry_exact(i, x, eps));
        else
            out.push_back(gap_entry_bounded(i, x));
    }
    return out;
}

SurveyResult gap02_survey(int i, const std::vector<double>& x_list) {
    const std::vector<GapEntry> detail = gap02_detail(i, x_list);
    SurveyResult r{0.0, 1.0};
    for (const GapEntry& e : detail) {
        r.max_gap = std::max(r.max_gap, e.gap);
        r.min_wedge = std::min(r.min_wedge, e.wedge);
    }
    return r;
}

RatioBoundResult ratio_bound_check(int i, double x, double r) {
    if (i < 1) throw std::domain_error("ratio_bound_check: i must be >= 1");
    if (!(r > 0.0 && r < 1.0))
        throw std::domain_error("ratio_bound_check: r must lie in (0,1)");
    if (!(x > 1.0 / (i + 2) && x < 1.0))
        throw std::domain_error(
            "ratio_bound_check: x must lie in (1/(i+2), 1) so the window is nonempty");

    const std::size_t jx = pivot_index(i, x);
    const std::size_t lo =
        static_cast<std::size_t>(std::floor((1.0 - r) * static_cast<double>(jx)));
    const double cx = window_mass(i, x, r);

    const double eps_g = x <= 0.99 ? 1e-8 : 1e-4;
    JumpForm jf = delta_jump_form(i, x, eps_g);
    if (jf.alpha.size() <= jx) jf = delta_jump_form(i, x, eps_g / 100.0);

    BetaCdfSweep sweep(i, jf.xs, lo);
    double min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t l = lo; l <= jx; ++l) {
        const double gamma = std::max(0.0, sweep.weighted_sum(jf.jumps));
        min_ratio = std::min(min_ratio, gamma / jf.alpha[l]);
        sweep.advance();
    }
    return {cx, min_ratio};
}

StochasticityResult kernel_stochasticity_check(int i, std::size_t J, int quad_points) {
    if (i < 1) throw std::domain_error("kernel_stochasticity_check: i must be >= 1");
    if (J < 1 || quad_points < 1)
        throw std::domain_error("kernel_stochasticity_check: J and quad_points must be >= 1");
    StochasticityResult r{0.0, 0.0};
    for (int q = 0; q < quad_points; ++q) {
        const double x = (q + 0.5) / quad_points;
        const PartitionMeasure im = delta_image(i, x, 1e-12);
        r.max_row_err = std::max(r.max_row_err, std::abs(im.accounted_mass() - 1.0));
    }
    for (std::size_t l = 0; l < J; ++l) {
        const double p = (i + 1.0) * choose_product(i, l) * beta_product(i, l);
        r.max_col_err = std::max(r.max_col_err, std::abs(p - 1.0));
    }
    return r;
}

double bernstein_third_eigenvalue(int k) {
    if (k < 2) throw std::domain_error("bernstein_third_eigenvalue: k must be >= 2");
    const std::vector<std::vector<double>> N = bernstein_node_matrix(k);
    const std::size_t n = static_cast<std::size_t>(k) + 1;
    SplitMix64 g(0x5eedULL, static_cast<std::uint64_t>(k));
    std::vector<double> v(n, 0.0), w(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) v[j] = g.next_double() - 0.5;
    double lambda = 0.0;
    for (int it = 0; it < 300; ++it) {
        double nv = 0.0;
        for (double c : v) nv += c * c;
        nv = std::sqrt(nv);
        for (double& c : v) c /= nv;
        for (std::size_t m = 0; m < n; ++m) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += N[m][j] * v[j];
            w[m] = s;
        }
        w[0] = w[n - 1] = 0.0;  // rows 0 and k are unit vectors; clear rounding
        double nw = 0.0;
        for (double c : w) nw += c * c;
        lambda = std::sqrt(nw);
        std::swap(v, w);
    }
    return lambda;
}

ConvergenceReport bernstein_rate_probe(int k, const Observable& f,
                                       const std::string& observable_id, int m_max, double tol) {
    if (k < 1) throw std::domain_error("bernstein_rate_probe: k must be >= 1");
    if (m_max < 1 || m_max > 10000)
        throw std::domain_error("bernstein_rate_probe: m_max must lie in [1, 10^4]");
    if (!(tol > 0.0)) throw std::domain_error("bernstein_rate_probe: tol must be positive");

    ConvergenceReport rep;
    rep.op = OperatorSpec{OperatorSpec::Kind::Bernstein, k, 1e-6};
    rep.observable_id = observable_id;
    rep.affine_target = true;

    const double f0 = f(0.0), f1 = f(1.0);
    const std::vector<double> grid = uniform_grid(512);
    std::vector<double> nodes(static_cast<std::size_t>(k) + 1);
    for (int j = 0; j <= k; ++j)
        nodes[static_cast<std::size_t>(j)] = f(static_cast<double>(j) / k);

    auto sup_err = [&]() {
        double s = 0.0;
        for (double t : grid) {
            const double limit = f0 + (f1 - f0) * t;
            s = std::max(s, std::abs(bernstein_eval_from_nodes(k, nodes, t) - limit));
        }
        return s;
    };

    double sup = sup_err();
    rep.m_values.push_back(0);
    rep.sup_errors.push_back(sup);
    for (int m = 1; m <= m_max && sup > 1e-12; ++m) {
        nodes = bernstein_iterate_nodes(k, std::move(nodes), 1);
        sup = sup_err();
        rep.m_values.push_back(m);
        rep.sup_errors.push_back(sup);
    }
    rep.verdict = sup < tol ? Verdict::converges : Verdict::inconclusive;

    // fit away from the transient and the rounding floor
    std::vector<double> mid;
    for (std::size_t m = 3; m < rep.sup_errors.size(); ++m) {
        if (rep.sup_errors[m] <= 1e-11) break;
        mid.push_back(rep.sup_errors[m]);
    }
    rep.rate = rate_or_nothing(mid);
    return rep;
}

} // namespace kanto
