#include "kanto/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

#include "kanto/analysis.hpp"
#include "kanto/discsim.hpp"
#include "kanto/io.hpp"
#include "kanto/measures.hpp"
#include "kanto/operators.hpp"
#include "kanto/rng.hpp"
#include "kanto/seqcore.hpp"

namespace kanto {

namespace {

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// sup-grid run against an arbitrary target vector; returns the first m with
// sup <= tol, or -1
struct GridRun {
    int mstar = -1;
    double final_sup = 0.0;
};

GridRun run_to_target(const OperatorSpec& spec, const std::vector<double>& grid,
                      std::vector<double> values, const std::vector<double>& target, int m_cap,
                      double tol) {
    GridIterator it(spec, grid);
    auto sup = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t g = 0; g < v.size(); ++g)
            s = std::max(s, std::abs(v[g] - (target.empty() ? 0.0 : target[g])));
        return s;
    };
    GridRun r;
    double e = sup(values);
    for (int m = 0; m <= m_cap; ++m) {
        if (e <= tol) {
            r.mstar = m;
            break;
        }
        if (m == m_cap) break;
        values = it.step(values);
        e = sup(values);
    }
    r.final_sup = e;
    return r;
}

CheckResult check_dichotomy() {
    CheckResult r{1, "theorem-dichotomy", true, "", 0};
    int worst_m = 0;
    double worst_floor = 2.0;
    for (int i : {1, 2}) {
        const OperatorSpec spec{OperatorSpec::Kind::Kantorovich, i, 1e-6};
        for (const BankEntry& b : observable_bank()) {
            const Polynomial& p = b.poly;
            const bool adm = std::abs(p(1.0) - p.integral01()) <= 1e-9;
            const ConvergenceReport rep = uniform_convergence_probe(
                spec, [&](double t) { return p(t); }, b.id, 2000, 1e-2);
            if (rep.verdict == Verdict::inconclusive ||
                (rep.verdict == Verdict::converges) != adm) {
                r.pass = false;
                r.detail += fmt(" i=%d f=%s verdict=%s;", i, b.id.c_str(),
                                io::verdict_name(rep.verdict).c_str());
            }
            if (rep.verdict == Verdict::converges)
                worst_m = std::max(worst_m, rep.m_values.back());
            if (rep.verdict == Verdict::diverges) {
                worst_floor = std::min(worst_floor, rep.certified_floor);
                if (std::abs(rep.certified_floor - std::abs(p(1.0) - p.integral01())) > 1e-8) {
                    r.pass = false;
                    r.detail += fmt(" i=%d f=%s bad floor;", i, b.id.c_str());
                }
            }
        }
    }
    if (r.pass)
        r.detail = fmt("24 probes agree with the criterion, worst m*=%d, min floor=%.3f",
                       worst_m, worst_floor);
    return r;
}

CheckResult check_stochasticity() {
    CheckResult r{2, "kernel-stochasticity", true, "", 0};
    double row = 0.0, col = 0.0;
    for (int i = 1; i <= 5; ++i) {
        const StochasticityResult s = kernel_stochasticity_check(i, 200, 200);
        row = std::max(row, s.max_row_err);
        col = std::max(col, s.max_col_err);
    }
    r.pass = row < 1e-10 && col < 1e-10;
    r.detail = fmt("max row err=%.3g, max col err=%.3g (need < 1e-10)", row, col);
    return r;
}

CheckResult check_lambda_invariance() {
    CheckResult r{3, "lambda-invariance", true, "", 0};
    double worst = 0.0;
    for (int i : {1, 2}) {
        const std::size_t J = static_cast<std::size_t>(i) * 1'000'000;  // tail i/(i+J) <= 1e-6
        worst = std::max(worst, lebesgue_defect(i, J));
    }
    r.pass = worst <= 2e-6;
    r.detail = fmt("max ||T'lambda_J - lambda_J||=%.3g (need <= 2e-6)", worst);
    return r;
}

CheckResult check_dual_stability() {
    CheckResult r{4, "dual-stability", true, "", 0};
    int worst_m = -1;
    double worst_incr = 0.0;
    for (int i : {1, 2}) {
        for (double x : {0.0, 0.5, 0.9, 0.99}) {
            const auto ent = dual_convergence_probe(i, x, 500, 1e-6, 5e-4);
            int mstar = -1;
            for (std::size_t m = 0; m < ent.size(); ++m) {
                if (ent[m].tv < 1e-3) {
                    mstar = static_cast<int>(m);
                    break;
                }
                if (m) {
                    const double allowed = 1e-9 + (ent[m].slack - ent[m - 1].slack);
                    worst_incr = std::max(worst_incr, ent[m].tv - ent[m - 1].tv - allowed);
                }
            }
            if (mstar < 0) {
                r.pass = false;
                r.detail += fmt(" i=%d x=%g never below 1e-3;", i, x);
            }
            worst_m = std::max(worst_m, mstar);
        }
    }
    if (worst_incr > 0.0) {
        r.pass = false;
        r.detail += fmt(" monotonicity violated by %.3g;", worst_incr);
    }
    if (r.pass) r.detail = fmt("worst m*=%d of 500, no certified increase", worst_m);
    return r;
}

CheckResult check_gap_survey() {
    CheckResult r{5, "gap-survey", true, "", 0};
    const std::vector<double> xs{0.9, 0.99, 0.999, 0.9999};
    double gap = 0.0, wedge = 1.0;
    for (int i = 1; i <= 5; ++i) {
        const SurveyResult s = gap02_survey(i, xs);
        gap = std::max(gap, s.max_gap);
        wedge = std::min(wedge, s.min_wedge);
    }
    r.pass = gap <= 2.0 - 1e-3 && wedge >= 1e-3;
    r.detail = fmt("max gap=%.6f (need <= 1.999), min wedge=%.6f (need >= 1e-3)", gap, wedge);
    return r;
}

CheckResult check_weight_laws() {
    CheckResult r{6, "weight-laws", true, "", 0};
    const double xs[] = {0.01, 0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9, 0.97, 0.99, 0.995, 0.999};
    double worst = 0.0;
    for (int i = 1; i <= 5 && r.pass; ++i) {
        for (double x : xs) {
            const std::size_t J = truncation_index(i, x, 1e-12);
            const std::vector<double> b = beta_weights(i, x, J);
            const std::vector<double> a = alpha_weights(i, x, J);
            double sum = 0.0;
            for (double v : b) sum += v;
            const double bound = beta_tail_bound(i, x, J);
            const double norm_err = std::max(std::max(0.0, (1.0 - sum) - bound), sum - 1.0);
            worst = std::max(worst, norm_err);

            for (std::size_t j = 0; j + 1 < std::min<std::size_t>(J, 2000); ++j) {
                if (b[j] < 1e-250) break;
                const double pred = b[j] * x * (1.0 + (i - 1.0) / (j + 1.0));
                worst = std::max(worst, std::abs(b[j + 1] - pred) / std::max(b[j + 1], 1e-300));
                worst =
                    std::max(worst, std::abs(a[j] * cell_length(i, j) - b[j]) / b[j]);
            }

            const std::size_t jx = pivot_index(i, x);
            if (!(partition_point(i, jx) <= x && x < partition_point(i, jx + 1))) {
                r.pass = false;
                r.detail += fmt(" pivot wrong at i=%d x=%g;", i, x);
            }
            if (x > 1.0 / (i + 2)) {
                const auto [ap, bp] = argmax_indices(i, x);
                double amax = 0.0, bmax = 0.0;
                for (std::size_t j = 0; j < J; ++j) {
                    amax = std::max(amax, a[j]);
                    bmax = std::max(bmax, b[j]);
                }
                if (ap < J && a[ap] < amax * (1.0 - 1e-10)) {
                    r.pass = false;
                    r.detail += fmt(" alpha peak missed at i=%d x=%g;", i, x);
                }
                if (bp < J && b[bp] < bmax * (1.0 - 1e-10)) {
                    r.pass = false;
                    r.detail += fmt(" beta peak missed at i=%d x=%g;", i, x);
                }
            }
        }
    }
    if (worst > 1e-10) r.pass = false;
    if (r.pass) r.detail = fmt("60 lattice points, worst identity error=%.3g", worst);
    return r;
}

CheckResult check_wedge_identity() {
    CheckResult r{7, "wedge-identity", true, "", 0};
    SplitMix64 g(424242);
    double worst = 0.0;
    for (int pair = 0; pair < 100; ++pair) {
        const int i = 1 + pair % 4;
        auto make = [&](double atom, double tail) {
            PartitionMeasure mu;
            mu.i = i;
            mu.atom1 = atom;
            mu.tail_mass_bound = tail;
            const std::size_t J = 20 + (g.next_u64() % 40);
            mu.coeffs.resize(J);
            double mass = 0.0;
            for (std::size_t l = 0; l < J; ++l) {
                mu.coeffs[l] = g.next_double();
                mass += mu.coeffs[l] * cell_length(i, l);
            }
            const double scale = (1.0 - atom - tail) / mass;
            for (double& c : mu.coeffs) c *= scale;
            mu.validate();
            return mu;
        };
        const double am = 0.3 * g.next_double(), tm = 1e-4 * g.next_double();
        const double an = 0.3 * g.next_double(), tn = 1e-4 * g.next_double();
        const PartitionMeasure mu = make(am, tm), nu = make(an, tn);
        const double tv = tv_distance(mu, nu);
        const double wedge = lattice_min_mass(mu, nu);
        worst = std::max(worst, std::abs(tv - 2.0 * (1.0 - wedge) + tm + tn));
    }
    r.pass = worst <= 1e-9;
    r.detail = fmt("100 pairs, worst |tv - 2(1-wedge) + tails|=%.3g (need <= 1e-9)", worst);
    return r;
}

CheckResult check_bernstein_rate() {
    CheckResult r{8, "bernstein-rate", true, "", 0};
    double worst_rel = 0.0;
    for (int k = 2; k <= 6; ++k) {
        const double lam = bernstein_third_eigenvalue(k);
        const ConvergenceReport rep = bernstein_rate_probe(
            k, [](double t) { return t * t; }, "t^2", 400, 1e-2);
        if (!rep.rate || rep.verdict != Verdict::converges) {
            r.pass = false;
            r.detail += fmt(" k=%d no geometric rate;", k);
            continue;
        }
        worst_rel = std::max(worst_rel, std::abs(*rep.rate - lam) / lam);
    }
    if (worst_rel > 0.05) r.pass = false;
    if (r.pass) r.detail = fmt("k=2..6, worst |rate-eig|/eig=%.3g (need <= 0.05)", worst_rel);
    return r;
}

CheckResult check_mkz_limit() {
    CheckResult r{9, "mkz-limit", true, "", 0};
    int worst_m = -1;
    for (int i : {1, 2}) {
        const std::vector<double> grid = standard_grid(i);
        std::vector<double> f, target;
        for (double t : grid) {
            f.push_back(t * t);
            target.push_back(t);  // affine interpolant of t^2
        }
        const GridRun run = run_to_target(OperatorSpec{OperatorSpec::Kind::MKZ, i, 1e-6}, grid,
                                          f, target, 5000, 1e-3);
        if (run.mstar < 0) {
            r.pass = false;
            r.detail += fmt(" i=%d stuck at %.3g;", i, run.final_sup);
        }
        worst_m = std::max(worst_m, run.mstar);
    }
    if (r.pass) r.detail = fmt("worst m*=%d of 5000", worst_m);
    return r;
}

CheckResult check_echo() {
    CheckResult r{10, "echo-law", true, "", 0};
    int worst_m = -1;
    for (int i : {1, 2}) {
        const OperatorSpec spec{OperatorSpec::Kind::Kantorovich, i, 1e-6};
        const std::vector<double> grid = standard_grid(i);
        GridIterator it(spec, grid);
        for (const BankEntry& b : observable_bank()) {
            std::vector<double> f;
            for (double t : grid) f.push_back(b.poly(t));
            std::vector<double> echo = it.step(f);
            for (std::size_t g = 0; g < grid.size(); ++g) echo[g] -= f[g];
            const GridRun run = run_to_target(spec, grid, echo, {}, 2000, 1e-3);
            if (run.mstar < 0) {
                r.pass = false;
                r.detail += fmt(" i=%d f=%s stuck at %.3g;", i, b.id.c_str(), run.final_sup);
            }
            worst_m = std::max(worst_m, run.mstar);
        }
    }
    if (r.pass) r.detail = fmt("24 echoes vanish, worst m*=%d of 2000", worst_m);
    return r;
}

CheckResult check_disc() {
    CheckResult r{11, "disc-agreement", true, "", 0};
    constexpr std::size_t n = 1'000'000;
    constexpr std::uint64_t seed = 20260816;
    const DiscObservable f = [](const DiscState& z) { return z.abs2(); };

    auto run = [&](DiscState z0, std::uint64_t stream) {
        const std::vector<DiscState> traj = disc_trajectory(z0, n, seed, stream);
        double worst = 0.0;
        for (const DiscState& z : traj) worst = std::max(worst, z.abs2());
        // batch means over the tail, skipping a 10% burn-in
        const std::size_t lo = n / 10;
        const std::size_t B = 100, len = (traj.size() - lo) / B;
        std::vector<double> bm(B, 0.0);
        double mean = 0.0;
        for (std::size_t b = 0; b < B; ++b) {
            for (std::size_t k = 0; k < len; ++k) bm[b] += f(traj[lo + b * len + k]);
            bm[b] /= static_cast<double>(len);
            mean += bm[b];
        }
        mean /= static_cast<double>(B);
        double var = 0.0;
        for (double v : bm) var += (v - mean) * (v - mean);
        var /= static_cast<double>(B - 1);
        return std::tuple{mean, std::sqrt(var / static_cast<double>(B)), worst};
    };

    const auto [a1, se1, w1] = run({0.0, 0.0}, 0);
    const auto [a2, se2, w2] = run({0.4, 0.3}, 1);
    const double diff = std::abs(a1 - a2), band = 3.0 * std::hypot(se1, se2);
    if (diff > band) {
        r.pass = false;
        r.detail += fmt(" means %.5f vs %.5f differ beyond %.5f;", a1, a2, band);
    }
    if (std::max(w1, w2) > 1.0 + 1e-12) {
        r.pass = false;
        r.detail += " state left the disc;";
    }
    const std::vector<DiscState> fixed = disc_trajectory({1.0, 0.0}, 1000, seed, 2);
    for (const DiscState& z : fixed)
        if (z.re != 1.0 || z.im != 0.0) {
            r.pass = false;
            r.detail += " boundary start moved;";
            break;
        }
    if (r.pass)
        r.detail = fmt("avg |z|^2: %.5f vs %.5f, |diff|=%.2g <= 3SE=%.2g, boundary fixed", a1,
                       a2, diff, band);
    return r;
}

// the reproducibility bundle: a fixed set of outputs generated end to end
std::string canonical_bundle() {
    std::ostringstream os;
    const io::Config cfg{{"suite", "selfcheck"}, {"seed", "424242"}};

    const ConvergenceReport rep = uniform_convergence_probe(
        OperatorSpec{OperatorSpec::Kind::Kantorovich, 1, 1e-6},
        [](double t) { return 3 * t * t - 4 * t; }, "3*t^2-4*t", 2000, 1e-2);
    io::write_report_csv(os, rep, cfg);
    os << io::report_json(rep, cfg);

    const std::vector<double> xs{0.9, 0.99};
    const std::vector<GapEntry> det = gap02_detail(1, xs);
    io::write_gap_csv(os, det, cfg);
    os << io::gap_json(1, gap02_survey(1, xs), det, cfg);

    io::write_dual_csv(os, dual_convergence_probe(1, 0.5, 60, 1e-6), cfg);
    io::write_measure_csv(os, delta_image(1, 0.5, 1e-8), cfg);

    io::write_trajectory_csv(os, disc_trajectory({0.4, 0.3}, 2000, 424242, 7), cfg);
    io::write_average_csv(
        os, disc_cesaro([](const DiscState& z) { return z.abs2(); }, {0.4, 0.3}, 2000, 424242, 7),
        cfg);
    return os.str();
}

CheckResult check_reproducibility() {
    CheckResult r{12, "reproducibility", true, "", 0};
    const std::string first = canonical_bundle();
    const std::string second = canonical_bundle();
    r.pass = first == second && !first.empty();
    r.detail = r.pass ? fmt("two runs byte-identical (%zu bytes)", first.size())
                      : "bundle differs between runs";
    return r;
}

} // namespace

std::vector<CheckResult> run_acceptance(std::ostream& os, const std::vector<int>& ids) {
    using Fn = CheckResult (*)();
    const Fn checks[] = {check_dichotomy,   check_stochasticity, check_lambda_invariance,
                         check_dual_stability, check_gap_survey,  check_weight_laws,
                         check_wedge_identity, check_bernstein_rate, check_mkz_limit,
                         check_echo,        check_disc,          check_reproducibility};
    std::vector<CheckResult> out;
    for (int id = 1; id <= 12; ++id) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), id) == ids.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r = checks[id - 1]();
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        os << (r.pass ? "[PASS] " : "[FAIL] ") << (r.id < 10 ? "0" : "") << r.id << " "
           << r.name << "  " << r.detail << "  (" << fmt("%.2f", r.seconds) << "s)\n";
        os.flush();
        out.push_back(std::move(r));
    }
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const CheckResult& r : results)
        if (!r.pass) return false;
    return !results.empty();
}

} // namespace kanto
