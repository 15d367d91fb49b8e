#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kanto/errors.hpp"
#include "kanto/grid.hpp"
#include "kanto/polynomial.hpp"
#include "kanto/quadrature.hpp"
#include "kanto/rng.hpp"
#include "kanto/seqcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

// ---------------------------------------------------------------------------
// Oracles. Everything the library computes through log-gamma, recurrences or
// closed forms is recomputed here from first principles: Pascal's triangle by
// the additive recurrence, tails by direct long double summation, integrals
// from exact rational antiderivatives. No oracle calls back into the library.
// ---------------------------------------------------------------------------

namespace {

// Pascal's triangle in __int128; exact up to n ~ 120 (C(120,60) < 2^127).
__int128 pascal(int n, int k) {
    if (k < 0 || k > n) return 0;
    static std::vector<std::vector<__int128>> rows = {{1}};
    while (static_cast<int>(rows.size()) <= n) {
        const auto& prev = rows.back();
        std::vector<__int128> row(prev.size() + 1, 1);
        for (std::size_t j = 1; j + 1 < row.size(); ++j) row[j] = prev[j - 1] + prev[j];
        rows.push_back(std::move(row));
    }
    return rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

long double pascal_ld(int n, int k) { return static_cast<long double>(pascal(n, k)); }

// beta_j = C(i+j-1, j) (1-x)^i x^j by the term recurrence, in long double
std::vector<long double> beta_brute(int i, long double x, std::size_t J) {
    std::vector<long double> b(J);
    long double term = powl(1.0L - x, i);
    for (std::size_t j = 0; j < J; ++j) {
        b[j] = term;
        term *= (static_cast<long double>(i) + static_cast<long double>(j)) /
                (static_cast<long double>(j) + 1.0L) * x;
    }
    return b;
}

// sum_{j >= J} beta_j summed term by term until the remainder is negligible
long double beta_tail_brute(int i, long double x, std::size_t J) {
    long double term = powl(1.0L - x, i);
    for (std::size_t j = 0; j < J; ++j)
        term *= (static_cast<long double>(i) + static_cast<long double>(j)) /
                (static_cast<long double>(j) + 1.0L) * x;
    long double acc = 0.0L;
    for (std::size_t j = J; j < J + 20000000; ++j) {
        acc += term;
        const long double ratio = (static_cast<long double>(i) + static_cast<long double>(j)) /
                                  (static_cast<long double>(j) + 1.0L) * x;
        term *= ratio;
        if (ratio < 1.0L && term / (1.0L - ratio) < acc * 1e-25L + 1e-4900L) break;
    }
    return acc;
}

// smallest j with x in [j/(i+j), (j+1)/(i+j+1)), by linear scan
std::size_t pivot_brute(int i, double x) {
    for (std::size_t j = 0;; ++j) {
        const double lo = static_cast<double>(j) / static_cast<double>(i + j);
        const double hi = static_cast<double>(j + 1) / static_cast<double>(i + j + 1);
        if (x >= lo && x < hi) return j;
    }
}

double poly_eval_brute(const std::vector<double>& c, double t) {
    long double acc = 0.0L, p = 1.0L;
    for (double ck : c) {
        acc += static_cast<long double>(ck) * p;
        p *= t;
    }
    return static_cast<double>(acc);
}

// exact rational \int_a^b sum c_p t^p dt in long double
long double poly_integral_brute(const std::vector<double>& c, long double a, long double b) {
    long double acc = 0.0L;
    for (std::size_t p = 0; p < c.size(); ++p)
        acc += static_cast<long double>(c[p]) / static_cast<long double>(p + 1) *
               (powl(b, static_cast<long double>(p + 1)) - powl(a, static_cast<long double>(p + 1)));
    return acc;
}

const std::vector<double> kXLattice = {0.01, 0.1, 0.25, 1.0 / 3.0, 0.5, 0.6,
                                       0.75, 0.9,  0.95, 0.99,     0.999};

} // namespace

// ---------------------------------------------------------------------------
// seqcore
// ---------------------------------------------------------------------------

TEST_CASE("binomial_exact matches Pascal's triangle") {
    for (int n = 0; n <= 70; ++n)
        for (int k = 0; k <= n; ++k) CHECK(kanto::binomial_exact(n, k) == pascal(n, k));
}

TEST_CASE("log_binomial matches Pascal's triangle in log scale") {
    for (int n = 0; n <= 120; n += (n < 30 ? 1 : 7)) {
        for (int k = 0; k <= n; ++k) {
            const long double ref = logl(pascal_ld(n, k));
            CHECK(kanto::log_binomial(n, k) ==
                  doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
        }
    }
}

TEST_CASE("beta weights match the long double recurrence and sum to 1 minus the tail") {
    for (int i : {1, 2, 3, 5, 8}) {
        for (double x : kXLattice) {
            const std::size_t J = 400;
            const auto b = kanto::beta_weights(i, x, J);
            const auto ref = beta_brute(i, x, J);
            REQUIRE(b.size() == J);
            long double sum = 0.0L;
            for (std::size_t j = 0; j < J; ++j) {
                CHECK(b[j] == doctest::Approx(static_cast<double>(ref[j]))
                                  .epsilon(1e-12)
                                  .scale(1e-300));
                sum += ref[j];
            }
            const long double tail = beta_tail_brute(i, x, J);
            CHECK(static_cast<double>(sum + tail) == doctest::Approx(1.0).epsilon(1e-15));
        }
    }
}

TEST_CASE("alpha and beta are linked by the cell length") {
    for (int i : {1, 2, 4}) {
        for (double x : {0.2, 0.7, 0.95}) {
            const auto a = kanto::alpha_weights(i, x, 200);
            const auto b = kanto::beta_weights(i, x, 200);
            for (std::size_t j = 0; j < 200; ++j)
                CHECK(a[j] * kanto::cell_length(i, j) ==
                      doctest::Approx(b[j]).epsilon(1e-13).scale(1e-300));
        }
    }
}

TEST_CASE("beta_tail_bound dominates the true tail without collapsing") {
    for (int i : {1, 2, 3, 6}) {
        for (double x : {0.1, 0.5, 0.9, 0.99}) {
            for (std::size_t J : {std::size_t{2}, std::size_t{20}, std::size_t{200}}) {
                const long double truth = beta_tail_brute(i, x, J);
                const double bound = kanto::beta_tail_bound(i, x, J);
                CHECK(bound >= static_cast<double>(truth) * (1.0 - 1e-12));
                // the bound is the first tail term over 1-rho; it must stay
                // within the same order of magnitude once rho is safely below 1
                if ((1.0 + (i - 1.0) / (J + 1.0)) * x < 0.9)
                    CHECK(bound <= static_cast<double>(truth) * 20.0 + 1e-300);
            }
        }
    }
}

TEST_CASE("truncation_index is sound and minimal for its own bound") {
    for (int i : {1, 2, 5}) {
        for (double x : {0.0, 0.3, 0.8, 0.99}) {
            for (double eps : {1e-4, 1e-8, 1e-12}) {
                const std::size_t J = kanto::truncation_index(i, x, eps);
                CHECK(kanto::beta_tail_bound(i, x, J) <= eps);
                CHECK(static_cast<double>(beta_tail_brute(i, x, J)) <= eps);
                if (J > 0) CHECK(kanto::beta_tail_bound(i, x, J - 1) > eps);
            }
        }
    }
}

TEST_CASE("pivot_index agrees with the linear scan and satisfies the membership bracket") {
    for (int i : {1, 2, 3, 7}) {
        for (double x : kXLattice) {
            const std::size_t j = kanto::pivot_index(i, x);
            CHECK(j == pivot_brute(i, x));
            CHECK(kanto::partition_point(i, j) <= x);
            CHECK(x < kanto::partition_point(i, j + 1));
        }
        CHECK(kanto::pivot_index(i, 0.0) == 0);
    }
    // x just below a partition point lands in the cell to the left
    const double x = std::nextafter(kanto::partition_point(3, 17), 0.0);
    CHECK(kanto::pivot_index(3, x) == 16);
}

TEST_CASE("argmax formulas attain the maximum weight value") {
    for (int i : {1, 2, 4}) {
        for (double x : {0.4, 0.6, 0.9, 0.99}) {
            if (!(x > 1.0 / (i + 2))) continue;
            const auto [ap, bp] = kanto::argmax_indices(i, x);
            const std::size_t J = std::max(ap, bp) + 10;
            const auto a = kanto::alpha_weights(i, x, J);
            const auto b = kanto::beta_weights(i, x, J);
            const double amax = *std::max_element(a.begin(), a.end());
            const double bmax = *std::max_element(b.begin(), b.end());
            CHECK(a[ap] >= amax * (1.0 - 1e-12));
            CHECK(b[bp] >= bmax * (1.0 - 1e-12));
        }
    }
    CHECK_THROWS_AS(kanto::argmax_indices(1, 0.2), std::domain_error);
}

TEST_CASE("window_mass equals the brute sum over the pivot window") {
    for (int i : {1, 2, 3}) {
        for (double x : {0.5, 0.75, 0.9}) {
            for (double r : {0.25, 0.5, 0.9}) {
                const std::size_t jx = pivot_brute(i, x);
                const auto lo = static_cast<std::size_t>(
                    std::floor((1.0 - r) * static_cast<double>(jx)));
                const auto b = beta_brute(i, x, jx + 1);
                long double ref = 0.0L;
                for (std::size_t j = lo; j <= jx; ++j) ref += b[j];
                CHECK(kanto::window_mass(i, x, r) ==
                      doctest::Approx(static_cast<double>(ref)).epsilon(1e-12));
            }
        }
    }
    CHECK_THROWS_AS(kanto::window_mass(1, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(kanto::window_mass(1, 0.5, 1.0), std::domain_error);
}

TEST_CASE("make_weights is a consistent bundle") {
    const auto w = kanto::make_weights(2, 0.7, 1e-10);
    CHECK(w.J == kanto::truncation_index(2, 0.7, 1e-10));
    CHECK(w.alphas.size() == w.J);
    CHECK(w.betas.size() == w.J);
    CHECK(w.pivot == pivot_brute(2, 0.7));
    CHECK(w.tail_bound <= 1e-10);
    long double mass = 0.0L;
    for (double b : w.betas) mass += b;
    CHECK(static_cast<double>(mass) >= 1.0 - 1e-10 - 1e-13);
    CHECK(static_cast<double>(mass) <= 1.0 + 1e-13);
}

TEST_CASE("weight parameter validation") {
    CHECK_THROWS_AS(kanto::beta_weights(0, 0.5, 10), std::domain_error);
    CHECK_THROWS_AS(kanto::beta_weights(1, -0.1, 10), std::domain_error);
    CHECK_THROWS_AS(kanto::beta_weights(1, 1.0, 10), std::domain_error);
    CHECK_THROWS_AS(kanto::truncation_index(1, 0.5, 0.0), std::domain_error);
}

// ---------------------------------------------------------------------------
// polynomial
// ---------------------------------------------------------------------------

TEST_CASE("polynomial parsing produces the expected coefficients") {
    CHECK(kanto::Polynomial::parse("3*t^2-4*t").coeffs() == std::vector<double>{0.0, -4.0, 3.0});
    CHECK(kanto::Polynomial::parse("t^3").coeffs() == std::vector<double>{0.0, 0.0, 0.0, 1.0});
    CHECK(kanto::Polynomial::parse("-0.5t+1").coeffs() == std::vector<double>{1.0, -0.5});
    CHECK(kanto::Polynomial::parse("2").coeffs() == std::vector<double>{2.0});
    CHECK(kanto::Polynomial::parse("1-t").coeffs() == std::vector<double>{1.0, -1.0});
    CHECK(kanto::Polynomial::parse("t^2-t").coeffs() == std::vector<double>{0.0, -1.0, 1.0});
    CHECK(kanto::Polynomial::parse("30*t^4-60*t^3+36*t^2-6*t").coeffs() ==
          std::vector<double>{0.0, -6.0, 36.0, -60.0, 30.0});
}

TEST_CASE("polynomial parsing rejects malformed input") {
    for (const char* bad : {"", "t^", "2x", "t^-1", "1++t", "^2", "t^1.5", "t t"})
        CHECK_THROWS_AS(kanto::Polynomial::parse(bad), std::domain_error);
}

TEST_CASE("evaluation and integrals match the exact rational forms") {
    const std::vector<std::vector<double>> polys = {
        {0.0, -4.0, 3.0}, {1.0}, {0.0, 1.0}, {0.25, -1.5, 0.0, 2.0}, {0.0, -6.0, 36.0, -60.0, 30.0}};
    for (const auto& c : polys) {
        const kanto::Polynomial p(c);
        for (double t : {0.0, 0.17, 0.5, 0.99, 1.0})
            CHECK(p(t) == doctest::Approx(poly_eval_brute(c, t)).epsilon(1e-14));
        CHECK(p.integral01() ==
              doctest::Approx(static_cast<double>(poly_integral_brute(c, 0.0L, 1.0L)))
                  .epsilon(1e-14)
                  .scale(1.0));
        CHECK(p.integral(0.3, 0.8) ==
              doctest::Approx(static_cast<double>(poly_integral_brute(c, 0.3L, 0.8L)))
                  .epsilon(1e-13)
                  .scale(1.0));
    }
}

TEST_CASE("parse round-trips through to_string") {
    for (const char* id : {"3*t^2-4*t", "2*t^3-3*t^2+t", "1", "t^4", "t^2-t"}) {
        const auto p = kanto::Polynomial::parse(id);
        const auto q = kanto::Polynomial::parse(p.to_string());
        CHECK(q.coeffs() == p.coeffs());
    }
}

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

TEST_CASE("Gauss-Legendre is exact to degree 2n-1") {
    kanto::SplitMix64 rng(0x600dULL);
    for (int n = 1; n <= 8; ++n) {
        std::vector<double> c(static_cast<std::size_t>(2 * n));
        for (auto& ck : c) ck = 2.0 * rng.next_double() - 1.0;
        const kanto::Polynomial p(c);
        const double a = 0.1, b = 0.93;
        const double ref = static_cast<double>(poly_integral_brute(c, a, b));
        const double got = kanto::gauss_legendre([&](double t) { return p(t); }, a, b, n);
        CHECK(got == doctest::Approx(ref).epsilon(1e-13).scale(1.0));
    }
    CHECK_THROWS_AS(kanto::gauss_legendre([](double) { return 1.0; }, 0, 1, 0),
                    std::domain_error);
    CHECK_THROWS_AS(kanto::gauss_legendre([](double) { return 1.0; }, 0, 1, 9),
                    std::domain_error);
}

TEST_CASE("adaptive Simpson hits smooth targets within tolerance") {
    const double ref = std::exp(1.0) - 1.0;
    CHECK(std::abs(kanto::adaptive_simpson([](double t) { return std::exp(t); }, 0, 1, 1e-11) -
                   ref) <= 1e-10);
    const double ref2 = 2.0 / 3.0;  // int_0^1 sqrt(t), endpoint singular derivative
    CHECK(std::abs(kanto::adaptive_simpson([](double t) { return std::sqrt(t); }, 0, 1, 1e-9) -
                   ref2) <= 1e-8);
    CHECK_THROWS_AS(kanto::adaptive_simpson([](double) { return 1.0; }, 0, 1, 0.0),
                    std::domain_error);
}

TEST_CASE("adaptive Simpson reports an unreachable tolerance instead of lying") {
    const double c = 1.0 / std::numbers::sqrt2;
    const auto step = [c](double t) { return t > c ? 1.0 : 0.0; };
    CHECK_THROWS_AS(kanto::adaptive_simpson(step, 0, 1, 1e-12), kanto::accuracy_error);
    try {
        kanto::adaptive_simpson(step, 0, 1, 1e-12);
    } catch (const kanto::accuracy_error& e) {
        CHECK(e.achieved_bound > 0.0);
    }
}

// ---------------------------------------------------------------------------
// grid
// ---------------------------------------------------------------------------

TEST_CASE("standard_grid contains its advertised landmarks and is strictly increasing") {
    for (int i : {1, 3}) {
        const auto g = kanto::standard_grid(i);
        REQUIRE(g.size() > 300);
        CHECK(g.front() == 0.0);
        CHECK(g.back() == 1.0);
        for (std::size_t k = 1; k < g.size(); ++k) CHECK(g[k] > g[k - 1]);
        const auto has = [&](double t) { return std::binary_search(g.begin(), g.end(), t); };
        CHECK(has(0.5));
        CHECK(has(1.0 - std::pow(2.0, -20)));
        for (std::size_t j = 1; j <= 256; j += 17) CHECK(has(kanto::partition_point(i, j)));
        for (int k = 1; k < 256; k += 31) CHECK(has(k / 256.0));
    }
}

TEST_CASE("grid_segment matches a brute scan") {
    const auto g = kanto::standard_grid(2);
    kanto::SplitMix64 rng(7ULL);
    for (int trial = 0; trial < 2000; ++trial) {
        const double t = rng.next_double();
        const std::size_t s = kanto::grid_segment(g, t);
        CHECK(g[s] <= t);
        if (s + 1 < g.size()) CHECK(t < g[s + 1]);
    }
    CHECK(kanto::grid_segment(g, 0.0) == 0);
    CHECK(kanto::grid_segment(g, 1.0) == g.size() - 1);
}

TEST_CASE("pl_interpolate is exact on the nodes and linear in between") {
    const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0};
    const std::vector<double> vals = {1.0, -2.0, 0.5, 3.0};
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK(kanto::pl_interpolate(grid, vals, grid[k]) == vals[k]);
    CHECK(kanto::pl_interpolate(grid, vals, 0.125) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(kanto::pl_interpolate(grid, vals, 0.75) == doctest::Approx(1.75).epsilon(1e-15));
    // a linear function is reproduced exactly on any grid
    const auto g = kanto::standard_grid(1);
    std::vector<double> lin(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) lin[k] = 2.0 * g[k] - 0.3;
    for (double t : {0.001, 0.33, 0.999, 1.0})
        CHECK(kanto::pl_interpolate(g, lin, t) == doctest::Approx(2.0 * t - 0.3).epsilon(1e-14));
}

TEST_CASE("GridFunction validation rejects bad shapes") {
    kanto::GridFunction f;
    f.grid = {0.0, 0.5, 1.0};
    f.values = {1.0, 2.0};
    CHECK_THROWS_AS(f.validate(), std::domain_error);
    f.values = {1.0, 2.0, 3.0};
    CHECK_NOTHROW(f.validate());
    f.grid = {0.0, 0.5, 0.5, 1.0};
    f.values = {1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_AS(f.validate(), std::domain_error);
    f.grid = {0.0, 0.5, 0.9};
    f.values = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(f.validate(), std::domain_error);
}

// ---------------------------------------------------------------------------
// rng
// ---------------------------------------------------------------------------

TEST_CASE("SplitMix64 streams are reproducible and distinct") {
    kanto::SplitMix64 a(42, 0), b(42, 0), c(42, 1), d(43, 0);
    bool same_ac = true, same_ad = true;
    for (int k = 0; k < 64; ++k) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        same_ac = same_ac && (va == c.next_u64());
        same_ad = same_ad && (va == d.next_u64());
    }
    CHECK_FALSE(same_ac);
    CHECK_FALSE(same_ad);
    kanto::SplitMix64 u(2026);
    for (int k = 0; k < 10000; ++k) {
        const double v = u.next_double();
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}
