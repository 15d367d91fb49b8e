#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "kanto/discsim.hpp"
#include "kanto/rng.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace {

double dist(const kanto::DiscState& a, const kanto::DiscState& b) {
    return std::hypot(a.re - b.re, a.im - b.im);
}

} // namespace

TEST_CASE("trajectories are reproducible and stream-separated") {
    const kanto::DiscState z0{0.4, 0.3};
    const auto a = kanto::disc_trajectory(z0, 500, 2026, 0);
    const auto b = kanto::disc_trajectory(z0, 500, 2026, 0);
    REQUIRE(a.size() == 501);
    CHECK(a.front().re == 0.4);
    CHECK(a.front().im == 0.3);
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].re == b[k].re);
        CHECK(a[k].im == b[k].im);
    }
    const auto c = kanto::disc_trajectory(z0, 500, 2026, 1);
    const auto d = kanto::disc_trajectory(z0, 500, 2027, 0);
    bool same_c = true, same_d = true;
    for (std::size_t k = 1; k < a.size(); ++k) {
        same_c = same_c && a[k].re == c[k].re && a[k].im == c[k].im;
        same_d = same_d && a[k].re == d[k].re && a[k].im == d[k].im;
    }
    CHECK_FALSE(same_c);
    CHECK_FALSE(same_d);
}

TEST_CASE("the trajectory is the fold of disc_step over one stream") {
    const kanto::DiscState z0{-0.2, 0.55};
    const auto traj = kanto::disc_trajectory(z0, 300, 77, 5);
    kanto::SplitMix64 rng(77, 5);
    kanto::DiscState z = z0;
    for (std::size_t k = 1; k < traj.size(); ++k) {
        z = kanto::disc_step(z, rng);
        CHECK(traj[k].re == z.re);
        CHECK(traj[k].im == z.im);
    }
}

TEST_CASE("boundary states are fixed points that consume no randomness") {
    const auto traj = kanto::disc_trajectory({1.0, 0.0}, 50, 9, 0);
    for (const auto& s : traj) {
        CHECK(s.re == 1.0);
        CHECK(s.im == 0.0);
    }
    // a state within the boundary band is also pinned
    kanto::SplitMix64 rng(1);
    const kanto::DiscState edge{std::sqrt(1.0 - 1e-16), 0.0};
    const auto out = kanto::disc_step(edge, rng);
    CHECK(out.re == edge.re);
    CHECK(out.im == edge.im);
    // and the generator was not advanced
    kanto::SplitMix64 fresh(1);
    CHECK(rng.next_u64() == fresh.next_u64());
}

TEST_CASE("one step lands in the advertised ball") {
    kanto::SplitMix64 rng(31337, 2);

    // |u| = 3/4 > 1/2: ball of radius 1/4 around (2 - 1/|u|) u = (2/3) u
    const kanto::DiscState u{0.45, 0.6};
    REQUIRE(std::sqrt(u.abs2()) == doctest::Approx(0.75).epsilon(1e-15));
    const kanto::DiscState center{2.0 / 3.0 * 0.45, 2.0 / 3.0 * 0.6};
    for (int trial = 0; trial < 3000; ++trial) {
        const auto v = kanto::disc_step(u, rng);
        CHECK(dist(v, center) <= 0.25 + 1e-14);
        CHECK(v.abs2() <= 1.0 + 1e-14);
    }

    // |u| <= 1/2: ball of radius 1 - |u| around the origin
    const kanto::DiscState w{0.18, -0.24};  // |w| = 0.3
    for (int trial = 0; trial < 3000; ++trial) {
        const auto v = kanto::disc_step(w, rng);
        CHECK(std::sqrt(v.abs2()) <= 0.7 + 1e-14);
    }
}

TEST_CASE("the closed disc is invariant along long runs") {
    for (const auto& z0 : {kanto::DiscState{0.0, 0.0}, kanto::DiscState{0.7, -0.7}}) {
        const auto traj = kanto::disc_trajectory(z0, 100000, 424242, 3);
        double worst = 0.0;
        for (const auto& s : traj) worst = std::max(worst, s.abs2());
        CHECK(worst <= 1.0 + 1e-12);
    }
}

TEST_CASE("cesaro averages fold the observable along the same path") {
    const kanto::DiscState z0{0.4, 0.3};
    const auto f = [](const kanto::DiscState& s) { return s.abs2(); };
    const auto avg = kanto::disc_cesaro(f, z0, 400, 99, 1);
    REQUIRE(avg.size() == 401);

    const auto traj = kanto::disc_trajectory(z0, 400, 99, 1);
    double sum = f(traj[0]);
    CHECK(avg[0] == sum);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        sum += f(traj[k]);
        CHECK(avg[k] == sum / static_cast<double>(k + 1));
    }

    // a constant observable averages to itself exactly
    const auto ones = kanto::disc_cesaro([](const kanto::DiscState&) { return 1.0; },
                                         {0.1, 0.1}, 200, 5, 0);
    for (double v : ones) CHECK(v == 1.0);
}

TEST_CASE("long-run averages of |z|^2 are insensitive to the start and the stream") {
    const auto f = [](const kanto::DiscState& s) { return s.abs2(); };
    const auto a = kanto::disc_cesaro(f, {0.0, 0.0}, 200000, 20260816, 0);
    const auto b = kanto::disc_cesaro(f, {0.6, -0.5}, 200000, 20260816, 1);
    CHECK(std::abs(a.back() - b.back()) <= 0.01);
    CHECK(a.back() > 0.1);
    CHECK(a.back() < 0.35);
}

TEST_CASE("state and size contracts") {
    kanto::SplitMix64 rng(4);
    CHECK_THROWS_AS(kanto::disc_step({1.2, 0.0}, rng), std::domain_error);
    CHECK_THROWS_AS(kanto::disc_trajectory({0.9, 0.9}, 10, 1, 0), std::domain_error);
    CHECK_THROWS_AS(kanto::disc_trajectory({0.0, 0.0}, 10000001, 1, 0), std::domain_error);
    CHECK_THROWS_AS(
        kanto::disc_cesaro([](const kanto::DiscState&) { return 0.0; }, {0.0, 0.0}, 10000001, 1,
                           0),
        std::domain_error);
}
