#include "kanto/discsim.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kanto {

namespace {

constexpr double kBoundaryBand = 1e-15;
constexpr std::size_t kMaxSteps = 10'000'000;

void check_state(const DiscState& u) {
    if (!(u.abs2() <= 1.0 + 1e-12))
        throw std::domain_error("disc: state must lie in the closed unit disc");
}

} // namespace

DiscState disc_step(const DiscState& u, SplitMix64& rng) {
    check_state(u);
    const double a = std::sqrt(u.abs2());
    if (a >= 1.0 - kBoundaryBand) return u;

    double cre = 0.0, cim = 0.0;
    if (a > 0.5) {
        const double s = 2.0 - 1.0 / a;
        cre = s * u.re;
        cim = s * u.im;
    }
    const double rho = (1.0 - a) * std::sqrt(rng.next_double());
    const double th = 2.0 * std::numbers::pi * rng.next_double();
    return {cre + rho * std::cos(th), cim + rho * std::sin(th)};
}

std::vector<DiscState> disc_trajectory(DiscState z0, std::size_t n, std::uint64_t seed,
                                       std::uint64_t stream_id) {
    check_state(z0);
    if (n > kMaxSteps) throw std::domain_error("disc_trajectory: n must be <= 10^7");
    SplitMix64 rng(seed, stream_id);
    std::vector<DiscState> out;
    out.reserve(n + 1);
    out.push_back(z0);
    for (std::size_t k = 0; k < n; ++k) out.push_back(disc_step(out.back(), rng));
    return out;
}

std::vector<double> disc_cesaro(const DiscObservable& f, DiscState z0, std::size_t n,
                                std::uint64_t seed, std::uint64_t stream_id) {
    check_state(z0);
    if (n > kMaxSteps) throw std::domain_error("disc_cesaro: n must be <= 10^7");
    SplitMix64 rng(seed, stream_id);
    std::vector<double> avg;
    avg.reserve(n + 1);
    DiscState z = z0;
    double sum = f(z);
    avg.push_back(sum);
    for (std::size_t k = 1; k <= n; ++k) {
        z = disc_step(z, rng);
        sum += f(z);
        avg.push_back(sum / static_cast<double>(k + 1));
    }
    return avg;
}

} // namespace kanto
