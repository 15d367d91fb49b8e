#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "kanto/rng.hpp"

namespace kanto {

struct DiscState {
    double re = 0.0;
    double im = 0.0;

    double abs2() const { return re * re + im * im; }
};

using DiscObservable = std::function<double(const DiscState&)>;

// One step of the disc diffusion. States with |u| >= 1 - 1e-15 are fixed
// (the kernel radius has shrunk past measurability). Interior states draw
// uniformly from the ball of radius 1-|u| centered at the origin when
// |u| <= 1/2, else at (2 - 1/|u|)u; either ball stays inside the closed
// disc. Consumes exactly two uniforms: radius via sqrt, angle direct.
DiscState disc_step(const DiscState& u, SplitMix64& rng);

// length n+1, starting at z0; the stream (seed, stream_id) determines the
// path completely, independent of platform
std::vector<DiscState> disc_trajectory(DiscState z0, std::size_t n, std::uint64_t seed,
                                       std::uint64_t stream_id = 0);

// running averages (1/(m+1)) sum_{k<=m} f(xi_k) along one trajectory
std::vector<double> disc_cesaro(const DiscObservable& f, DiscState z0, std::size_t n,
                                std::uint64_t seed, std::uint64_t stream_id = 0);

} // namespace kanto
