#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "modsynth/types.hpp"

namespace modsynth {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a root seed and a path of indices,
/// e.g. derive_seed(run_seed, {generation, individual, stage}).
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t s = splitmix64(root);
    for (auto p : path) {
        s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return s;
}

// Named sub-streams of the run seed.
enum class Stream : std::uint64_t { init = 1, crossover = 2, mutation = 3, ik = 4, planner = 5, evaluation = 6, tasks = 7 };

inline std::uint64_t stream_seed(std::uint64_t root, Stream s)
{
    return derive_seed(root, {static_cast<std::uint64_t>(s)});
}

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

/// Uniformly distributed rotation (Shoemake).
inline Quat random_rotation(Rng& rng)
{
    const double u1 = uniform(rng, 0.0, 1.0);
    const double u2 = uniform(rng, 0.0, 2.0 * M_PI);
    const double u3 = uniform(rng, 0.0, 2.0 * M_PI);
    const double a = std::sqrt(1.0 - u1);
    const double b = std::sqrt(u1);
    Quat q(a * std::cos(u2), a * std::sin(u2), b * std::sin(u3), b * std::cos(u3));
    q.normalize();
    return q;
}

}  // namespace modsynth
