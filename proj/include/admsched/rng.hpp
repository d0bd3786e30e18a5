#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace admsched {

// All randomness goes through mt19937_64 plus the hand-written transforms
// below; the std:: distributions are implementation-defined and would break
// byte-identical output across standard libraries.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Engine for the named stream `name` of run `seed`. Different names give
/// statistically independent streams, so e.g. the arrival sequence does not
/// depend on which scheduler consumes the "scheduler" stream.
inline Engine make_stream(std::uint64_t seed, std::string_view name)
{
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = seed ^ h;
    std::seed_seq seq{
        static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state)),
        static_cast<std::uint32_t>(splitmix64(state)), static_cast<std::uint32_t>(splitmix64(state))};
    return Engine(seq);
}

/// Uniform double in [0,1) with 53 random bits.
inline double uniform01(Engine& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n). n must be positive.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n)
{
    const std::uint64_t limit = n * ((~std::uint64_t{0}) / n); // largest multiple of n
    for (;;) {
        const std::uint64_t v = eng();
        if (v < limit)
            return v % n;
    }
}

using u128 = unsigned __int128;

inline u128 uniform_below(Engine& eng, u128 n)
{
    if (n >> 64 == 0)
        return uniform_below(eng, static_cast<std::uint64_t>(n));
    const u128 all = ~u128{0};
    const u128 limit = all - (all % n);
    for (;;) {
        const u128 v = (static_cast<u128>(eng()) << 64) | eng();
        if (v < limit)
            return v % n;
    }
}

/// Poisson variate by sequential inversion; exact for the means used here
/// (the caller validates mean <= 500 so that exp(-mean) does not underflow).
inline std::uint64_t poisson(Engine& eng, double mean)
{
    if (mean <= 0.0)
        return 0;
    const double u = uniform01(eng);
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u >= cdf) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p == 0.0 && cdf <= u) // numerical tail exhausted
            break;
    }
    return k;
}

/// Geometric variate on {0,1,2,...} with P(k) = (1-q) q^k.
inline std::uint64_t geometric(Engine& eng, double q)
{
    if (q <= 0.0)
        return 0;
    const double u = uniform01(eng);
    // inverse CDF: smallest k with 1 - q^{k+1} > u
    return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log(q)));
}

} // namespace admsched
