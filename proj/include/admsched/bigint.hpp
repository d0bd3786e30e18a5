#pragma once

#include "admsched/rng.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>

namespace admsched {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Natural log of a positive integer of any size.
inline double log_of(const BigInt& v)
{
    if (v <= 0)
        return -HUGE_VAL;
    const auto bits = boost::multiprecision::msb(v) + 1;
    if (bits <= 1000)
        return std::log(v.convert_to<double>());
    const auto shift = bits - 64;
    const BigInt top = v >> shift;
    return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline double log_of(std::uint64_t v)
{
    return std::log(static_cast<double>(v));
}

inline double x_log_x(std::uint64_t v)
{
    return v > 1 ? static_cast<double>(v) * std::log(static_cast<double>(v)) : 0.0;
}

inline double x_log_x(const BigInt& v)
{
    if (v <= 1)
        return 0.0;
    if (boost::multiprecision::msb(v) < 53)
        return x_log_x(v.convert_to<std::uint64_t>());
    const double l = log_of(v);
    return std::exp(std::log(l) + l);
}

inline double to_double(const Rational& q)
{
    return q.convert_to<double>();
}

inline BigInt to_bigint(u128 v)
{
    BigInt out = static_cast<std::uint64_t>(v >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(v);
    return out;
}

inline BigInt to_bigint(const BigInt& v)
{
    return v;
}

/// Uniform integer in [0, n), n > 0, by rejection on random 64-bit limbs.
inline BigInt uniform_below(Engine& eng, const BigInt& n)
{
    const auto bits = boost::multiprecision::msb(n) + 1;
    const auto limbs = (bits + 63) / 64;
    const auto excess = limbs * 64 - bits;
    for (;;) {
        BigInt v = 0;
        for (std::size_t i = 0; i < limbs; ++i) {
            v <<= 64;
            v += eng();
        }
        v >>= excess;
        if (v < n)
            return v;
    }
}

} // namespace admsched
