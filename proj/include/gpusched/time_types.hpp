#pragma once

#include <cstdint>
#include <limits>

namespace gpusched {

/// All analysis and simulation time is kept in integer microseconds so that
/// fixed points are exact and event traces are deterministic.
using duration_us = std::int64_t;
using time_us = std::int64_t;

constexpr duration_us kNoTime = std::numeric_limits<duration_us>::max();

/// Ceiling of a/b for a >= 0, b > 0. Negative numerators clamp to zero,
/// which is the right reading for interference windows.
constexpr std::int64_t ceil_div(std::int64_t a, std::int64_t b)
{
    if (a <= 0)
        return 0;
    return (a + b - 1) / b;
}

constexpr std::int64_t gcd_i64(std::int64_t a, std::int64_t b)
{
    while (b != 0) {
        std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Least common multiple, saturating at `cap` to keep hyperperiods of
/// co-prime periods from overflowing.
constexpr std::int64_t lcm_capped(std::int64_t a, std::int64_t b, std::int64_t cap)
{
    if (a == 0 || b == 0)
        return 0;
    std::int64_t g = gcd_i64(a, b);
    std::int64_t q = a / g;
    if (q > cap / b)
        return cap;
    std::int64_t l = q * b;
    return l > cap ? cap : l;
}

} // namespace gpusched
