#pragma once

// 128-bit unsigned arithmetic for the enumeration range (n < 10^25 < 2^84).
// Fixed width keeps the hot path allocation-free; there is deliberately no
// general big-integer type here.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace c3 {

using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;
using i128 = __int128;

/// Value type for n, n', X and products of 64-bit factors.
using WideUint = u128;

inline constexpr u128 U128_MAX = ~static_cast<u128>(0);

/// Exact product of two 64-bit values; cannot overflow.
constexpr u128 mul_wide(u64 a, u64 b) {
    return static_cast<u128>(a) * b;
}

/// a*b with overflow check. Returns false (and leaves out untouched) on overflow.
constexpr bool mul_checked(u128 a, u128 b, u128& out) {
    if (a != 0 && b > U128_MAX / a) return false;
    out = a * b;
    return true;
}

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    char buf[40];
    int pos = 40;
    while (v != 0) {
        buf[--pos] = static_cast<char>('0' + static_cast<unsigned>(v % 10));
        v /= 10;
    }
    return std::string(buf + pos, 40 - pos);
}

/// Parses a plain decimal integer (no sign, no exponent, no separators).
inline u128 parse_u128(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    u128 v = 0;
    for (char c : s) {
        if (c < '0' || c > '9')
            throw std::invalid_argument("invalid decimal digit in \"" + std::string(s) + "\"");
        u128 d = static_cast<u128>(c - '0');
        if (v > (U128_MAX - d) / 10)
            throw std::out_of_range("decimal value exceeds 128 bits: \"" + std::string(s) + "\"");
        v = v * 10 + d;
    }
    return v;
}

inline u64 parse_u64(std::string_view s) {
    u128 v = parse_u128(s);
    if (v > std::numeric_limits<u64>::max())
        throw std::out_of_range("value exceeds 64 bits: \"" + std::string(s) + "\"");
    return static_cast<u64>(v);
}

/// Floor square root, exact for the whole u128 range.
inline u64 isqrt(u128 n) {
    if (n == 0) return 0;
    // long double has a 64-bit significand; seed then correct.
    u128 r = static_cast<u128>(sqrtl(static_cast<long double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return static_cast<u64>(r);
}

inline u64 isqrt(u64 n) { return isqrt(static_cast<u128>(n)); }

namespace detail {
// r^k, saturating at U128_MAX (enough to compare against any real n).
constexpr u128 pow_sat(u128 r, unsigned k) {
    u128 acc = 1;
    for (unsigned i = 0; i < k; ++i) {
        if (!mul_checked(acc, r, acc)) return U128_MAX;
    }
    return acc;
}
} // namespace detail

/// Floor k-th root: result r satisfies r^k <= n < (r+1)^k.
inline u64 integer_root(u128 n, unsigned k) {
    if (k == 0) throw std::invalid_argument("integer_root: k must be >= 1");
    if (k == 1) {
        if (n > std::numeric_limits<u64>::max())
            throw std::out_of_range("integer_root: first root of n exceeds 64 bits");
        return static_cast<u64>(n);
    }
    if (k == 2) return isqrt(n);
    if (n == 0) return 0;
    u64 r = static_cast<u64>(powl(static_cast<long double>(n), 1.0L / k));
    // correct the float seed in both directions
    while (r > 0 && detail::pow_sat(r, k) > n) --r;
    while (detail::pow_sat(static_cast<u128>(r) + 1, k) <= n) ++r;
    return r;
}

/// Smallest m with 2*m^2 >= n, i.e. ceil(sqrt(n/2)) for odd n as well.
inline u64 ceil_sqrt_half(u128 n) {
    u64 m = isqrt((n + 1) / 2);
    while (static_cast<u128>(m) * m * 2 < n) ++m;
    while (m > 0 && static_cast<u128>(m - 1) * (m - 1) * 2 >= n) --m;
    return m;
}

constexpr u64 gcd_u64(u64 a, u64 b) {
    while (b != 0) {
        u64 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

constexpr u128 gcd_u128(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

} // namespace c3
