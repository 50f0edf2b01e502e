#pragma once

// Deterministic 64-bit primality. The witness set {2, 325, 9375, 28178,
// 450775, 9780504, 1795265022} is exact for every n < 2^64 (Sinclair's set,
// verified against the Feitsma pseudoprime database), so the answer is never
// probabilistic.

#include <cstdint>

#include "c3/wide_uint.hpp"

namespace c3 {

constexpr u64 mulmod(u64 a, u64 b, u64 m) {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

constexpr u64 powmod(u64 base, u64 exp, u64 m) {
    u64 r = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1) r = mulmod(r, base, m);
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    return r;
}

namespace detail {

constexpr bool sprp(u64 n, u64 a, u64 d, int s) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

} // namespace detail

/// Exact primality for any 64-bit n.
constexpr bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) { d >>= 1; ++s; }
    for (u64 a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull, 1795265022ull}) {
        a %= n;
        if (a == 0) continue;
        if (!detail::sprp(n, a, d, s)) return false;
    }
    return true;
}

/// Smallest prime strictly greater than n.
constexpr u64 next_prime(u64 n) {
    if (n < 2) return 2;
    u64 c = n + 1 + (n & 1);   // first odd candidate > n
    while (!is_prime_u64(c)) c += 2;
    return c;
}

/// Modular inverse of a modulo m (gcd(a, m) must be 1), by extended Euclid.
/// 128-bit because lcm(p', q') can exceed 2^63 near the top of the range.
constexpr u128 mod_inverse(u128 a, u128 m) {
    i128 t = 0, new_t = 1;
    i128 r = static_cast<i128>(m), new_r = static_cast<i128>(a % m);
    while (new_r != 0) {
        i128 qq = r / new_r;
        i128 tmp = t - qq * new_t;
        t = new_t; new_t = tmp;
        tmp = r - qq * new_r;
        r = new_r; new_r = tmp;
    }
    if (t < 0) t += static_cast<i128>(m);
    return static_cast<u128>(t);
}

} // namespace c3
