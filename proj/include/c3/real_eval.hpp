#pragma once

// Guarded evaluation of the irrational bound expressions.
//
// Every bound used as a hard cutoff is eventually an integer comparison
// "value vs m". The discipline: evaluate in long double first; if the value
// sits inside a guard band around m, re-evaluate at 50 then 120 decimal
// digits; if still inside the band, fall back to an exact algebraic sign
// (possible whenever the expression can actually be rational or a quadratic
// surd). A silent off-by-one on a floor/ceiling is therefore impossible:
// outcomes are exact or a loud exception.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <type_traits>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "c3/wide_uint.hpp"

namespace c3 {

using float50 = boost::multiprecision::cpp_bin_float_50;
using float120 =
    boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>>;
using bigint = boost::multiprecision::cpp_int;
using bigrat = boost::multiprecision::cpp_rational;

template <class R> struct real_tag { using type = R; };

namespace detail {

inline bigint to_bigint(u128 v) {
    bigint hi = static_cast<u64>(v >> 64);
    return (hi << 64) | static_cast<u64>(v);
}

template <class R> R to_real(u128 v) {
    if constexpr (std::is_same_v<R, long double>) {
        return static_cast<long double>(v);
    } else {
        return static_cast<R>(to_bigint(v));
    }
}

template <class R> long double to_ld(const R& v) {
    if constexpr (std::is_same_v<R, long double>) return v;
    else return static_cast<long double>(v);
}

template <class R> constexpr long double rel_err() {
    if (std::is_same_v<R, long double>) return 1e-16L;   // 64-bit significand + op slack
    if (std::is_same_v<R, float50>) return 1e-44L;
    return 1e-112L;
}

inline int sgn(const bigrat& x) { return x == 0 ? 0 : (x < 0 ? -1 : 1); }

inline bool is_square(const bigint& n, bigint& root) {
    if (n < 0) return false;
    root = boost::multiprecision::sqrt(n);
    return root * root == n;
}

} // namespace detail

/// Exact sign of a + b*sqrt(d) for rational a, b and rational d >= 0.
inline int sign_quad(const bigrat& a, const bigrat& b, const bigrat& d) {
    using boost::multiprecision::numerator;
    using boost::multiprecision::denominator;
    if (d < 0) throw std::domain_error("sign_quad: negative radicand");
    if (b == 0 || d == 0) return detail::sgn(a);
    // fold sqrt(p/q) = sqrt(pq)/q
    bigint pq = numerator(d) * denominator(d);
    bigint root;
    if (detail::is_square(pq, root)) {
        bigrat exact = a + b * bigrat(root, denominator(d));
        return detail::sgn(exact);
    }
    int sa = detail::sgn(a), sb = detail::sgn(b);
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    // opposite signs: compare a^2 against b^2 d
    bigrat lhs = a * a, rhs = b * b * d;
    if (lhs == rhs) return 0;
    return (lhs > rhs) ? sa : sb;
}

/// Exact sign of a + b*sqrt(d) + c*sqrt(e), rational a,b,c and d,e >= 0.
inline int sign_biquad(const bigrat& a, const bigrat& b, const bigrat& d,
                       const bigrat& c, const bigrat& e) {
    if (c == 0 || e == 0) return sign_quad(a, b, d);
    if (b == 0 || d == 0) return sign_quad(a, c, e);
    // L := a + b sqrt(d), R := -c sqrt(e); sign(L - R') where value = L + c sqrt(e)
    int sl = sign_quad(a, b, d);
    int sr = detail::sgn(c);   // sign of c*sqrt(e)
    if (sl == 0) return sr;
    if (sr == 0) return sl;
    if (sl == sr) return sl;
    // |L|^2 vs |c sqrt(e)|^2: L^2 = a^2 + b^2 d + 2ab sqrt(d)
    int cmp = sign_quad(a * a + b * b * d - c * c * e, 2 * a * b, d);
    if (cmp == 0) return 0;
    return (cmp > 0) ? sl : sr;
}

/// Exact sign oracle for value - m; nullopt when no exact form applies.
using ExactCmp = std::optional<int> (*)(u128 m, u128 arg1, u128 arg2);

namespace detail {

/// sign(value - m) with precision escalation; `eval` is a generic callable
/// taking real_tag<R>. Throws if even 120 digits plus the exact oracle
/// cannot separate the value from m.
template <class F>
int cmp_to_int(F&& eval, u128 m, std::optional<int> (*exact)(u128, u128, u128),
               u128 a1, u128 a2) {
    auto attempt = [&](auto tag) -> std::optional<int> {
        using R = typename decltype(tag)::type;
        R v = eval(tag);
        R mm = to_real<R>(m);
        R diff = v - mm;
        R mag = v < 0 ? R(-v) : v;
        long double guard = detail::to_ld(mag) * rel_err<R>() + rel_err<R>();
        long double dl = detail::to_ld(diff);
        if (dl > guard) return 1;
        if (dl < -guard) return -1;
        return std::nullopt;
    };
    if (auto r = attempt(real_tag<long double>{})) return *r;
    if (auto r = attempt(real_tag<float50>{})) return *r;
    if (auto r = attempt(real_tag<float120>{})) return *r;
    if (exact) {
        if (auto r = exact(m, a1, a2)) return *r;
    }
    throw std::runtime_error("cmp_to_int: value indistinguishable from integer " +
                             to_string(m));
}

} // namespace detail

/// floor(value), guard-banded. `eval(real_tag<R>{})` evaluates the expression.
template <class F>
u64 guarded_floor(F&& eval, std::optional<int> (*exact)(u128, u128, u128) = nullptr,
                  u128 a1 = 0, u128 a2 = 0) {
    long double v = eval(real_tag<long double>{});
    if (v < 0) throw std::domain_error("guarded_floor: negative value");
    u128 k = static_cast<u128>(llroundl(v));
    // true value lies within (k-1, k+1); decide which side of k
    int c = detail::cmp_to_int(eval, k, exact, a1, a2);
    u128 f = (c >= 0) ? k : k - 1;
    return static_cast<u64>(f);
}

/// ceil(value), guard-banded.
template <class F>
u64 guarded_ceil(F&& eval, std::optional<int> (*exact)(u128, u128, u128) = nullptr,
                 u128 a1 = 0, u128 a2 = 0) {
    long double v = eval(real_tag<long double>{});
    if (v < 0) throw std::domain_error("guarded_ceil: negative value");
    u128 k = static_cast<u128>(llroundl(v));
    int c = detail::cmp_to_int(eval, k, exact, a1, a2);
    u128 f = (c <= 0) ? k : k + 1;
    return static_cast<u64>(f);
}

/// sign(value - m) with the same ladder; for strict/non-strict bound audits.
template <class F>
int guarded_cmp(F&& eval, u128 m, std::optional<int> (*exact)(u128, u128, u128) = nullptr,
                u128 a1 = 0, u128 a2 = 0) {
    return detail::cmp_to_int(eval, m, exact, a1, a2);
}

// ---------------------------------------------------------------------------
// The bound formulas, generic over the evaluation type.
// ---------------------------------------------------------------------------

namespace expr {

template <class R> R nth_root(R x, int k) {
    using std::pow;
    using boost::multiprecision::pow;
    return pow(x, R(1) / k);
}

template <class R> R sqrt_r(R x) {
    using std::sqrt;
    using boost::multiprecision::sqrt;
    return sqrt(x);
}

/// sqrt(p - 3/4)
template <class R> R sqrt_p_minus_34(u128 p) {
    return sqrt_r(detail::to_real<R>(p) - R(3) / 4);
}

/// A given p:  sqrt(3 p') - (1/2)(p'/12)^(1/4)
template <class R> R a_max_given_p(u128 p) {
    R pp = detail::to_real<R>(p - 1);
    return sqrt_r(3 * pp) - nth_root(pp / 12, 4) / 2;
}

/// B given p for Korselt triples: 2p - sqrt(p - 3/4) + (sqrt3 + 1)/(2 sqrt3)
template <class R> R b_max_k3_given_p(u128 p) {
    R s3 = sqrt_r(R(3));
    return 2 * detail::to_real<R>(p) - sqrt_p_minus_34<R>(p) + (s3 + 1) / (2 * s3);
}

/// B given p for all-prime triples: 2p - sqrt(p - 3/4) + (sqrt7 + 1)/(2 sqrt7)
template <class R> R b_max_c3_given_p(u128 p) {
    R s7 = sqrt_r(R(7));
    return 2 * detail::to_real<R>(p) - sqrt_p_minus_34<R>(p) + (s7 + 1) / (2 * s7);
}

/// Duparc's q bound given P: (P-1)(2P + 1/2 - sqrt(P - 3/4)) + 1
template <class R> R q_max_given_P(u128 P) {
    R Pr = detail::to_real<R>(P);
    return (Pr - 1) * (2 * Pr + R(1) / 2 - sqrt_p_minus_34<R>(P)) + 1;
}

/// q given p and X: sqrt(X/p) - sqrt(p/12)
template <class R> R q_max_given_px(u128 p, u128 X) {
    R pr = detail::to_real<R>(p);
    return sqrt_r(detail::to_real<R>(X) / pr) - sqrt_r(pr / 12);
}

/// p given X: X^(1/3) - (4 sqrt3 / 9) X^(1/6)
template <class R> R p_max_given_x(u128 X) {
    R x = detail::to_real<R>(X);
    return nth_root(x, 3) - 4 * sqrt_r(R(3)) / 9 * nth_root(x, 6);
}

/// q given n: 2u^4 - u^3 - u^2/10 + 17u/20 with u = (n/4)^(1/10)
template <class R> R q_max_given_n(u128 n) {
    R u = nth_root(detail::to_real<R>(n) / 4, 10);
    R u2 = u * u;
    return 2 * u2 * u2 - u2 * u - u2 / 10 + 17 * u / 20;
}

/// A given H: 3H - sqrt(H/2)
template <class R> R a_max_given_h(u128 H) {
    R h = detail::to_real<R>(H);
    return 3 * h - sqrt_r(h / 2);
}

/// A given n: sqrt3 n^(1/6) - n^(1/12) / (2 * 12^(1/4))
template <class R> R a_max_given_n(u128 n) {
    R x = detail::to_real<R>(n);
    return sqrt_r(R(3)) * nth_root(x, 6) - nth_root(x, 12) / (2 * nth_root(R(12), 4));
}

/// B given n, mu-parameterised (mu = 3 for Korselt triples, 7 for all-prime):
/// sqrt2 n^(1/4) - (sqrt(mu) - 1/2)(n/4)^(1/8) + (3mu^2 - mu sqrt(mu) + 4mu + 4 sqrt(mu))/(8mu)
template <class R> R b_mu_given_n(u128 n, u128 mu) {
    R x = detail::to_real<R>(n);
    R m = detail::to_real<R>(mu);
    R sm = sqrt_r(m);
    R tail = (3 * m * m - m * sm + 4 * m + 4 * sm) / (8 * m);
    return sqrt_r(R(2)) * nth_root(x, 4) - (sm - R(1) / 2) * nth_root(x / 4, 8) + tail;
}

/// C given p: (p^2 + 2p + sqrt(4p - 3)/2 + 1/2) / 2
template <class R> R c_max_given_p(u128 p) {
    R pr = detail::to_real<R>(p);
    return (pr * pr + 2 * pr + sqrt_r(4 * pr - 3) / 2 + R(1) / 2) / 2;
}

/// r given n, real form: (sqrt(8n + 1) + 1)/4
template <class R> R r_max_real_given_n(u128 n) {
    return (sqrt_r(8 * detail::to_real<R>(n) + 1) + 1) / 4;
}

/// P given n and d: n^((d-2)/d)
template <class R> R p_pow_bound(u128 n, u128 d) {
    using std::pow;
    using boost::multiprecision::pow;
    R x = detail::to_real<R>(n);
    return pow(x, (detail::to_real<R>(d) - 2) / detail::to_real<R>(d));
}

} // namespace expr

// ---------------------------------------------------------------------------
// Exact tie-break oracles (value - m sign) for the expressions that can be
// rational or quadratic surds. Each returns nullopt when the value is
// provably irrational of higher degree (the ladder alone then suffices,
// since such a value cannot equal an integer).
// ---------------------------------------------------------------------------

namespace exact_cmp {

using detail::to_bigint;

/// a_max_given_p: 6y - u/2 - m with y = sqrt(p'/12), u^2 = y.
inline std::optional<int> a_max_p(u128 m, u128 p, u128) {
    bigrat W(to_bigint(p - 1), 12);   // u^4
    bigrat mm(to_bigint(m));
    // value = 6y - m - u/2 where y = sqrt(W), u = W^(1/4)
    int head = sign_quad(-mm, 6, W);  // 6y - m
    if (head < 0) return -1;          // minus u/2 keeps it negative
    if (head == 0) return -1;         // value = -u/2 < 0
    // both sides positive: (6y - m)^2 vs y/4  ->  36W + m^2 - (12m + 1/4) y
    return sign_quad(36 * W + mm * mm, -(12 * mm + bigrat(1, 4)), W);
}

/// b_max (either constant): c0 + (1/k) sqrt(s) - (1/2) sqrt(4p-3) - m
/// with s in {3,7}: value = (2p + 1/2 - m) + (1/(2s)) (s + sqrt(s))... folded below.
template <int S>
inline std::optional<int> b_max_p(u128 m, u128 p, u128) {
    // value - m = 2p + 1/2 + sqrt(S)/(2S) - sqrt(4p-3)/2 - m
    bigrat a = 2 * bigrat(to_bigint(p)) + bigrat(1, 2) - bigrat(to_bigint(m));
    return sign_biquad(a, bigrat(1, 2 * S), bigrat(S),
                       bigrat(-1, 2), bigrat(4 * to_bigint(p) - 3));
}

/// q_max_given_P: rational iff 4P-3 is a perfect square.
inline std::optional<int> q1_P(u128 m, u128 P, u128) {
    bigrat Pr(to_bigint(P));
    bigrat mm(to_bigint(m));
    // (P-1)(2P + 1/2) + 1 - m - (P-1) sqrt(P - 3/4)
    return sign_quad((Pr - 1) * (2 * Pr + bigrat(1, 2)) + 1 - mm, -(Pr - 1),
                     Pr - bigrat(3, 4));
}

/// q_max_given_px: always exactly decidable (two square roots of rationals).
inline std::optional<int> q2_px(u128 m, u128 p, u128 X) {
    return sign_biquad(-bigrat(to_bigint(m)), 1, bigrat(to_bigint(X), to_bigint(p)),
                       -1, bigrat(to_bigint(p), 12));
}

/// c_max_given_p: quadratic surd, always decidable.
inline std::optional<int> cmax_p(u128 m, u128 p, u128) {
    bigrat pr(to_bigint(p));
    bigrat a = (pr * pr + 2 * pr + bigrat(1, 2)) / 2 - bigrat(to_bigint(m));
    return sign_quad(a, bigrat(1, 4), 4 * pr - 3);
}

/// a_max_given_h: quadratic surd.
inline std::optional<int> amax_h(u128 m, u128 H, u128) {
    bigrat h(to_bigint(H));
    return sign_quad(3 * h - bigrat(to_bigint(m)), -bigrat(1, 2), h / 2);
}

/// p_max_given_x: exact when X^(1/3) is rational; a cube-free X of degree 3
/// can never make the value an integer (it would satisfy a quadratic).
inline std::optional<int> pmax_x(u128 m, u128 X, u128) {
    u64 c = integer_root(X, 3);
    if (detail::pow_sat(c, 3) != X) return std::nullopt;
    // value = c - (4/9) sqrt(3c) - m
    return sign_quad(bigrat(to_bigint(c)) - bigrat(to_bigint(m)), bigrat(-4, 9),
                     3 * bigrat(to_bigint(c)));
}

/// q_max_given_n: exact when (n/4)^(1/10) is rational or a square root.
inline std::optional<int> qmax_n(u128 m, u128 n, u128) {
    if (n % 4 == 0) {
        u128 w = n / 4;
        u64 k = integer_root(w, 10);
        if (detail::pow_sat(k, 10) == w) {
            bigrat u(to_bigint(k));
            bigrat v = 2 * u * u * u * u - u * u * u - u * u / 10 + 17 * u / 20;
            return detail::sgn(v - bigrat(to_bigint(m)));
        }
        u64 f = integer_root(w, 5);
        if (detail::pow_sat(f, 5) == w) {
            // u = sqrt(f): value = (2f^2 - f/10 - m) + (17/20 - f) sqrt(f)
            bigrat fr(to_bigint(f));
            return sign_quad(2 * fr * fr - fr / 10 - bigrat(to_bigint(m)),
                             bigrat(17, 20) - fr, fr);
        }
    }
    return std::nullopt;
}

} // namespace exact_cmp

// ---------------------------------------------------------------------------
// Dispatchable identifiers, for the CLI and for audit margin reporting.
// ---------------------------------------------------------------------------

enum class Expr {
    sqrt_p_minus_34,
    a_max_given_p,
    b_max_k3_given_p,
    b_max_c3_given_p,
    q_max_given_P,
    q_max_given_px,
    p_max_given_x,
    q_max_given_n,
    a_max_given_h,
    a_max_given_n,
    b_mu_given_n,
    c_max_given_p,
    r_max_real_given_n,
    p_pow_bound,
};

/// High-precision evaluation of a named bound expression (long double result;
/// internally exact enough that the printed decimals are faithful).
inline long double real_eval(Expr e, u128 a, u128 b = 0) {
    using R = long double;
    switch (e) {
        case Expr::sqrt_p_minus_34:    return expr::sqrt_p_minus_34<R>(a);
        case Expr::a_max_given_p:      return expr::a_max_given_p<R>(a);
        case Expr::b_max_k3_given_p:   return expr::b_max_k3_given_p<R>(a);
        case Expr::b_max_c3_given_p:   return expr::b_max_c3_given_p<R>(a);
        case Expr::q_max_given_P:      return expr::q_max_given_P<R>(a);
        case Expr::q_max_given_px:     return expr::q_max_given_px<R>(a, b);
        case Expr::p_max_given_x:      return expr::p_max_given_x<R>(a);
        case Expr::q_max_given_n:      return expr::q_max_given_n<R>(a);
        case Expr::a_max_given_h:      return expr::a_max_given_h<R>(a);
        case Expr::a_max_given_n:      return expr::a_max_given_n<R>(a);
        case Expr::b_mu_given_n:       return expr::b_mu_given_n<R>(a, b);
        case Expr::c_max_given_p:      return expr::c_max_given_p<R>(a);
        case Expr::r_max_real_given_n: return expr::r_max_real_given_n<R>(a);
        case Expr::p_pow_bound:        return expr::p_pow_bound<R>(a, b);
    }
    throw std::logic_error("real_eval: unknown expression");
}

} // namespace c3
