#pragma once

// Every variable bound as an executable evaluator. Two audiences:
//  - the enumerator, which needs integer cutoffs that can never lose a triple
//    (irrational bounds are taken through the guarded floor/ceil machinery,
//    rational ones through exact 128-bit arithmetic);
//  - the audit, which re-checks the whole bound family on a finished profile
//    and reports pass/fail with margins.

#include <cstdint>
#include <string>
#include <vector>

#include "c3/korselt.hpp"
#include "c3/real_eval.hpp"
#include "c3/wide_uint.hpp"

namespace c3 {

struct SearchLimits {
    u128 X = 0;
    u64 p_M = 0;    // ceil(X^(1/3) - (4 sqrt3/9) X^(1/6))
    u64 Q3 = 0;     // floor of the q-given-n expression at X
};

struct PerPLimits {
    u64 p = 0;
    long double A_M = 0, B_M = 0;   // strict upper bounds, real-valued
    u64 a_max = 0;                  // largest admissible A  (A < A_M)
    u64 b_max = 0;                  // largest admissible B  (B < B_M)
    u64 Q1 = 0;                     // q <= Q1
    u64 Q2 = 0;                     // largest q with q < the q-given-p,X bound
    u64 Z = 0;                      // min(Q1, Q2)
};

inline SearchLimits search_limits(u128 X) {
    if (X < 561) throw std::domain_error("search_limits: X must be >= 561");
    SearchLimits s;
    s.X = X;
    s.p_M = guarded_ceil(
        [&](auto tag) { return expr::p_max_given_x<typename decltype(tag)::type>(X); },
        exact_cmp::pmax_x, X, 0);
    s.Q3 = guarded_floor(
        [&](auto tag) { return expr::q_max_given_n<typename decltype(tag)::type>(X); },
        exact_cmp::qmax_n, X, 0);
    return s;
}

inline PerPLimits per_p_limits(u64 p, u128 X) {
    PerPLimits l;
    l.p = p;
    l.A_M = real_eval(Expr::a_max_given_p, p);
    l.B_M = real_eval(Expr::b_max_c3_given_p, p);
    l.a_max = guarded_ceil(
                  [&](auto tag) { return expr::a_max_given_p<typename decltype(tag)::type>(p); },
                  exact_cmp::a_max_p, p, 0) - 1;
    l.b_max = guarded_ceil(
                  [&](auto tag) { return expr::b_max_c3_given_p<typename decltype(tag)::type>(p); },
                  exact_cmp::b_max_p<7>, p, 0) - 1;
    l.Q1 = guarded_floor(
        [&](auto tag) { return expr::q_max_given_P<typename decltype(tag)::type>(p); },
        exact_cmp::q1_P, p, 0);
    l.Q2 = guarded_ceil(
               [&](auto tag) { return expr::q_max_given_px<typename decltype(tag)::type>(p, X); },
               exact_cmp::q2_px, p, X) - 1;
    l.Z = l.Q1 < l.Q2 ? l.Q1 : l.Q2;
    return l;
}

/// r <= ceil(sqrt(n/2)), exact integer form; equality characterises E = 2.
inline u64 r_max(u128 n) {
    if (n < 561) throw std::domain_error("r_max: n must be >= 561");
    return ceil_sqrt_half(n);
}

// --- structural bounds given P, H, n ---------------------------------------

struct StructuralP {
    long double Q2max;   // Duparc q bound at P (real value)
    u64 R3;              // (P-1)(P+1)^2/2 + 1
    u128 N2;             // 4P^5 - 7P^4 + 7P^3 - 4P^2 + P
    u128 N3;             // (P^6 + 2P^5 - P^4 - P^3 + 2P^2 - P)/2
};

inline u64 rbound_given_P(u64 P) {
    return static_cast<u64>((u128(P) - 1) * (u128(P) + 1) * (P + 1) / 2 + 1);
}

inline u128 q_equality_given_P(u64 P) { return u128(P) * P + P - 1; }

inline u128 nbound_given_P(u64 P) {
    u128 P2 = u128(P) * P, P3 = P2 * P;
    return (P3 * P3 + 2 * P3 * P2 - P2 * P2 - P3 + 2 * P2 - P) / 2;
}

inline u128 n2_given_P(u64 P) {
    u128 P2 = u128(P) * P, P3 = P2 * P;
    return 4 * P3 * P2 - 7 * P2 * P2 + 7 * P3 - 4 * P2 + P;
}

inline StructuralP structural_P_bounds(u64 P) {
    if (P < 3 || (P & 1) == 0) throw std::domain_error("structural_P_bounds: P odd >= 3");
    return {real_eval(Expr::q_max_given_P, P), rbound_given_P(P), n2_given_P(P),
            nbound_given_P(P)};
}

struct StructuralH {
    long double A_bound;   // 3H - sqrt(H/2)
    u128 C_of_H;           // (H^4 + 2H^3 + 5H^2 + 5H + 4)/2
    u128 N_of_H;           // degree-10 polynomial, saturates at U128_MAX
};

/// C(H); exact for the H range of real triples (saturating beyond).
inline u128 c_of_h(u128 H) {
    u128 H2, H3, H4;
    if (!mul_checked(H, H, H2) || !mul_checked(H2, H, H3) || !mul_checked(H2, H2, H4))
        return U128_MAX;
    return (H4 + 2 * H3 + 5 * H2 + 5 * H + 4) / 2;
}

/// N(H) = (H^10 + 4H^9 + ... + 12H + 2)/2, saturating.
inline u128 n_of_h(u128 H) {
    static constexpr u64 coef[] = {1, 4, 14, 30, 53, 69, 71, 55, 31, 12, 2};
    u128 acc = 0;
    for (u64 c : coef) {
        if (!mul_checked(acc, H, acc)) return U128_MAX;
        if (acc > U128_MAX - c) return U128_MAX;
        acc += c;
    }
    return acc / 2;
}

inline u128 b_of_h(u128 H) { return H * H + H + 3; }

inline StructuralH structural_H_bounds(u64 H) {
    if (H < 2 || (H & 1)) throw std::domain_error("structural_H_bounds: H even >= 2");
    return {real_eval(Expr::a_max_given_h, H), c_of_h(H), n_of_h(H)};
}

/// Largest even H with N(H) <= n.
inline u64 n_inverse_even(u128 n) {
    u64 lo = 0, hi = 2;
    while (n_of_h(hi) <= n) { lo = hi; hi *= 2; }
    while (hi - lo > 2) {
        u64 mid = (lo + hi) / 2; mid -= mid & 1;
        if (mid <= lo) mid = lo + 2;
        if (mid >= hi) mid = hi - 2;
        (n_of_h(mid) <= n ? lo : hi) = mid;
    }
    return lo;
}

/// Real N^{-1}(n) by monotone bisection (for margins and reporting).
inline long double n_inverse_real(u128 n) {
    long double target = static_cast<long double>(n);
    auto N = [](long double h) {
        static constexpr long double coef[] = {1, 4, 14, 30, 53, 69, 71, 55, 31, 12, 2};
        long double acc = 0;
        for (long double c : coef) acc = acc * h + c;
        return acc / 2;
    };
    long double lo = 0, hi = 4;
    while (N(hi) <= target) hi *= 2;
    for (int i = 0; i < 200 && hi - lo > 1e-15L * hi; ++i) {
        long double mid = (lo + hi) / 2;
        (N(mid) <= target ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

struct StructuralN {
    long double C_bound;     // C(N^{-1}(n))  via the closed form
    long double ABC_bound;   // n'/(h (h^2+1)) at h = N^{-1}(n)
    long double A_bound_n;
    long double B7_bound;
    long double P_bound_d;   // n^((d-2)/d), d = 3
};

inline StructuralN structural_n_bounds(u128 n) {
    if (n < 561) throw std::domain_error("structural_n_bounds: n >= 561");
    long double h = n_inverse_real(n);
    long double S = sqrtl(8.0L * static_cast<long double>(n) + 1);
    StructuralN b;
    b.C_bound = (S - 3) / (4 * h);
    b.ABC_bound = (static_cast<long double>(n) - 1) / (h * (h * h + 1));
    b.A_bound_n = real_eval(Expr::a_max_given_n, n);
    b.B7_bound = real_eval(Expr::b_mu_given_n, n, 7);
    b.P_bound_d = real_eval(Expr::p_pow_bound, n, 3);
    return b;
}

// --- simple stated ranges ---------------------------------------------------

struct IntRange { u128 lo; u128 hi; bool hi_exclusive; };

inline IntRange duparc_E_range(u64 P) { return {2, u128(P) - 1, false}; }
inline IntRange F_range(u64 H) { return {1, 2 * u128(H), false}; }
struct GDeltaRanges { IntRange G; IntRange Delta; };
inline GDeltaRanges G_delta_ranges(u64 p, u64 H) {
    return {{1, 2 * u128(H), true}, {1, 2 * u128(p) - 2, true}};
}

// --- exact decision helpers for the audit ----------------------------------

namespace detail {

/// Exact decision of C <= C(N^{-1}(n)) via the closed form
/// C(N^{-1}(n)) = (sqrt(8n+1) - 3) / (4 N^{-1}(n)):
/// equivalent to n <= N((S-3)/(4C)) with S = sqrt(8n+1), and N((S-3)/(4C))
/// reduces exactly to alpha + beta*S with rational alpha, beta.
inline bool c_bound_given_n_holds(u128 n, u64 C) {
    bigint nn = exact_cmp::to_bigint(n);
    bigint disc = 8 * nn + 1;
    // t = (S - 3)/(4C) as pair (a + b S); powers keep the same shape via S^2 = disc
    bigrat a(-3, 4 * (long long)C), b(1, 4 * (long long)C);
    bigrat alpha(0), beta(0);
    static constexpr int coef[] = {1, 4, 14, 30, 53, 69, 71, 55, 31, 12, 2};
    // Horner over (alpha + beta S): acc = acc*t + c
    for (int c : coef) {
        bigrat na = alpha * a + beta * b * bigrat(disc);
        bigrat nb = alpha * b + beta * a;
        alpha = na + c;
        beta = nb;
    }
    alpha /= 2; beta /= 2;
    // condition: n <= alpha + beta S  <=>  sign(alpha - n + beta S) >= 0
    return sign_quad(alpha - bigrat(nn), beta, bigrat(disc)) >= 0;
}

/// Exact decision of ABC <= n' / (h (h^2 + 1)) at h = N^{-1}(n), by dyadic
/// rational bisection that brackets h between exact evaluations of N.
inline bool abc_bound_given_n_holds(u128 n, u128 ABC) {
    bigint nn = exact_cmp::to_bigint(n);
    bigint abc = exact_cmp::to_bigint(ABC);
    auto N_of = [](const bigrat& h) -> bigrat {
        static constexpr int coef[] = {1, 4, 14, 30, 53, 69, 71, 55, 31, 12, 2};
        bigrat acc(0);
        for (int c : coef) acc = acc * h + c;
        return bigrat(acc / 2);
    };
    auto cond = [&](const bigrat& h) -> bigrat {   // ABC*(h^3+h) - (n-1), increasing in h
        return bigrat(bigrat(abc) * (h * h * h + h) - (bigrat(nn) - 1));
    };
    // integer landing: equality cases have h integral
    u64 h_even = n_inverse_even(n);
    for (u64 h = h_even; h <= h_even + 2; ++h) {
        if (n_of_h(h) == n) return cond(bigrat(h)) <= 0;
    }
    bigrat lo(h_even), hi(h_even + 2);
    if (N_of(lo) == bigrat(nn)) return cond(lo) <= 0;
    for (int it = 0; it < 300; ++it) {
        if (cond(lo) > 0) return false;   // h* > lo, cond increasing
        if (cond(hi) <= 0) return true;
        bigrat mid = (lo + hi) / 2;
        bigrat nm = N_of(mid);
        if (nm == bigrat(nn)) return cond(mid) <= 0;
        (nm < bigrat(nn) ? lo : hi) = mid;
    }
    throw std::runtime_error("abc_bound_given_n_holds: bisection did not separate");
}

} // namespace detail

// --- the audit ---------------------------------------------------------------

struct AuditCheck {
    std::string id;
    bool pass;
    long double margin;   // bound minus value (positive = slack), when meaningful
    std::string note;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    bool big_a_flag = false;
    bool all_pass = true;

    void add(std::string id, bool pass, long double margin = 0, std::string note = {}) {
        all_pass = all_pass && pass;
        checks.push_back({std::move(id), pass, margin, std::move(note)});
    }
};

/// Runs every bound on one accepted profile. For a genuine Korselt triple all
/// checks must pass; strictness and equality characterisations are asserted
/// exactly as stated.
inline AuditReport audit(const K3Profile& k, u128 X) {
    AuditReport rep;
    rep.big_a_flag = is_big_A(k);
    const u64 p = k.p, q = k.q, r = k.r;
    const u128 n = k.n;
    const bool c3n = k.all_prime();

    // multiplier ranges
    rep.add("F-range", k.F >= 1 && k.F <= 2 * k.H,
            static_cast<long double>(2 * k.H) - k.F);
    rep.add("F-equality-top", k.F != 2 * k.H || n == 1729, 0,
            "F = 2H only at 1729");
    rep.add("E-range", k.E >= 2 && u128(k.E) <= u128(p) - 1,
            static_cast<long double>(p - 1) - k.E);
    rep.add("G-range", k.G >= 1 && u128(k.G) < 2 * u128(k.H),
            static_cast<long double>(2 * k.H) - k.G);
    rep.add("Delta-range", k.Delta >= 1 && u128(k.Delta) < 2 * u128(p) - 2,
            static_cast<long double>(2 * p - 2) - k.Delta);

    // q and r given P = p
    rep.add("q-given-P", guarded_cmp([&](auto tag) {
                return expr::q_max_given_P<typename decltype(tag)::type>(p);
            }, q, exact_cmp::q1_P, p, 0) >= 0,
            real_eval(Expr::q_max_given_P, p) - q);
    u64 r3 = rbound_given_P(p);
    rep.add("r-given-P", r <= r3, static_cast<long double>(r3) - r);
    rep.add("r-given-P-equality", (r == r3) == (u128(q) == q_equality_given_P(p)));
    u128 n3 = nbound_given_P(p);
    rep.add("n-given-P", n <= n3, static_cast<long double>(n3 - n));

    // bounds given n
    rep.add("P-given-n", u128(p) * p * p < n,
            real_eval(Expr::p_pow_bound, n, 3) - p);
    u64 q3n = guarded_floor(
        [&](auto tag) { return expr::q_max_given_n<typename decltype(tag)::type>(n); },
        exact_cmp::qmax_n, n, 0);
    rep.add("q-given-n", q <= q3n, static_cast<long double>(q3n) - q);
    {
        // each factor is the ceiling of sqrt(n/lambda): (f-1)^2 lambda < n <= f^2 lambda
        bool ok = true;
        const u128 lams[3] = {k.lambda1, k.D, k.E};
        const u64 fs[3] = {p, q, r};
        for (int i = 0; i < 3; ++i) {
            u128 f = fs[i];
            ok = ok && (f - 1) * (f - 1) * lams[i] < n && n <= f * f * lams[i];
        }
        rep.add("factor-ceil-sqrt", ok);
    }
    u64 rmx = r_max(n);
    rep.add("r-given-n", r <= rmx, static_cast<long double>(rmx) - r);
    rep.add("r-given-n-equality", (r == rmx) == (k.E == 2));
    // r <= (sqrt(8n+1)+1)/4  <=>  (4r-1)^2 <= 8n+1
    rep.add("r-given-n-real", (u128(4) * r - 1) * (u128(4) * r - 1) <= 8 * n + 1,
            real_eval(Expr::r_max_real_given_n, n) - r);

    // A, B, C given H and p
    rep.add("A-given-H", guarded_cmp([&](auto tag) {
                return expr::a_max_given_h<typename decltype(tag)::type>(k.H);
            }, k.A, exact_cmp::amax_h, k.H, 0) > 0,
            real_eval(Expr::a_max_given_h, k.H) - k.A);
    rep.add("A-given-p", guarded_cmp([&](auto tag) {
                return expr::a_max_given_p<typename decltype(tag)::type>(p);
            }, k.A, exact_cmp::a_max_p, p, 0) > 0,
            real_eval(Expr::a_max_given_p, p) - k.A);
    if (c3n) {
        rep.add("B-given-p", guarded_cmp([&](auto tag) {
                    return expr::b_max_c3_given_p<typename decltype(tag)::type>(p);
                }, k.B, exact_cmp::b_max_p<7>, p, 0) > 0,
                real_eval(Expr::b_max_c3_given_p, p) - k.B);
    } else {
        rep.add("B-given-p", guarded_cmp([&](auto tag) {
                    return expr::b_max_k3_given_p<typename decltype(tag)::type>(p);
                }, k.B, exact_cmp::b_max_p<3>, p, 0) > 0,
                real_eval(Expr::b_max_k3_given_p, p) - k.B);
    }
    {
        int c = guarded_cmp([&](auto tag) {
            return expr::c_max_given_p<typename decltype(tag)::type>(p);
        }, k.C, exact_cmp::cmax_p, p, 0);
        bool equality_chars = (k.E == 2 && k.F == 1 && k.G == 1);
        rep.add("C-given-p", c >= 0, real_eval(Expr::c_max_given_p, p) - k.C);
        rep.add("C-given-p-equality", (c == 0) == equality_chars);
    }
    rep.add("q-given-p-n", sign_biquad(-bigrat(exact_cmp::to_bigint(q)), 1,
                                       bigrat(exact_cmp::to_bigint(n), exact_cmp::to_bigint(p)),
                                       -1, bigrat((long long)p, 12)) > 0,
            real_eval(Expr::q_max_given_px, p, n) - q);
    rep.add("p-given-n", p <= guarded_ceil([&](auto tag) {
                return expr::p_max_given_x<typename decltype(tag)::type>(n);
            }, exact_cmp::pmax_x, n, 0),
            real_eval(Expr::p_max_given_x, n) - p);
    rep.add("A-given-n", guarded_cmp([&](auto tag) {
                return expr::a_max_given_n<typename decltype(tag)::type>(n);
            }, k.A) > 0,
            real_eval(Expr::a_max_given_n, n) - k.A);
    if (c3n && n != 6601) {
        rep.add("B-given-n", guarded_cmp([&](auto tag) {
                    return expr::b_mu_given_n<typename decltype(tag)::type>(n, 7);
                }, k.B) > 0,
                real_eval(Expr::b_mu_given_n, n, 7) - k.B, "mu = 7");
    } else {
        rep.add("B-given-n", guarded_cmp([&](auto tag) {
                    return expr::b_mu_given_n<typename decltype(tag)::type>(n, 3);
                }, k.B) > 0,
                real_eval(Expr::b_mu_given_n, n, 3) - k.B,
                c3n ? "mu = 3 (6601 exception)" : "mu = 3");
    }

    // bounds given H (equality iff E=2, F=G=1)
    {
        u128 ch = c_of_h(k.H), bh = b_of_h(k.H), ah = u128(k.H) + 1;
        u128 nh = n_of_h(k.H);
        bool eq_chars = (k.E == 2 && k.F == 1 && k.G == 1);
        rep.add("C-given-H", k.C <= ch, static_cast<long double>(ch - k.C));
        rep.add("BC-given-H", u128(k.B) * k.C <= bh * ch);
        rep.add("ABC-given-H", k.abc() <= ah * bh * ch);
        rep.add("n-given-H", n <= nh);
        rep.add("n-given-H-equality", (n == nh) == eq_chars);
    }

    // bounds given n through the H-family inverse
    rep.add("C-given-n", detail::c_bound_given_n_holds(n, k.C),
            structural_n_bounds(n).C_bound - k.C);
    rep.add("ABC-given-n", detail::abc_bound_given_n_holds(n, k.abc()),
            structural_n_bounds(n).ABC_bound - static_cast<long double>(k.abc()));

    (void)X;
    return rep;
}

} // namespace c3
