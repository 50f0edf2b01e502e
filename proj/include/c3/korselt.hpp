#pragma once

// Korselt factorisations and the three-factor variable algebra.
//
// Writing x' = x - 1 throughout: a Korselt number is an n = p1*...*pd (odd
// ascending factors, d >= 3, not necessarily prime) with pi' | n' for all i
// and lambda_d >= 2, where Pi' = lambda_i * pi'. For d = 3 the whole variable
// set (H, A, B, C, D, E, F, G, Delta, eta, s, theta) is derived and every
// defining identity re-verified in exact integer arithmetic.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "c3/prime_bitmap.hpp"
#include "c3/wide_uint.hpp"

namespace c3 {

enum class RejectReason {
    too_few_factors,
    even_factor,
    not_ascending,
    factor_too_small,
    divisibility,      // pi' does not divide n'
    lambda_d_is_one,   // E = 1
    gcd_mismatch,      // pairwise gcd of the pi' not constant
    coprimality,       // A, B, C not pairwise coprime
    overflow,
};

struct Rejection {
    RejectReason reason;
    int index = -1;          // offending factor position where applicable
    std::string detail;
};

inline const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::too_few_factors: return "fewer than three factors";
        case RejectReason::even_factor:     return "even factor";
        case RejectReason::not_ascending:   return "factors not strictly ascending";
        case RejectReason::factor_too_small: return "factor below 3";
        case RejectReason::divisibility:    return "factor-1 does not divide n-1";
        case RejectReason::lambda_d_is_one: return "largest-factor multiplier is 1";
        case RejectReason::gcd_mismatch:    return "pairwise gcd of shifted factors differs";
        case RejectReason::coprimality:     return "A,B,C not pairwise coprime";
        case RejectReason::overflow:        return "product exceeds 128 bits";
    }
    return "unknown";
}

template <class T>
using Result = std::variant<T, Rejection>;

template <class T> bool accepted(const Result<T>& r) { return r.index() == 0; }
template <class T> const T& value(const Result<T>& r) { return std::get<0>(r); }
template <class T> const Rejection& why(const Result<T>& r) { return std::get<1>(r); }

struct KorseltFactorization {
    std::vector<u64> factors;    // ascending, odd, >= 3
    u128 n = 0;
    std::vector<u128> lambdas;   // lambda_i = (n/pi - 1)/(pi - 1)
};

/// General-d Korselt acceptance. Rejects with the first violated condition,
/// checked in order: shape (d, odd, ascending), divisibility, lambda_d >= 2.
inline Result<KorseltFactorization> check_korselt(const std::vector<u64>& factors) {
    if (factors.size() < 3)
        return Rejection{RejectReason::too_few_factors, -1, {}};
    u128 n = 1;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        u64 f = factors[i];
        if (f < 3) return Rejection{RejectReason::factor_too_small, (int)i, {}};
        if ((f & 1) == 0) return Rejection{RejectReason::even_factor, (int)i, {}};
        if (i > 0 && factors[i - 1] >= f)
            return Rejection{RejectReason::not_ascending, (int)i, {}};
        if (!mul_checked(n, f, n))
            return Rejection{RejectReason::overflow, (int)i, {}};
    }
    KorseltFactorization kf;
    kf.factors = factors;
    kf.n = n;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        u128 Pi = n / factors[i];
        u128 pip = factors[i] - 1;
        if ((Pi - 1) % pip != 0)
            return Rejection{RejectReason::divisibility, (int)i,
                             "(n/p-1) % (p-1) != 0 at factor " + std::to_string(factors[i])};
        kf.lambdas.push_back((Pi - 1) / pip);
    }
    if (kf.lambdas.back() < 2)
        return Rejection{RejectReason::lambda_d_is_one, (int)(factors.size() - 1), {}};
    return kf;
}

/// Full variable set for one three-factor Korselt triple.
struct K3Profile {
    u64 p = 0, q = 0, r = 0;
    u128 n = 0;
    u64 H = 0, A = 0, B = 0, C = 0;
    u64 D = 0, E = 0, F = 0, G = 0;
    u64 Delta = 0, eta = 0, s = 0, theta = 0;
    u128 lambda1 = 0;                          // (qr-1)/p'
    std::vector<std::pair<u64, u32>> p_prime_factorization;   // prime powers of p-1
    bool p_prime = false, q_prime = false, r_prime = false;

    u128 abc() const { return u128(A) * B * C; }
    bool all_prime() const { return p_prime && q_prime && r_prime; }
};

namespace detail {

inline std::vector<std::pair<u64, u32>> factor_by_trial_division(u64 m) {
    std::vector<std::pair<u64, u32>> out;
    for (u64 d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
        if (m % d) continue;
        u32 e = 0;
        while (m % d == 0) { m /= d; ++e; }
        out.emplace_back(d, e);
    }
    if (m > 1) out.emplace_back(m, 1);
    return out;
}

} // namespace detail

/// Derives and verifies the complete K3 profile of (p, q, r).
/// Rejection reports the first violated relation; every derived identity is
/// re-checked exactly, so an accepted profile satisfies all of them.
inline Result<K3Profile> derive_k3(u64 p, u64 q, u64 r,
                                   const PrimeBitmap* bitmap = nullptr) {
    auto base = check_korselt({p, q, r});
    if (!accepted(base)) return why(base);

    K3Profile k;
    k.p = p; k.q = q; k.r = r;
    k.n = value(base).n;
    const u64 pp = p - 1, qp = q - 1, rp = r - 1;

    // H is the gcd of p' and q'; for a Korselt triple every pairwise gcd
    // agrees, but that is derived under the Korselt hypothesis, so arbitrary
    // input gets the explicit cross-check.
    k.H = gcd_u64(pp, qp);
    if (gcd_u64(pp, rp) != k.H || gcd_u64(qp, rp) != k.H)
        return Rejection{RejectReason::gcd_mismatch, -1, {}};
    k.A = pp / k.H; k.B = qp / k.H; k.C = rp / k.H;
    if (gcd_u64(k.A, k.B) != 1 || gcd_u64(k.A, k.C) != 1 || gcd_u64(k.B, k.C) != 1)
        return Rejection{RejectReason::coprimality, -1, {}};

    const auto& lam = value(base).lambdas;
    k.lambda1 = lam[0];
    k.D = static_cast<u64>(lam[1]);
    k.E = static_cast<u64>(lam[2]);

    // F from H(AB+AC+BC) + A+B+C = F*ABC, exact
    u128 lhs = u128(k.H) * (u128(k.A) * k.B + u128(k.A) * k.C + u128(k.B) * k.C) +
               k.A + k.B + k.C;
    u128 abc = k.abc();
    if (lhs % abc != 0)
        return Rejection{RejectReason::divisibility, -1, "no integer F"};
    k.F = static_cast<u64>(lhs / abc);

    k.G = k.A * k.F - k.H;
    k.Delta = static_cast<u64>(u128(k.D) * k.E - u128(p) * p);
    k.s = p - k.E;
    k.eta = k.D - p - k.s;
    u128 theta2 = 4 * (u128(k.eta) * p - k.Delta) + u128(k.eta) * k.eta;
    u64 th = isqrt(theta2);
    if (u128(th) * th != theta2 || th < k.eta || (th - k.eta) / 2 != k.s)
        return Rejection{RejectReason::divisibility, -1, "theta identity fails"};
    k.theta = th;

    // remaining cross-identities, all exact
    bool ok = u128(k.Delta) == u128(k.A) * k.G &&
              (u128(qp) * k.Delta == u128(pp) * (p + k.E)) &&
              (u128(rp) * k.Delta == u128(pp) * (p + k.D)) &&
              (u128(k.B) * k.G == u128(p) + k.E) &&
              (u128(k.A) * k.B * k.F == u128(k.A + k.B) * k.H + k.E + 1) &&
              (u128(k.C) * k.E == u128(k.B) * p + k.A) &&
              (k.n - 1 == abc * k.H * (u128(k.H) * k.H + k.F));
    if (!ok)
        return Rejection{RejectReason::divisibility, -1, "variable cross-identity fails"};

    k.p_prime_factorization = detail::factor_by_trial_division(pp);
    k.p_prime = is_prime(p, bitmap);
    k.q_prime = is_prime(q, bitmap);
    k.r_prime = is_prime(r, bitmap);
    return k;
}

enum class TripleClass { C3N, K3N_only, not_korselt };

inline const char* to_string(TripleClass c) {
    switch (c) {
        case TripleClass::C3N:         return "C3N";
        case TripleClass::K3N_only:    return "K3N-only";
        case TripleClass::not_korselt: return "not-Korselt";
    }
    return "?";
}

inline TripleClass classify(u64 p, u64 q, u64 r, const PrimeBitmap* bitmap = nullptr) {
    auto res = derive_k3(p, q, r, bitmap);
    if (!accepted(res)) return TripleClass::not_korselt;
    return value(res).all_prime() ? TripleClass::C3N : TripleClass::K3N_only;
}

/// Primitive iff H <= ABC.
inline bool is_primitive(const K3Profile& k) { return u128(k.H) <= k.abc(); }

/// All three factors congruent to 3 (mod 4); the strong-pseudoprime-extremal class.
inline bool in_class_C(const K3Profile& k) {
    return k.p % 4 == 3 && k.q % 4 == 3 && k.r % 4 == 3;
}

/// A >= 3H/2 marks the large-A regime (F is forced to 1 there).
inline bool is_big_A(const K3Profile& k) { return 2 * u128(k.A) >= 3 * u128(k.H); }

} // namespace c3
