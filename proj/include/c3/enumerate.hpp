#pragma once

// The enumeration algorithms.
//
// HII is the production path: for each p it factors p'/2, walks the divisors
// A < A_M, organises candidate q values into arithmetic progressions with
// common difference p', and for each prime q solves the bilinear relation
// K*C*F - V*C - U = 0 for integer pairs (C, F) by split-range trials.
// PI (descending (E, D) pairs) and PII (per-q modular inverse) are
// independent cross-checks, and a naive triple loop over primes acts as the
// oracle for small X. All four return identical sorted triple sets.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "c3/bounds.hpp"
#include "c3/korselt.hpp"
#include "c3/prime_bitmap.hpp"
#include "c3/wide_uint.hpp"

namespace c3 {

enum class Algo { HII, PI, PII, BRUTE };

inline const char* to_string(Algo a) {
    switch (a) {
        case Algo::HII: return "hii";
        case Algo::PI: return "pi";
        case Algo::PII: return "pii";
        case Algo::BRUTE: return "brute";
    }
    return "?";
}

struct TripleRecord {
    u64 p = 0, q = 0, r = 0;
    u128 n = 0;
    Algo found_by = Algo::HII;
    bool margin = false;        // n within the epsilon band below X
    bool audited = false;       // bound audit ran and passed

    friend bool operator==(const TripleRecord& a, const TripleRecord& b) {
        return a.n == b.n && a.p == b.p && a.q == b.q && a.r == b.r;
    }
};

struct EnumerationConfig {
    u128 X = 0;
    Algo algo = Algo::HII;
    u64 p_lo = 3;
    u64 p_hi = 0;                  // 0: up to the p bound at X*
    unsigned workers = 1;          // 0: hardware concurrency
    u64 eps_num = 1, eps_den = 10000;   // X* = (1 + eps) X, margin band (1 +- eps) X
    u64 sieve_limit_override = 0;  // 0: the q-given-n bound at X*
    u64 sieve_memory_cap = PrimeBitmap::DEFAULT_MEMORY_CAP;
    bool enable_b_jump = false;    // flag-gated AP jump over a pair-free B region
    bool run_audit = true;
    u128 brute_cap = 2000000000;
};

/// Crossover of the split-range procedure for a bilinear relation
/// a*x*y + b*x + c*y + d = 0 (a > 0, disc = bc - ad > 0), when an x-trial
/// costs k y-trials: x-trials pay below xi, y-trials above.
inline std::pair<long double, long double> split_point(long double a, long double b,
                                                       long double c, long double d,
                                                       long double k) {
    long double disc = b * c - a * d;
    if (!(disc > 0)) throw std::domain_error("split_point: bc - ad must be positive");
    long double sk = sqrtl(k);
    return {(sqrtl(disc) - sk * c) / (sk * a), (sqrtl(k * disc) - b) / a};
}

/// Totatives of A in [1, A-1]; the A = 1 convention is {1}.
inline std::vector<u64> totatives(u64 A) {
    if (A == 0) throw std::domain_error("totatives: A >= 1");
    if (A == 1) return {1};
    std::vector<u64> out;
    for (u64 t = 1; t < A; ++t)
        if (gcd_u64(A, t) == 1) out.push_back(t);
    return out;
}

/// Common difference e for the C trials and the first admissible C >= B+1.
/// Condition (a): 2 | AB forces C odd. Condition (b): 3 | AB with 3 ∤ H kills
/// C = 0 and C = -1/H (mod 3), the latter because it makes 3 | r.
struct ResidueStep { u64 e; u64 C_o; };

inline ResidueStep residue_step(u64 A, u64 B, u64 H) {
    bool cond_a = ((A * B) & 1) == 0;
    bool cond_b = ((A % 3) * (B % 3)) % 3 == 0 && H % 3 != 0;
    u64 e = (cond_a ? 2u : 1u) * (cond_b ? 3u : 1u);
    for (u64 C = B + 1;; ++C) {
        if (cond_a && (C & 1) == 0) continue;
        if (cond_b && (C % 3 == 0 || (C * H + 1) % 3 == 0)) continue;
        return {e, C};
    }
}

// --- HII loop internals -------------------------------------------------------

/// One live state of the inner search, exposed for tests.
struct Loop3State {
    u64 p, A, H, B, q;
    u128 X;
};

namespace detail {

struct CFWindow {
    u64 F_L = 0, F_M = 0;
    bool collapsed = false;   // F_M == floor(H/A): abandon this A
};

/// Integer F window for one state: valid pairs need F in [F_L, F_M], where
/// F_M = floor((U + TV)/(KT)) and F strictly exceeds
/// (H U pq + V (X - pq)) / (K (X - pq)) (equivalent to n < X).
inline CFWindow cf_window(const Loop3State& st, u64 F_o) {
    const u128 pq = u128(st.p) * st.q;
    CFWindow w;
    if (pq >= st.X) { w.F_L = 1; w.F_M = 0; return w; }
    const u64 K = st.A * st.B;
    const u128 U = u128(st.B) * st.p + st.A;
    const u128 V = u128(st.p) + st.q - 1;
    const u128 T = u128(st.B) + 1;
    w.F_M = static_cast<u64>((U + T * V) / (u128(K) * T));
    w.collapsed = (w.F_M == F_o);
    const u128 Xm = st.X - pq;
    w.F_L = static_cast<u64>((u128(st.H) * U * pq + V * Xm) / (u128(K) * Xm)) + 1;
    return w;
}

/// Visits every integer pair (C, F) of K*C*F - V*C - U = 0 with C >= B+1 and
/// n = p*q*(CH+1) < X, using C-trials up to sqrt(eU/K) and F-trials beyond.
/// Returns false when the caller should abandon this A (the F window has
/// collapsed onto floor(H/A) and will stay collapsed for larger B).
template <class Fn>
inline bool for_each_cf_pair(const Loop3State& st, u64 F_o, Fn&& emit) {
    CFWindow w = cf_window(st, F_o);
    if (w.collapsed) return false;
    if (w.F_L > w.F_M) return true;
    const u64 F_L = w.F_L, F_M = w.F_M;

    const u64 A = st.A, H = st.H, B = st.B;
    const u64 K = A * B;
    const u128 U = u128(B) * st.p + A;
    const u128 V = u128(st.p) + st.q - 1;

    auto [e, C_o] = residue_step(A, B, H);
    const bool cond_a = ((A * B) & 1) == 0;
    const bool cond_b = ((A % 3) * (B % 3)) % 3 == 0 && H % 3 != 0;

    // C-trials while K C^2 < e U, stepping e, with incremental numerators
    u128 C = C_o;
    u128 F_T = U + V * C;      // F = F_T / F_B
    u128 F_B = u128(K) * C;
    const u128 dT = V * e, dB = u128(K) * e;
    while (u128(K) * C * C < u128(e) * U) {
        if (F_T < u128(F_L) * F_B) return true;   // f(C) < F_L: n >= X from here on
        if (F_T % F_B == 0) {
            u64 F = static_cast<u64>(F_T / F_B);
            emit(static_cast<u64>(C), F);
        }
        C += e;
        F_T += dT;
        F_B += dB;
    }
    // F-trials cover the remaining region F <= f(C_stop)
    u128 f_hi = (U + V * C) / (u128(K) * C);
    u64 F_hi = static_cast<u64>(f_hi < F_M ? f_hi : F_M);
    u128 E = u128(K) * F_L - V;
    for (u64 F = F_L; F <= F_hi; ++F, E += K) {
        if (E != 1 && U % E == 0) {
            u128 Cc = U / E;
            // mirror the residue eliminations so both trial kinds agree
            if (cond_a && (Cc & 1) == 0) continue;
            if (cond_b && (Cc % 3 == 0 || (Cc * H + 1) % 3 == 0)) continue;
            emit(static_cast<u64>(Cc), F);
        }
    }
    return true;
}

} // namespace detail

/// All integer (C, F) pairs of one state, via the split-range procedure.
inline std::vector<std::pair<u64, u64>> loop3_pairs(const Loop3State& st) {
    std::vector<std::pair<u64, u64>> out;
    u64 F_o = st.H / st.A;
    detail::for_each_cf_pair(st, F_o, [&](u64 C, u64 F) { out.emplace_back(C, F); });
    return out;
}

/// Arithmetic-progression bundle for one (p, A); the q-APs advance by p' and
/// the B-APs by A in lockstep.
struct APState {
    u64 A = 0, H = 0;
    std::vector<u64> totatives;      // seeds t with gcd(A, t) = 1
    std::vector<u64> B1, q1;         // surviving first terms
    struct Dropped { u64 B1, q1, rho; };
    std::vector<Dropped> dropped;    // first terms whose whole AP is composite
    u64 lambda = 1;
    u64 beta = 0;                    // B cutoff: min(B_M, Q2/H, 2p/nu)
    u64 F_o = 0, nu = 0;
};

/// Builds the AP set for (p, A): seeds B1 = A + t, q1 = B1 H + 1 for each
/// totative t, dropping any AP whose q1 is divisible by a prime factor of A
/// (every later term repeats that residue).
inline APState build_ap_state(u64 p, u64 A, u128 X, const PerPLimits& lim,
                              const std::vector<u64>& rho) {
    APState ap;
    ap.A = A;
    ap.H = (p - 1) / A;
    ap.F_o = ap.H / A;
    ap.nu = (ap.F_o + 1) * A - ap.H;
    // beta = min(B_M, Q2/H, 2p/nu); the first two through safe integer supersets
    u64 q2_super = isqrt(X / p) + 1;
    u64 beta = lim.b_max;
    if (q2_super / ap.H < beta) beta = q2_super / ap.H;
    if ((2 * p) / ap.nu < beta) beta = (2 * p) / ap.nu;
    ap.beta = beta;
    ap.totatives = totatives(A);
    for (u64 t : ap.totatives) {
        u64 B1 = A + t;
        u64 q1 = B1 * ap.H + 1;
        u64 killer = 0;
        for (u64 rk : rho) {
            if (A % rk == 0 && q1 % rk == 0) { killer = rk; break; }
        }
        if (killer) ap.dropped.push_back({B1, q1, killer});
        else { ap.B1.push_back(B1); ap.q1.push_back(q1); }
    }
    return ap;
}

namespace detail {

inline std::vector<u64> prime_factors_of(u64 m) {
    std::vector<u64> out;
    for (u64 d = 2; d * d <= m; d += (d == 2 ? 1 : 2)) {
        if (m % d) continue;
        out.push_back(d);
        while (m % d == 0) m /= d;
    }
    if (m > 1) out.push_back(m);
    return out;
}

/// Divisors of m not exceeding cap, ascending.
inline std::vector<u64> divisors_up_to(u64 m, u64 cap) {
    std::vector<u64> divs{1};
    u64 mm = m;
    for (u64 d = 2; d * d <= mm; d += (d == 2 ? 1 : 2)) {
        if (mm % d) continue;
        std::size_t existing = divs.size();
        u64 pe = 1;
        while (mm % d == 0) {
            mm /= d;
            pe *= d;
            for (std::size_t i = 0; i < existing; ++i) {
                u128 nd = u128(divs[i]) * pe;
                if (nd <= cap) divs.push_back(static_cast<u64>(nd));
            }
        }
    }
    if (mm > 1) {
        std::size_t existing = divs.size();
        for (std::size_t i = 0; i < existing; ++i) {
            u128 nd = u128(divs[i]) * mm;
            if (nd <= cap) divs.push_back(static_cast<u64>(nd));
        }
    }
    std::vector<u64> out;
    for (u64 d : divs)
        if (d <= cap) out.push_back(d);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// All C3Ns with least prime p and n < X, by the AP/divisor method.
inline std::vector<TripleRecord> hii_for_p(u64 p, u128 X, const PerPLimits& lim,
                                           const PrimeBitmap* bitmap,
                                           bool enable_b_jump = false) {
    std::vector<TripleRecord> out;
    const u64 pp = p - 1;
    const u64 half = pp / 2;
    auto rho = detail::prime_factors_of(half);
    auto divisors = detail::divisors_up_to(half, lim.a_max);

    for (u64 A : divisors) {
        APState ap = build_ap_state(p, A, X, lim, rho);
        const u64 H = ap.H;
        for (std::size_t i = 0; i < ap.B1.size(); ++i) {
            u64 B = ap.B1[i], q = ap.q1[i];
            while (B <= ap.beta) {
                if (is_prime(q, bitmap)) {
                    Loop3State st{p, A, H, B, q, X};
                    bool keep = detail::for_each_cf_pair(st, ap.F_o, [&](u64 C, u64 F) {
                        (void)F;
                        u64 r = C * H + 1;
                        u128 n = u128(p) * q * r;
                        if (n < X && is_prime(r, bitmap))
                            out.push_back({p, q, r, n, Algo::HII, false, false});
                    });
                    if (!keep) break;   // F window collapsed; larger B cannot reopen it
                } else if (enable_b_jump) {
                    // Optional economy: when the F window is empty and the
                    // lower edge has not yet crossed F_o + 1, the pair-free B
                    // region extends to about 2p/(nu + alpha); land one AP
                    // term early to stay conservative.
                    long double nu = static_cast<long double>(ap.nu);
                    long double a2 = nu * nu - 4.0L * powl((long double)p, 3) * H * H /
                                                   static_cast<long double>(X);
                    if (a2 > 0) {
                        long double target = 2.0L * p / (nu + sqrtl(a2));
                        if (target > static_cast<long double>(B) + 2 * A) {
                            u64 jump = static_cast<u64>(target) - A;
                            u64 steps = (jump - B) / A;
                            if (steps > 1) {
                                B += (steps - 1) * A;
                                q += (steps - 1) * pp;
                            }
                        }
                    }
                }
                B += A;
                q += pp;
            }
        }
    }
    return out;
}

/// Cross-check: descending (E, D) pairs with 1 <= DE - p^2 < 2p - 2.
inline std::vector<TripleRecord> pi_for_p(u64 p, u128 X, const PrimeBitmap* bitmap) {
    std::vector<TripleRecord> out;
    const u64 pp = p - 1;
    const u128 p2 = u128(p) * p;
    for (u64 E = pp; E >= 2; --E) {
        u64 D_lo = static_cast<u64>(p2 / E) + 1;
        u64 D_hi = static_cast<u64>((p2 + 2 * p - 3) / E);
        for (u64 D = D_hi; D >= D_lo; --D) {
            u128 delta = u128(D) * E - p2;
            u128 num_q = u128(pp) * (p + E);
            u128 num_r = u128(pp) * (p + D);
            if (num_q % delta || num_r % delta) continue;
            u128 q = num_q / delta + 1;
            u128 r = num_r / delta + 1;
            if (q <= p || r <= q || r > ~0ull) continue;
            u128 n = q * r * p;
            if (n >= X) break;       // D descending drives n upward; next E
            if ((q * r - 1) % pp) continue;
            if (is_prime(static_cast<u64>(q), bitmap) && is_prime(static_cast<u64>(r), bitmap))
                out.push_back({p, static_cast<u64>(q), static_cast<u64>(r), n,
                               Algo::PI, false, false});
        }
    }
    return out;
}

/// Cross-check: for each prime q <= Z, solve r = w + u L1 with L1 = lcm(p', q')
/// and split (u ascending / E descending) on L1 E u + w' E - R' = 0.
inline std::vector<TripleRecord> pii_for_p(u64 p, u128 X, const PerPLimits& lim,
                                           const PrimeBitmap* bitmap) {
    std::vector<TripleRecord> out;
    const u64 pp = p - 1;
    auto try_r = [&](u64 q, u128 r, u128 Rp, u128 R) {
        if (r <= q) return;
        u128 rp = r - 1;
        if (Rp % rp) return;
        u128 E = Rp / rp;
        if (E < 2) return;
        u128 n = R * r;
        if (n < X && is_prime(static_cast<u64>(r), bitmap))
            out.push_back({p, q, static_cast<u64>(r), n, Algo::PII, false, false});
    };
    for (u64 q = p + 2; q <= lim.Z; q += 2) {
        if (!is_prime(q, bitmap)) continue;
        u64 H = gcd_u64(pp, q - 1);
        if (pp / H > lim.a_max) continue;
        u128 L1 = u128(pp) / H * (q - 1);
        u128 R = u128(p) * q;
        u128 Rp = R - 1;
        if (boost::multiprecision::gcd(exact_cmp::to_bigint(R), exact_cmp::to_bigint(L1)) != 1)
            continue;                 // n = 1 (mod L1) insoluble
        u128 w = mod_inverse(R % L1, L1);
        u128 r_cap = (X - 1) / R;
        if (r_cap <= q) continue;
        // u-trials while r'^2 < L1 R'
        u128 r = w;
        while (r <= q) r += L1;
        while ((r - 1) * (r - 1) < L1 * Rp && r <= r_cap) {
            try_r(q, r, Rp, R);
            r += L1;
        }
        // E-trials for the region beyond the crossover
        u128 E_hi = Rp / (r - 1);
        if (E_hi > p - 1) E_hi = p - 1;
        for (u128 E = E_hi; E >= 2; --E) {
            if (Rp % E) continue;
            u128 rp = Rp / E;
            if (rp % L1 != (w - 1) % L1) continue;
            u128 rr = rp + 1;
            if (rr > r_cap) continue;
            try_r(q, rr, Rp, R);
        }
    }
    return out;
}

/// Independent oracle: a plain triple loop over primes with direct
/// divisibility checks; no variable algebra, no bounds.
inline std::vector<TripleRecord> brute_oracle(u128 X, u128 cap = 2000000000,
                                              u64 p_lo = 3, u64 p_hi = 0) {
    if (X > cap) throw std::domain_error("brute_oracle: X exceeds the configured cap");
    std::vector<TripleRecord> out;
    u64 max_r = static_cast<u64>(X / 15) + 1;
    PrimeBitmap bm(max_r < 100 ? 100 : max_r);
    for (u64 p = 3; u128(p) * p * p < X; p = next_prime(p)) {
        if (p < p_lo || (p_hi && p > p_hi)) continue;
        for (u64 q = next_prime(p); u128(p) * q * q < X; q = next_prime(q)) {
            u128 pq = u128(p) * q;
            for (u64 r = q + 2;; r += 2) {
                u128 n = pq * r;
                if (n >= X) break;
                if (!bm.is_prime(r)) continue;
                if ((n - 1) % (p - 1) == 0 && (n - 1) % (q - 1) == 0 && (n - 1) % (r - 1) == 0)
                    out.push_back({p, q, r, n, Algo::BRUTE, false, false});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const TripleRecord& a, const TripleRecord& b) {
        return a.n != b.n ? a.n < b.n : a.p < b.p;
    });
    return out;
}

/// Full enumeration: union over p of the per-p searches, sorted by (n, p).
/// Deterministic for any worker count; triples inside the epsilon band of X
/// are individually re-verified with exact 128-bit arithmetic.
inline std::vector<TripleRecord> enumerate(const EnumerationConfig& cfg,
                                           const PrimeBitmap* shared_bitmap = nullptr) {
    if (cfg.X < 562) throw std::domain_error("enumerate: X must exceed 561");
    if (cfg.eps_den == 0 || cfg.eps_num * 10 > cfg.eps_den)
        throw std::domain_error("enumerate: epsilon must lie in (0, 0.1]");
    const u128 X = cfg.X;
    const u128 X_star = X + X / cfg.eps_den * cfg.eps_num;
    const u128 margin_lo = X - X / cfg.eps_den * cfg.eps_num;

    if (cfg.algo == Algo::BRUTE) {
        auto out = brute_oracle(X, cfg.brute_cap, cfg.p_lo, cfg.p_hi);
        for (auto& t : out) {
            t.margin = t.n >= margin_lo;
            if (cfg.run_audit) {
                auto res = derive_k3(t.p, t.q, t.r);
                t.audited = accepted(res) && value(res).all_prime() &&
                            audit(value(res), X).all_pass;
            }
        }
        return out;
    }

    SearchLimits sl = search_limits(X_star);
    u64 p_hi = cfg.p_hi ? cfg.p_hi : sl.p_M;

    // bitmap limit: the global q bound, clamped by the memory cap
    std::unique_ptr<PrimeBitmap> owned;
    const PrimeBitmap* bitmap = shared_bitmap;
    if (!bitmap) {
        u64 want = cfg.sieve_limit_override ? cfg.sieve_limit_override : sl.Q3;
        if (want < 1000) want = 1000;
        while (want / 16 > cfg.sieve_memory_cap) want /= 2;   // clamp; MR covers the rest
        owned = std::make_unique<PrimeBitmap>(want, 256 * 1024, cfg.sieve_memory_cap);
        bitmap = owned.get();
    }

    std::vector<u64> ps;
    for (u64 p = cfg.p_lo < 3 ? 3 : cfg.p_lo; p <= p_hi; p = next_prime(p))
        if (is_prime_u64(p)) ps.push_back(p);

    std::vector<std::vector<TripleRecord>> buckets(ps.size());
    std::atomic<std::size_t> next{0};
    unsigned workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > ps.size() && !ps.empty()) workers = static_cast<unsigned>(ps.size());

    auto run = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= ps.size()) return;
            u64 p = ps[i];
            PerPLimits lim = per_p_limits(p, X_star);
            switch (cfg.algo) {
                case Algo::HII:
                    buckets[i] = hii_for_p(p, X_star, lim, bitmap, cfg.enable_b_jump);
                    break;
                case Algo::PI:
                    buckets[i] = pi_for_p(p, X_star, bitmap);
                    break;
                case Algo::PII:
                    buckets[i] = pii_for_p(p, X_star, lim, bitmap);
                    break;
                case Algo::BRUTE: break;
            }
        }
    };
    if (workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }

    std::vector<TripleRecord> out;
    for (std::size_t i = 0; i < buckets.size(); ++i)
        for (auto& t : buckets[i]) {
            t.found_by = cfg.algo;
            if (t.n >= X) continue;              // X* overshoot trimmed exactly
            t.margin = t.n >= margin_lo;
            out.push_back(t);
        }
    std::sort(out.begin(), out.end(), [](const TripleRecord& a, const TripleRecord& b) {
        if (a.n != b.n) return a.n < b.n;
        return a.p < b.p;
    });

    if (cfg.run_audit) {
        std::atomic<std::size_t> ai{0};
        auto audit_run = [&]() {
            for (;;) {
                std::size_t i = ai.fetch_add(1);
                if (i >= out.size()) return;
                auto& t = out[i];
                auto res = derive_k3(t.p, t.q, t.r, bitmap);
                t.audited = accepted(res) && value(res).all_prime() &&
                            audit(value(res), X).all_pass &&
                            u128(t.p) * t.q * t.r == t.n && t.n < X;
            }
        };
        if (workers <= 1) audit_run();
        else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w) pool.emplace_back(audit_run);
            for (auto& th : pool) th.join();
        }
    }
    return out;
}

} // namespace c3
