#pragma once

// Parametric K3 families: the Chernick universal forms, the extremal families
// (q-maximal, r-n-maximal, maximal-C, flat, n4) and the two Pell-driven
// chains. Every generated member is pushed through derive_k3, so the family
// algebra is re-verified on the way out.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "c3/korselt.hpp"
#include "c3/pell.hpp"
#include "c3/wide_uint.hpp"

namespace c3 {

struct FamilyMember {
    std::string family;
    std::vector<i64> params;
    u64 p = 0, q = 0, r = 0;
    u128 n = 0;
    K3Profile profile;
    TripleClass cls = TripleClass::not_korselt;
};

namespace detail {

/// Builds a member from a closed-form triple; nullopt when the parameter
/// point is not a Korselt triple (E = 1 at the family edge, say).
inline std::optional<FamilyMember> make_member(std::string family, std::vector<i64> params,
                                               u128 p, u128 q, u128 r) {
    constexpr u128 cap = ~0ull;
    if (p < 3 || q <= p || r <= q || r > cap) return std::nullopt;
    auto res = derive_k3(static_cast<u64>(p), static_cast<u64>(q), static_cast<u64>(r));
    if (!accepted(res)) return std::nullopt;
    FamilyMember m;
    m.family = std::move(family);
    m.params = std::move(params);
    m.p = static_cast<u64>(p);
    m.q = static_cast<u64>(q);
    m.r = static_cast<u64>(r);
    m.profile = value(res);
    m.n = m.profile.n;
    m.cls = m.profile.all_prime() ? TripleClass::C3N : TripleClass::K3N_only;
    return m;
}

} // namespace detail

// --- Chernick universal forms ------------------------------------------------

struct ChernickForm {
    u64 A = 0, B = 0, C = 0;
    u64 ell = 0;      // ABC
    u64 H_o = 0;      // unique base solution in [1, ell]
    u64 F = 0;
    bool ell_odd = false;
};

/// Unique (H_o, F) with H(AB+AC+BC) + A+B+C = F*ABC and 1 <= H_o <= ABC,
/// found by modular inverse (the two sums are coprime for coprime A, B, C).
inline ChernickForm chernick_solve(u64 A, u64 B, u64 C) {
    if (!(A < B && B < C))
        throw std::domain_error("chernick_solve: need A < B < C");
    if (gcd_u64(A, B) != 1 || gcd_u64(A, C) != 1 || gcd_u64(B, C) != 1)
        throw std::domain_error("chernick_solve: A, B, C must be pairwise coprime");
    ChernickForm f;
    f.A = A; f.B = B; f.C = C;
    u128 ell = u128(A) * B * C;
    if (ell > ~0ull) throw std::domain_error("chernick_solve: ABC exceeds 64 bits");
    f.ell = static_cast<u64>(ell);
    u64 s2 = static_cast<u64>((u128(A) * B + u128(A) * C + u128(B) * C) % f.ell);
    u64 s1 = (A + B + C) % f.ell;
    u64 inv = static_cast<u64>(mod_inverse(s2, f.ell));
    u64 Ho = static_cast<u64>((u128(f.ell - s1) * inv) % f.ell);
    if (Ho == 0) Ho = f.ell;
    f.H_o = Ho;
    f.F = static_cast<u64>((u128(Ho) * (u128(A) * B + u128(A) * C + u128(B) * C) + A + B + C) /
                           ell);
    f.ell_odd = (f.ell & 1) != 0;
    return f;
}

/// Member u of the family. For odd ell, H alternates parity with t, so the
/// clean parameter is u with t = 2u (H_o even) or t = 2u + 1 (H_o odd);
/// for even ell, t = u directly.
inline std::optional<FamilyMember> chernick_member(const ChernickForm& f, u64 u) {
    u128 t = f.ell_odd ? (2 * u128(u) + (f.H_o % 2 == 1 ? 1 : 0)) : u128(u);
    u128 H = f.H_o + t * f.ell;
    return detail::make_member("chernick",
                               {(i64)f.A, (i64)f.B, (i64)f.C, (i64)u},
                               f.A * H + 1, f.B * H + 1, f.C * H + 1);
}

// --- closed-form families -----------------------------------------------------

/// p = s^2+s+1, q = 2s^4+3s^3+3s^2+2s+1, r = 2s^4+5s^3+6s^2+3s+1.
inline std::optional<FamilyMember> q_maximal(u64 s) {
    if (s < 1) throw std::domain_error("q_maximal: s >= 1");
    u128 S = s;
    u128 p = S * S + S + 1;
    u128 q = 2 * S * S * S * S + 3 * S * S * S + 3 * S * S + 2 * S + 1;
    u128 r = 2 * S * S * S * S + 5 * S * S * S + 6 * S * S + 3 * S + 1;
    return detail::make_member("qmax", {(i64)s}, p, q, r);
}

/// p = P, q = P^2+P-1, r = (P-1)(P+1)^2/2 + 1; attains the r and n bounds given P.
inline std::optional<FamilyMember> rn_maximal(u64 P) {
    if (P < 3 || (P & 1) == 0) throw std::domain_error("rn_maximal: P odd >= 3");
    u128 PP = P;
    return detail::make_member("rnmax", {(i64)P}, PP, PP * PP + PP - 1,
                               (PP - 1) * (PP + 1) * (PP + 1) / 2 + 1);
}

/// p = H^2+H+1, q = H^3+H^2+3H+1, r = (H^5+2H^4+5H^3+5H^2+4H+2)/2; the
/// maximal-C family. H even, H != 2 (mod 3); only H = 0 (mod 6) can be C3N.
inline std::optional<FamilyMember> max_c_family(u64 H) {
    if (H < 2 || (H & 1) || H % 3 == 2)
        throw std::domain_error("max_c_family: H even with H % 3 != 2");
    u128 h = H;
    u128 p = h * h + h + 1;
    u128 q = h * h * h + h * h + 3 * h + 1;
    u128 r = (h * h * h * h * h + 2 * h * h * h * h + 5 * h * h * h + 5 * h * h + 4 * h + 2) / 2;
    return detail::make_member("maxc", {(i64)H}, p, q, r);
}

/// p = t^4+2t^3+2t^2+t+1 etc.; B approaches its n-bound along this family.
inline std::optional<FamilyMember> n4_family(u64 t) {
    if (t < 1) throw std::domain_error("n4_family: t >= 1");
    u128 T = t;
    u128 p = T * T * T * T + 2 * T * T * T + 2 * T * T + T + 1;
    u128 q = 2 * T * T * T * T * T * T + 5 * T * T * T * T * T + 6 * T * T * T * T +
             4 * T * T * T + 3 * T * T + 2 * T + 1;
    u128 r = 2 * T * T * T * T * T * T + 7 * T * T * T * T * T + 11 * T * T * T * T +
             10 * T * T * T + 7 * T * T + 3 * T + 1;
    return detail::make_member("n4", {(i64)t}, p, q, r);
}

/// (A,B,C) = (2u-1, 2u, 2u+1) Chernick-type family with base H = B(B^2-4)/2:
/// flat (r/p < 1.5) for u >= 3. Domain: u = 1 with t >= 1, or u > 1, t >= 0.
inline std::optional<FamilyMember> flat_family(u64 u, u64 t) {
    if (u < 1 || (u == 1 && t < 1)) throw std::domain_error("flat_family: domain");
    u128 B = 2 * u128(u);
    u128 base = B * B - 4 + 2 * (B * B - 1) * t;
    u128 p = B * (B - 1) / 2 * base + 1;
    u128 q = B * B / 2 * base + 1;
    u128 r = B * (B + 1) / 2 * base + 1;
    return detail::make_member("flat", {(i64)u, (i64)t}, p, q, r);
}

// --- Pell chains ---------------------------------------------------------------

/// F-chain state: phi = 2FA - 2 = 2H, theta = 2s + 1, phi^2 - F theta^2 = 4 - 5F.
/// Each admissible (phi = -2 mod 2F, theta odd) solution maps to a triple with
/// G = eta = 1 whose B sits just under the B-given-p bound.
inline std::vector<FamilyMember> pell_chain_F(u64 F, unsigned steps) {
    if (F < 3 || (F & 1) == 0)
        throw std::domain_error("pell_chain_F: F odd >= 3");
    i64 k = 4 - 5 * static_cast<i64>(F);
    auto seeds = pell_orbit_minima(F, k);
    std::vector<PellPoint> chain;
    for (const auto& s : seeds) {
        if (s.theta % 2 == 1 && (s.phi + 2) % (2 * i128(F)) == 0) chain.push_back(s);
    }
    if (chain.empty())
        throw std::domain_error("pell_chain_F: no admissible fundamental solution for F = " +
                                std::to_string(F));
    PellUnit unit = pell_fundamental(F);
    std::vector<FamilyMember> out;
    while (out.size() < steps && !chain.empty()) {
        // advance the smallest state
        std::size_t best = 0;
        for (std::size_t i = 1; i < chain.size(); ++i)
            if (chain[i].phi < chain[best].phi) best = i;
        PellPoint v = chain[best];
        if (v.phi > i128(std::numeric_limits<i64>::max())) break;
        PellPoint next;
        if (eps2_apply_checked(v, F, unit, next)) chain[best] = next;
        else chain.erase(chain.begin() + best);

        bool acceptable = !(v.phi % 5 == 3 && v.theta % 5 == 0);
        if (!acceptable) continue;
        u128 A = static_cast<u128>((v.phi + 2) / (2 * i128(F)));
        u128 s = static_cast<u128>((v.theta - 1) / 2);
        u128 H = A * F - 1;
        if (H > (~0ull >> 1)) break;   // mapped triple leaves 64-bit range
        u128 p = A * H + 1;
        u128 B = 2 * p - s;
        u128 q, r, C = 2 * p + s + 1;
        if (!mul_checked(B, H, q) || !mul_checked(C, H, r)) break;
        q += 1; r += 1;
        u128 n;
        if (!mul_checked(p * q, r, n)) break;
        auto m = detail::make_member("pell-f",
                                     {(i64)F, (i64)v.phi, (i64)v.theta}, p, q, r);
        if (m) out.push_back(std::move(*m));
    }
    return out;
}

/// eta-chain: phi = 2 eta H + eta - 1, theta = 2s + eta,
/// phi^2 - eta theta^2 = -(eta^3 + 3 eta^2 - 2 eta - 1); F = G = 1 members.
/// Admissible solutions need theta = eta (mod 2) and phi = eta - 1 (mod 4 eta).
inline std::vector<FamilyMember> pell_chain_eta(u64 eta, unsigned steps) {
    if (eta == 1 || eta == 2 || eta == 5)
        throw std::domain_error("pell_chain_eta: no solutions for eta = " +
                                std::to_string(eta));
    if (eta < 3) throw std::domain_error("pell_chain_eta: eta >= 3");
    i64 k = -static_cast<i64>(eta * eta * eta + 3 * eta * eta - 2 * eta - 1);
    u64 sq = isqrt(eta);
    bool square = sq * sq == eta;
    std::vector<PellPoint> states;
    for (const auto& s : (square ? pell_square_solutions(sq, k) : pell_orbit_minima(eta, k))) {
        bool adm = ((s.theta - i128(eta)) % 2 == 0) &&
                   ((s.phi % (4 * i128(eta))) == i128(eta) - 1);
        if (adm) states.push_back(s);
    }
    std::vector<FamilyMember> out;
    PellUnit unit{};
    if (!square) unit = pell_fundamental(eta);
    while (out.size() < steps && !states.empty()) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < states.size(); ++i)
            if (states[i].phi < states[best].phi) best = i;
        PellPoint v = states[best];
        if (v.phi > i128(std::numeric_limits<i64>::max())) break;
        PellPoint next;
        if (!square && eps2_apply_checked(v, eta, unit, next)) states[best] = next;
        else states.erase(states.begin() + best);

        if (v.phi % 5 == 3 && v.theta % 5 == 0) continue;
        u128 H = static_cast<u128>((v.phi - i128(eta) + 1) / (2 * i128(eta)));
        if (H > (~0ull >> 2) || H < 2) continue;
        u128 theta = static_cast<u128>(v.theta);
        u128 p = H * H + H + 1;
        u128 B = 2 * H * H + 2 * H + 2;
        if (theta > B + eta) continue;               // B must stay positive
        B = B - (theta - eta) / 2;
        u128 C = B + theta;
        u128 q, r;
        if (!mul_checked(B, H, q) || !mul_checked(C, H, r)) break;
        q += 1; r += 1;
        u128 n;
        if (!mul_checked(p * q, r, n)) break;
        auto m = detail::make_member("pell-eta",
                                     {(i64)eta, (i64)v.phi, (i64)v.theta}, p, q, r);
        if (m) out.push_back(std::move(*m));
    }
    return out;
}

// --- scanning -------------------------------------------------------------------

/// Parameters in [lo, hi] whose member is a C3N. For rnmax only odd P are
/// visited; for maxc the parameter is t with H = 6t (the only residue that
/// can carry primes); flat scans t for a fixed u; chernick scans u for a
/// fixed coprime (A, B, C).
inline std::vector<u64> scan_family(const std::string& name, u64 lo, u64 hi,
                                    const std::vector<u64>& fixed = {}) {
    std::optional<ChernickForm> form;
    if (name == "chernick") {
        if (fixed.size() != 3) throw std::domain_error("chernick scan needs A,B,C");
        form = chernick_solve(fixed[0], fixed[1], fixed[2]);
    } else if (name == "flat" && fixed.size() != 1) {
        throw std::domain_error("flat scan needs fixed u");
    }
    std::vector<u64> hits;
    for (u64 v = lo; v <= hi; ++v) {
        std::optional<FamilyMember> m;
        if (name == "qmax") m = q_maximal(v);
        else if (name == "rnmax") {
            if ((v & 1) == 0) continue;
            m = rn_maximal(v);
        } else if (name == "maxc") m = max_c_family(6 * v);
        else if (name == "n4") m = n4_family(v);
        else if (name == "flat") m = flat_family(fixed[0], v);
        else if (name == "chernick") m = chernick_member(*form, v);
        else throw std::domain_error("scan_family: unknown family " + name);
        if (m && m->cls == TripleClass::C3N) hits.push_back(v);
    }
    return hits;
}

} // namespace c3
