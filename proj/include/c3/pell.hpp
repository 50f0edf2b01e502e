#pragma once

// Pell machinery for the chain families.
//
// The chains advance a solution (phi, theta) of phi^2 - D theta^2 = k by the
// SQUARE of the fundamental unit of x^2 - D y^2 = 1; squaring is what fixes
// phi mod 2D, which the admissibility congruences need. Seeds are found per
// epsilon-class via Nagell's bound, normalised to the minimal positive
// element m of each class; {m, eps*m} are then the minima of the two
// eps^2-orbits inside that class.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "c3/wide_uint.hpp"

namespace c3 {

struct PellUnit {
    u64 x = 0, y = 0;   // fundamental solution of x^2 - D y^2 = 1
};

/// Continued-fraction expansion of sqrt(D); D must not be a perfect square.
inline PellUnit pell_fundamental(u64 D) {
    u64 a0 = isqrt(D);
    if (a0 * a0 == D) throw std::domain_error("pell_fundamental: D is a square");
    u64 m = 0, d = 1, a = a0;
    u128 num1 = 1, num = a0, den1 = 0, den = 1;
    while (num * num != static_cast<u128>(D) * den * den + 1) {
        m = d * a - m;
        d = (D - m * m) / d;
        a = (a0 + m) / d;
        u128 tn = a * num + num1;
        num1 = num; num = tn;
        u128 td = a * den + den1;
        den1 = den; den = td;
        if (num > U128_MAX >> 20) throw std::overflow_error("pell_fundamental: unit too large");
    }
    if (num > ~0ull || den > ~0ull) throw std::overflow_error("pell_fundamental: unit exceeds 64 bits");
    return {static_cast<u64>(num), static_cast<u64>(den)};
}

/// Solution of phi^2 - D theta^2 = k (k may be negative; theta kept positive).
struct PellPoint {
    i128 phi = 0;
    i128 theta = 0;
};

/// One step of the eps action (phi,theta) -> (x phi + D y theta, y phi + x theta).
inline PellPoint eps_apply(const PellPoint& v, u64 D, const PellUnit& u, bool inverse = false) {
    i128 x = u.x, y = inverse ? -i128(u.y) : i128(u.y);
    return {x * v.phi + i128(D) * y * v.theta, y * v.phi + x * v.theta};
}

/// One step of the eps^2 action; this is the chain recurrence
/// phi' = (2Dy^2+1) phi + 2Dxy theta, theta' = 2xy phi + (2Dy^2+1) theta.
inline bool eps2_apply_checked(const PellPoint& v, u64 D, const PellUnit& u, PellPoint& out) {
    u128 m11 = 2 * static_cast<u128>(D) * u.y * u.y + 1;
    u128 m12 = 2 * static_cast<u128>(D) * u.x * u.y;
    u128 m21 = 2 * static_cast<u128>(u.x) * u.y;
    // growth guard: keep well inside i128
    constexpr i128 CAP = i128(1) << 100;
    if (v.phi > CAP / static_cast<i128>(m11) || v.theta > CAP / static_cast<i128>(m11))
        return false;
    out.phi = static_cast<i128>(m11) * v.phi + static_cast<i128>(m12) * v.theta;
    out.theta = static_cast<i128>(m21) * v.phi + static_cast<i128>(m11) * v.theta;
    return true;
}

namespace detail {

inline bool is_square_u128(u128 v, u64& root) {
    root = isqrt(v);
    return static_cast<u128>(root) * root == v;
}

} // namespace detail

/// All eps^2-orbit minima (positive phi, theta) of phi^2 - D theta^2 = k,
/// k < 0, D nonsquare. Ascending by phi.
inline std::vector<PellPoint> pell_orbit_minima(u64 D, i64 k) {
    if (k >= 0) throw std::domain_error("pell_orbit_minima: expect k < 0");
    PellUnit u = pell_fundamental(D);
    // Nagell: every eps-class has a representative with
    // 0 < theta <= y1 sqrt(-k) / sqrt(2(x1 - 1)); generous slack added.
    long double b = u.y * sqrtl(static_cast<long double>(-k)) /
                    sqrtl(2.0L * (u.x - 1));
    u64 theta_hi = static_cast<u64>(b) + u.y + 2;
    std::vector<PellPoint> minima;
    auto note_chain = [&](PellPoint w) {
        // normalise to the minimal strictly-positive element of the eps-chain
        while (w.phi <= 0 || w.theta <= 0) w = eps_apply(w, D, u);
        for (;;) {
            PellPoint back = eps_apply(w, D, u, /*inverse=*/true);
            if (back.phi > 0 && back.theta > 0) w = back;
            else break;
        }
        for (const auto& m : minima)
            if (m.phi == w.phi && m.theta == w.theta) return;
        minima.push_back(w);
    };
    for (u64 th = 1; th <= theta_hi; ++th) {
        u128 v = static_cast<u128>(D) * th * th;
        u128 need = v - static_cast<u128>(-k);
        if (v < static_cast<u128>(-k)) continue;
        u64 phi;
        if (!detail::is_square_u128(need, phi)) continue;
        note_chain({i128(phi), i128(th)});
        if (phi != 0) note_chain({-i128(phi), i128(th)});
    }
    // each chain minimum m spawns two eps^2-orbits: m and eps*m
    std::vector<PellPoint> out;
    for (const auto& m : minima) {
        out.push_back(m);
        out.push_back(eps_apply(m, D, u));
    }
    // dedupe + sort by phi
    std::vector<PellPoint> uniq;
    for (const auto& v : out) {
        bool seen = false;
        for (const auto& w : uniq) seen = seen || (w.phi == v.phi && w.theta == v.theta);
        if (!seen) uniq.push_back(v);
    }
    for (std::size_t i = 0; i < uniq.size(); ++i)
        for (std::size_t j = i + 1; j < uniq.size(); ++j)
            if (uniq[j].phi < uniq[i].phi) std::swap(uniq[i], uniq[j]);
    return uniq;
}

/// Positive solutions of phi^2 - m^2 theta^2 = k for square D = m^2 (finite);
/// by factoring k = (phi - m theta)(phi + m theta).
inline std::vector<PellPoint> pell_square_solutions(u64 m, i64 k) {
    std::vector<PellPoint> out;
    u64 ak = static_cast<u64>(k < 0 ? -k : k);
    for (u64 d1 = 1; d1 * d1 <= ak; ++d1) {
        if (ak % d1) continue;
        u64 d2 = ak / d1;
        // k < 0: phi + m theta = d2, m theta - phi = d1
        if (k < 0) {
            if ((d2 - d1) % 2 == 0 && (d1 + d2) % (2 * m) == 0) {
                out.push_back({i128((d2 - d1) / 2), i128((d1 + d2) / (2 * m))});
            }
        } else {
            if ((d1 + d2) % 2 == 0 && d2 >= d1 && (d2 - d1) % (2 * m) == 0) {
                out.push_back({i128((d1 + d2) / 2), i128((d2 - d1) / (2 * m))});
            }
        }
    }
    return out;
}

} // namespace c3
