#pragma once

// Bitmap prime database: one bit per odd integer in [3, limit], built by a
// segmented sieve. Bulk q-primality queries during enumeration hit this
// instead of the single-number test; memory is ~limit/16 bytes.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <stdexcept>
#include <string>
#include <vector>

#include "c3/primality.hpp"
#include "c3/wide_uint.hpp"

namespace c3 {

class PrimeBitmap {
public:
    /// Builds the bitmap over [3, limit] by segmented sieving.
    /// segment_bytes is the working-set size per segment (L2-sized by default).
    /// Throws std::length_error if the bitmap would exceed memory_cap_bytes.
    explicit PrimeBitmap(u64 limit, std::size_t segment_bytes = 256 * 1024,
                         u64 memory_cap_bytes = DEFAULT_MEMORY_CAP)
        : limit_(limit < 3 ? 3 : limit) {
        if (limit < 3) throw std::invalid_argument("PrimeBitmap: limit must be >= 3");
        u64 bits = bit_count(limit_);
        u64 words = (bits + 63) / 64;
        if (words * 8 > memory_cap_bytes)
            throw std::length_error("PrimeBitmap: limit " + std::to_string(limit_) +
                                    " exceeds the memory cap");
        words_.assign(static_cast<std::size_t>(words), ~0ull);
        build(segment_bytes);
    }

    u64 limit() const { return limit_; }
    u64 memory_bytes() const { return words_.size() * 8; }

    /// Primality of any n <= limit (handles 2 and evens).
    bool is_prime(u64 n) const {
        if (n < 2) return false;
        if (n == 2) return true;
        if ((n & 1) == 0) return false;
        return test_odd(n);
    }

    /// Raw bit for odd n in [3, limit].
    bool test_odd(u64 n) const {
        u64 i = (n - 3) >> 1;
        return (words_[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1;
    }

    u64 count_primes() const {
        u64 c = 0;
        for (u64 w : words_) c += static_cast<u64>(__builtin_popcountll(w));
        return c;
    }

    // --- on-disk cache -----------------------------------------------------
    // 16-byte header: magic "C3BM", u32 version, u64 limit (little endian),
    // then the raw word payload.

    void save(const std::string& path) const {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        if (!f) throw std::runtime_error("PrimeBitmap: cannot write " + path);
        char header[16] = {'C', '3', 'B', 'M'};
        u32 version = 1;
        std::memcpy(header + 4, &version, 4);
        std::memcpy(header + 8, &limit_, 8);
        bool ok = std::fwrite(header, 1, 16, f) == 16 &&
                  std::fwrite(words_.data(), 8, words_.size(), f) == words_.size();
        std::fclose(f);
        if (!ok) throw std::runtime_error("PrimeBitmap: short write to " + path);
    }

    static PrimeBitmap load(const std::string& path) {
        std::FILE* f = std::fopen(path.c_str(), "rb");
        if (!f) throw std::runtime_error("PrimeBitmap: cannot read " + path);
        char header[16];
        if (std::fread(header, 1, 16, f) != 16 || std::memcmp(header, "C3BM", 4) != 0) {
            std::fclose(f);
            throw std::runtime_error("PrimeBitmap: bad cache header in " + path);
        }
        u32 version;
        u64 limit;
        std::memcpy(&version, header + 4, 4);
        std::memcpy(&limit, header + 8, 8);
        if (version != 1) {
            std::fclose(f);
            throw std::runtime_error("PrimeBitmap: unsupported cache version");
        }
        PrimeBitmap bm(private_tag{}, limit);
        std::size_t want = bm.words_.size();
        bool ok = std::fread(bm.words_.data(), 8, want, f) == want;
        std::fclose(f);
        if (!ok) throw std::runtime_error("PrimeBitmap: truncated cache " + path);
        return bm;
    }

    static constexpr u64 DEFAULT_MEMORY_CAP = 1ull << 30;   // 1 GiB of bitmap

private:
    struct private_tag {};
    PrimeBitmap(private_tag, u64 limit) : limit_(limit) {
        words_.assign(static_cast<std::size_t>((bit_count(limit_) + 63) / 64), 0);
    }

    static u64 bit_count(u64 limit) { return limit < 3 ? 0 : (limit - 3) / 2 + 1; }

    void clear_odd(u64 n) {
        u64 i = (n - 3) >> 1;
        words_[static_cast<std::size_t>(i >> 6)] &= ~(1ull << (i & 63));
    }

    void build(std::size_t segment_bytes) {
        // base odd primes up to sqrt(limit) from a classical byte sieve
        u64 root = isqrt(limit_);
        std::vector<std::uint8_t> small(static_cast<std::size_t>(root) + 1, 1);
        std::vector<u64> base;
        for (u64 i = 3; i <= root; i += 2) {
            if (!small[static_cast<std::size_t>(i)]) continue;
            base.push_back(i);
            for (u64 j = i * i; j <= root; j += 2 * i) small[static_cast<std::size_t>(j)] = 0;
        }
        if (segment_bytes < 1024) segment_bytes = 1024;
        u64 span = static_cast<u64>(segment_bytes) * 16;   // odd values covered per segment
        for (u64 lo = 3; lo <= limit_; lo += span) {
            u64 hi = (limit_ - lo < span - 1) ? limit_ : lo + span - 1;
            for (u64 p : base) {
                u64 p2 = p * p;
                if (p2 > hi) break;
                u64 start = p2 >= lo ? p2 : ((lo + p - 1) / p) * p;
                if ((start & 1) == 0) start += p;
                for (u64 m = start; m <= hi; m += 2 * p) clear_odd(m);
            }
        }
        // zero the padding bits of the last word so popcounts are exact
        u64 bits = bit_count(limit_);
        if (u64 tail = bits & 63; tail != 0)
            words_.back() &= (1ull << tail) - 1;
    }

    u64 limit_;
    std::vector<u64> words_;
};

/// Exact primality: bitmap when n is covered, deterministic test otherwise.
inline bool is_prime(u64 n, const PrimeBitmap* bitmap = nullptr) {
    if (bitmap && n <= bitmap->limit()) return bitmap->is_prime(n);
    return is_prime_u64(n);
}

} // namespace c3
