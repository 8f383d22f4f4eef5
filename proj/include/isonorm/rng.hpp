#pragma once

#include <cstdint>
#include <cmath>
#include <stdexcept>

namespace isonorm {

/// Identifies an independent random stream. Equal keys reproduce equal
/// sequences on any worker layout; distinct keys give statistically
/// independent streams.
struct RngKey {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    /// Deterministic child stream for an independent sub-task.
    RngKey derive(std::uint64_t tag) const
    {
        std::uint64_t z = stream_id * 0x9e3779b97f4a7c15ULL + tag + 1;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return RngKey{seed, z ^ (z >> 31)};
    }

    friend bool operator==(const RngKey&, const RngKey&) = default;
};

/// Counter-based generator (Philox4x32-10). A draw is a pure function of
/// (seed, stream_id, substream, counter), so batches keyed by substream can
/// be produced in any order, on any number of workers, with identical bits.
class Rng {
public:
    explicit Rng(RngKey key, std::uint32_t substream = 0)
        : key_(key), substream_(substream) {}

    RngKey key() const { return key_; }
    std::uint32_t substream() const { return substream_; }

    std::uint32_t next_u32() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        const std::uint64_t hi = next_u32();
        return lo | (hi << 32);
    }

    /// Uniform on the open interval (0,1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (-1,1).
    double uniform_sym() { return 2.0 * uniform01() - 1.0; }

    /// Uniform on (lo,hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint32_t mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        *hi = static_cast<std::uint32_t>(p >> 32);
        return static_cast<std::uint32_t>(p);
    }

    void refill() {
        // counter block: (c0,c1) = 64-bit block index, c2 = substream,
        // c3 = stream_id low word; key = seed, bumped with stream_id high word.
        std::uint32_t c0 = static_cast<std::uint32_t>(block_);
        std::uint32_t c1 = static_cast<std::uint32_t>(block_ >> 32);
        std::uint32_t c2 = substream_;
        std::uint32_t c3 = static_cast<std::uint32_t>(key_.stream_id);
        std::uint32_t k0 = static_cast<std::uint32_t>(key_.seed) ^
                           static_cast<std::uint32_t>(key_.stream_id >> 32);
        std::uint32_t k1 = static_cast<std::uint32_t>(key_.seed >> 32);
        for (int round = 0; round < 10; ++round) {
            std::uint32_t hi0, hi1;
            const std::uint32_t lo0 = mulhilo(0xD2511F53u, c0, &hi0);
            const std::uint32_t lo1 = mulhilo(0xCD9E8D57u, c2, &hi1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            c0 = n0;
            c1 = lo1;
            c2 = n2;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_[0] = c0;
        buf_[1] = c1;
        buf_[2] = c2;
        buf_[3] = c3;
        buf_pos_ = 0;
        if (++block_ == 0)
            throw std::runtime_error("Rng: substream counter exhausted");
    }

    RngKey key_;
    std::uint32_t substream_ = 0;
    std::uint64_t block_ = 0;
    std::uint32_t buf_[4] = {0, 0, 0, 0};
    int buf_pos_ = 4;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

} // namespace isonorm
