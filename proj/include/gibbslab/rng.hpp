#pragma once

#include <cstdint>

namespace gibbslab {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
// Streams keyed by (seed, stream) are statistically independent, so
// parallel chains can simply use their chain index as the stream id and
// the whole run stays reproducible regardless of thread scheduling.
class PhiloxRng {
public:
    explicit PhiloxRng(std::uint64_t seed = 0, std::uint64_t stream = 0)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

    std::uint32_t next_u32() {
        if (have_ == 0) refill();
        return block_[--have_];
    }

    std::uint64_t next_u64() {
        std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform double in [0,1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n) via rejection.
    std::uint32_t uniform_below(std::uint32_t n) {
        std::uint64_t x = next_u32();
        std::uint64_t m = x * n;
        auto lo = static_cast<std::uint32_t>(m);
        if (lo < n) {
            std::uint32_t threshold = (0u - n) % n;
            while (lo < threshold) {
                x = next_u32();
                m = x * n;
                lo = static_cast<std::uint32_t>(m);
            }
        }
        return static_cast<std::uint32_t>(m >> 32);
    }

    bool bernoulli(double prob) { return next_double() < prob; }

    /// Raw block generation for known-answer tests.
    static void philox4x32(const std::uint32_t ctr_in[4],
                           const std::uint32_t key_in[2],
                           std::uint32_t out[4]) {
        std::uint32_t c0 = ctr_in[0], c1 = ctr_in[1], c2 = ctr_in[2],
                      c3 = ctr_in[3];
        std::uint32_t k0 = key_in[0], k1 = key_in[1];
        for (int round = 0; round < 10; ++round) {
            std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c0;
            std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c2;
            std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            std::uint32_t n0 = hi1 ^ c1 ^ k0;
            std::uint32_t n1 = lo1;
            std::uint32_t n2 = hi0 ^ c3 ^ k1;
            std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += kW0;
            k1 += kW1;
        }
        out[0] = c0;
        out[1] = c1;
        out[2] = c2;
        out[3] = c3;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    void refill() {
        std::uint32_t ctr[4] = {static_cast<std::uint32_t>(draw_),
                                static_cast<std::uint32_t>(draw_ >> 32),
                                stream_lo_, stream_hi_};
        std::uint32_t key[2] = {key0_, key1_};
        philox4x32(ctr, key, block_);
        ++draw_;
        have_ = 4;
    }

    std::uint32_t key0_, key1_;
    std::uint32_t stream_lo_, stream_hi_;
    std::uint64_t draw_ = 0;
    std::uint32_t block_[4] = {0, 0, 0, 0};
    int have_ = 0;
};

}  // namespace gibbslab
