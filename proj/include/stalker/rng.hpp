#pragma once

#include <array>
#include <cstdint>
#include <cmath>

namespace stalker {

// Counter-based PRNG (Philox4x64-10).  A (seed, stream_id) pair selects an
// independent stream; replicas of an experiment each get their own stream_id
// so results do not depend on how work is scheduled across threads.
class RngStream {
public:
    using result_type = std::uint64_t;

    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : key_{seed, stream_id} {}

    std::uint64_t next_u64() {
        if (buf_pos_ == 4) refill();
        return buf_[buf_pos_++];
    }

    // uniform on [0,1), 53-bit resolution
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform on (0,1]; safe to pass to log()
    double uniform_pos() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal via Box-Muller; second variate of each pair is cached
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform_pos();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925287 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    // unbiased integer in [0, n)
    std::uint64_t uniform_below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    std::uint64_t seed() const { return key_[0]; }
    std::uint64_t stream_id() const { return key_[1]; }

    // UniformRandomBitGenerator interface
    static constexpr std::uint64_t min() { return 0; }
    static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }
    std::uint64_t operator()() { return next_u64(); }

private:
    static constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    static constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    static constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    static constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;

    static void round(std::array<std::uint64_t, 4>& c,
                      const std::array<std::uint64_t, 2>& k) {
        unsigned __int128 p0 = static_cast<unsigned __int128>(M0) * c[0];
        unsigned __int128 p1 = static_cast<unsigned __int128>(M1) * c[2];
        std::uint64_t hi0 = static_cast<std::uint64_t>(p0 >> 64);
        std::uint64_t lo0 = static_cast<std::uint64_t>(p0);
        std::uint64_t hi1 = static_cast<std::uint64_t>(p1 >> 64);
        std::uint64_t lo1 = static_cast<std::uint64_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    void refill() {
        // advance the 256-bit counter first, then encrypt it (the convention
        // of the reference implementation our test vectors come from)
        for (int i = 0; i < 4; ++i) {
            if (++ctr_[i] != 0) break;
        }
        std::array<std::uint64_t, 4> c = ctr_;
        std::array<std::uint64_t, 2> k = key_;
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k[0] += W0;
                k[1] += W1;
            }
            round(c, k);
        }
        buf_ = c;
        buf_pos_ = 0;
    }

    std::array<std::uint64_t, 2> key_;
    std::array<std::uint64_t, 4> ctr_{0, 0, 0, 0};
    std::array<std::uint64_t, 4> buf_{};
    int buf_pos_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace stalker
