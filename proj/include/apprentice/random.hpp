#pragma once

#include <cmath>
#include <cstdint>

namespace apprentice {

/**
 * Counter-based pseudorandom stream.
 *
 * Output i of a stream with key K is mix64(K + (i+1)*PHI), the splitmix64
 * sequence seeded with K.  The generator is a pure function of (key, counter),
 * so streams can be split into independent substreams without sharing state:
 * substream(id) derives a child key by hashing (key, id).  All sampling
 * helpers are hand-rolled so results are identical across platforms and
 * standard libraries.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : key_(seed), counter_(0) {}

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ull;
        return mix64(key_ + counter_);
    }

    /// Uniform double in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in {0, ..., n-1}. Requires n >= 1.
    std::uint32_t next_index(std::uint32_t n) {
        return static_cast<std::uint32_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Standard normal via Box-Muller (two uniforms per pair, one cached).
    double next_gaussian();

    /// Independent child stream; deterministic function of (key, id).
    RandomStream substream(std::uint64_t id) const {
        return RandomStream(mix64(key_ ^ mix64(id + 0x632BE59BD9B4E019ull)));
    }

    static std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

inline double RandomStream::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1, u2, s;
    do {
        u1 = 2.0 * next_double() - 1.0;
        u2 = 2.0 * next_double() - 1.0;
        s = u1 * u1 + u2 * u2;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = u2 * m;
    has_spare_ = true;
    return u1 * m;
}

/**
 * Sample an index from an unnormalized-tolerant categorical row by cumulative
 * scan.  Returns the last index with positive probability if rounding pushes
 * the draw past the accumulated total, so the result is always a valid index
 * with p > 0 (assuming the row has at least one positive entry).
 */
inline int sample_categorical(const double* probs, int n, RandomStream& rng) {
    double u = rng.next_double();
    double acc = 0.0;
    int last_pos = -1;
    for (int i = 0; i < n; ++i) {
        if (probs[i] > 0.0) last_pos = i;
        acc += probs[i];
        if (u < acc) return i;
    }
    return last_pos;
}

}  // namespace apprentice
