#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace stfs {

// splitmix64, used for seeding and for deriving independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with Box-Muller normals. Self-contained so that results are
// bit-identical across platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
        has_spare_ = false;
    }

    // Independent substream addressed by up to three indices. Streams with
    // different (a, b, c) never share state, which keeps parallel trials
    // reproducible regardless of scheduling.
    static Rng stream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
        std::uint64_t s = master;
        s ^= splitmix64(a) + 0x632be59bd9b4e019ULL;
        std::uint64_t t = s;
        s = splitmix64(t) ^ (splitmix64(b) * 0x9e3779b97f4a7c15ULL);
        t = s + c * 0xd1342543de82ef95ULL;
        return Rng(splitmix64(t));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform on [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t uniform_index(std::uint64_t n) {
        // rejection-free for our purposes; modulo bias is negligible for n << 2^64
        return next_u64() % n;
    }

    // standard normal via polar Box-Muller
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // circular complex Gaussian with E|z|^2 = variance
    std::complex<double> cnormal(double variance = 1.0) {
        const double s = std::sqrt(variance * 0.5);
        return {normal() * s, normal() * s};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool has_spare_;
};

// Substream purposes. Keyed per (trial, device[, antenna]) so that every
// random quantity has its own counter-derived stream and results do not
// depend on evaluation order or worker count.
enum class StreamTag : std::uint64_t {
    deploy = 1,
    shadowing = 2,
    taps = 3,
    noise = 4,
    bits = 5,
    assignment = 6,
    vector_choice = 7,
    codebook = 8,
    pilot_noise = 9,
};

inline std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

}  // namespace stfs
