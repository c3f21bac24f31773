#pragma once

#include <cstdint>

namespace kcluster {

// splitmix64: counter-based generator. Streams derived from (seed, label)
// pairs are independent for our purposes and fully reproducible, which is
// what the per-trial / per-Monte-Carlo-seed derivation needs.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        // modulo bias is negligible for n << 2^64
        return next() % n;
    }

private:
    std::uint64_t state_;
};

// Key derivation for independent streams: hash-combine seed and labels.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                 std::uint64_t b = 0) {
    SplitMix64 g(seed ^ (a * 0x9e3779b97f4a7c15ULL) ^
                 (b * 0xc2b2ae3d27d4eb4fULL));
    g.next();
    return g.next();
}

}  // namespace kcluster
