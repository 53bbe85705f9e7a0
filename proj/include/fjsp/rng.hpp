#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fjsp {

// Seedable PRNG used by every randomized component. Wraps std::mt19937_64
// (a fixed, published algorithm) and derives uniform values from raw 64-bit
// output directly, so sample streams are identical across platforms and
// standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}

    // Independent stream: same seed, different stream id.
    Rng(std::uint64_t seed, std::uint64_t stream) : gen_(mix(mix(seed) ^ mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform in [0, bound). bound must be >= 1.
    int next_index(int bound) {
        const auto b = static_cast<std::uint64_t>(bound);
        return static_cast<int>(static_cast<std::uint64_t>((static_cast<unsigned __int128>(gen_()) * b) >> 64));
    }

    bool next_bit() { return (gen_() >> 63) != 0; }

    // Uniform in [lo, hi].
    double next_range(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i) {
            std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(next_index(i + 1))]);
        }
    }

private:
    // splitmix64 finalizer; decorrelates nearby seeds.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

}  // namespace fjsp
