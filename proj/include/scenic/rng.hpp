#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace scenic {

// splitmix64, used to derive well-mixed seeds for child streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Deterministic random stream. Child streams are derived from the base seed
// and a tag, never from the current engine state, so consumers cannot
// perturb each other by drawing in a different order.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

    Rng split(std::uint64_t stream) const {
        std::uint64_t s = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
        return Rng(splitmix64(s));
    }

    Rng split(std::string_view tag, std::uint64_t stream = 0) const {
        return split(fnv1a64(tag) + stream);
    }

    std::uint64_t seed() const { return seed_; }

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    double normal(double mean = 0.0, double stddev = 1.0) {
        return std::normal_distribution<double>(mean, stddev)(engine_);
    }

    // Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    bool bernoulli(double p) {
        return std::bernoulli_distribution(p)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t s) {
        std::uint64_t t = s;
        return splitmix64(t);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace scenic
