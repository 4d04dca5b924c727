#include "fracmv/core/rng.hpp"

#include <cmath>
#include <numbers>

namespace fracmv {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

RandomStream::RandomStream(std::uint64_t seed, std::string_view label, std::uint64_t index) {
    std::uint64_t k = splitmix64_mix(seed + kGolden);
    k = splitmix64_mix(k ^ fnv1a64(label));
    key_ = splitmix64_mix(k + (index + 1) * kGolden);
}

std::uint64_t RandomStream::next_u64() {
    ++counter_;
    return splitmix64_mix(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
    // 53 random mantissa bits, shifted off zero by half an ulp.
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    cached_normal_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
}

}  // namespace fracmv
