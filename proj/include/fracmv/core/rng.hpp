#pragma once

#include <cstdint>
#include <string_view>

namespace fracmv {

/// Counter-based generator "splitmix64-ctr": the k-th output of a stream with
/// key K is splitmix64_mix(K + (k + 1) * 0x9E3779B97F4A7C15). Streams are
/// addressed by (seed, label, index) so a path's draws never depend on how many
/// other paths were drawn before it or on which thread draws it.
class RandomStream {
public:
    static constexpr std::string_view algorithm_name = "splitmix64-ctr";

    RandomStream(std::uint64_t seed, std::string_view label, std::uint64_t index);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal via Box-Muller; draws are produced in pairs.
    double normal();

    std::uint64_t key() const { return key_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view text);

}  // namespace fracmv
