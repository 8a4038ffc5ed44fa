#pragma once

#include <cstdint>
#include <random>

namespace fblrate {

/// Identifies one reproducible random stream. Equal (seed, stream_index)
/// pairs always produce identical draws.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_index = 0;

    [[nodiscard]] RngStream substream(std::uint64_t index) const noexcept;

    friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Mutable sampler state built from an RngStream. Not shared between threads.
class RandomSource {
public:
    explicit RandomSource(RngStream stream);

    /// One N(0, 1) draw.
    double normal() { return normal_(engine_); }

    /// One Γ(shape, 1) draw.
    double gamma(double shape);

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace fblrate
