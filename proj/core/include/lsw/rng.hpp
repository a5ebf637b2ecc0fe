#pragma once

#include <array>
#include <cstdint>

namespace lsw {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Maps (counter, key) to 128 random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Standard normal variates from a counter-based stream.
///
/// The key is the base seed and the stream index occupies the upper half of
/// the counter, so variate k of stream r depends only on (seed, r, k). Each
/// Philox block yields two uniforms and, via Box-Muller, two normals.
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream);

    double normal();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> bits_{};
    int used_ = 4;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lsw
