#pragma once

#include <cstdint>

namespace sdlab {

// PCG32 (O'Neill, pcg-random.org). Chosen over std::mt19937 because the
// output sequence is fully specified and portable across standard libraries,
// which keeps decode traces reproducible between builds.
class Pcg32 {
public:
    Pcg32() : Pcg32(0x853c49e6748fea9bULL, 0xda3e39cb94b95bdbULL) {}

    Pcg32(std::uint64_t seed, std::uint64_t stream) { reseed(seed, stream); }

    void reseed(std::uint64_t seed, std::uint64_t stream) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    std::uint32_t next_u32() {
        const std::uint64_t old = state_;
        state_ = old * 6364136223846793005ULL + inc_;
        const auto xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
        const auto rot = static_cast<std::uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
    }

    // Uniform in [0, 1) with 32 bits of resolution.
    double next_double() { return next_u32() * 0x1.0p-32; }

private:
    std::uint64_t state_;
    std::uint64_t inc_;
};

} // namespace sdlab
