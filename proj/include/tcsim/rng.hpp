#pragma once

#include <cstdint>

#include "tcsim/ids.hpp"

namespace tcsim {

// Independent randomness streams. Every draw is a pure function of
// (seed, stream, round, index), so paired runs that share a seed see the
// same mining lottery and transaction arrivals regardless of what else
// happens in the execution.
enum class Stream : std::uint64_t {
    Mining = 1,
    Transactions = 2,
    Adversary = 3,
};

class KeyedRng {
public:
    explicit KeyedRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t bits(Stream stream, std::uint64_t round, std::uint64_t index) const noexcept {
        std::uint64_t h = mix64(seed_ ^ 0x5ca1ab1e0ddba11ULL);
        h = mix64(h ^ static_cast<std::uint64_t>(stream));
        h = mix64(h ^ round);
        return mix64(h ^ index);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform(Stream stream, std::uint64_t round, std::uint64_t index) const noexcept {
        return static_cast<double>(bits(stream, round, index) >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

} // namespace tcsim
