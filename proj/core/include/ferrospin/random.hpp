#pragma once

#include <cstddef>
#include <cstdint>

namespace ferrospin {

// Counter-based stream: draw k is a SplitMix64 finaliser applied to
// seed + k * golden. Any position can be replayed exactly.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0, std::uint64_t position = 0)
        : seed_(seed), position_(position) {}

    std::uint64_t next();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on {0, ..., bound - 1}; bound must be positive.
    std::size_t below(std::size_t bound);
    bool bernoulli(double p) { return uniform() < p; }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t position() const { return position_; }
    // Independent stream derived from this seed and a label.
    RandomSource split(std::uint64_t label) const;

private:
    std::uint64_t seed_;
    std::uint64_t position_;
};

std::uint64_t mix64(std::uint64_t x);

} // namespace ferrospin
