#include "ferrospin/random.hpp"

#include "ferrospin/errors.hpp"

namespace ferrospin {

__extension__ using u128 = unsigned __int128;

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t RandomSource::next() {
    ++position_;
    return mix64(seed_ + position_ * kGolden);
}

double RandomSource::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::size_t RandomSource::below(std::size_t bound) {
    if (bound == 0) throw InputError("below() needs a positive bound");
    // Lemire's multiply-shift with rejection for exact uniformity.
    const auto b = static_cast<std::uint64_t>(bound);
    const std::uint64_t threshold = (0 - b) % b;
    while (true) {
        const u128 m = static_cast<u128>(next()) * b;
        if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::size_t>(m >> 64);
    }
}

RandomSource RandomSource::split(std::uint64_t label) const {
    return RandomSource(mix64(seed_ ^ mix64(label + kGolden)), 0);
}

} // namespace ferrospin
