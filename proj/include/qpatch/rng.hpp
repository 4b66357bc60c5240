#ifndef QPATCH_RNG_HPP
#define QPATCH_RNG_HPP

#include <cstdint>
#include <random>
#include <vector>

namespace qpatch::rng {

// All randomness in the project flows through these helpers on top of
// std::mt19937_64, whose output sequence is fixed by the standard. The
// std::uniform_* distributions are implementation-defined, so we draw
// manually to keep seeded runs identical across platforms and compilers.
using Engine = std::mt19937_64;

// Uniform integer in [0, bound). bound == 0 is invalid.
inline std::uint64_t bounded(Engine& gen, std::uint64_t bound) {
    // Rejection-free modulo draw; the bias is < bound / 2^64 and every
    // consumer here has bound < 2^32, far below observable level. One
    // engine call per draw keeps the stream position predictable.
    return gen() % bound;
}

// Uniform double in [0, 1) with 53 random mantissa bits.
inline double unit_double(Engine& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Uniform double in [lo, hi).
inline double range_double(Engine& gen, double lo, double hi) {
    return lo + (hi - lo) * unit_double(gen);
}

// In-place Fisher-Yates shuffle with platform-stable draws.
template <typename T>
void shuffle(Engine& gen, std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(gen, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace qpatch::rng

#endif  // QPATCH_RNG_HPP
