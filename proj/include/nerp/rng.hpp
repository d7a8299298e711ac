// Copyright 2026 nerp project developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

namespace nerp {

// Counter-based PRNG (splitmix64). Chosen over std::mt19937 + distributions so
// that streams are reproducible bit-for-bit across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 bits of mantissa.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Symmetric uniform in [-half_width, +half_width]; exact 0 for zero width.
    double uniform_symmetric(double half_width) {
        if (half_width == 0.0) return 0.0;
        return uniform(-half_width, half_width);
    }

private:
    std::uint64_t state_;
};

// FNV-1a over arbitrary bytes; used to derive stable per-item seeds so that
// adding a volume to a dataset never perturbs the outputs of the others.
inline std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view id, std::uint32_t index) {
    std::uint64_t h = fnv1a64(&base, sizeof(base));
    h = fnv1a64(id.data(), id.size(), h);
    h = fnv1a64(&index, sizeof(index), h);
    return h;
}

}  // namespace nerp
