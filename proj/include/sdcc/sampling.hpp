#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace sdcc {

/// Seeded sampler with a fixed, implementation-independent stream.
///
/// The engine is std::mt19937_64 (whose output sequence is pinned by the C++
/// standard). Bounded integers use rejection sampling on the raw 64-bit
/// output rather than std::uniform_int_distribution, whose algorithm is
/// library-specific.
class SeededSampler {
public:
    explicit SeededSampler(std::uint64_t seed) : engine_(seed) {}

    /// Uniform integer in [0, bound); bound must be positive.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound; // 2^64 mod bound
        while (true) {
            const std::uint64_t x = engine_();
            if (x >= threshold)
                return x % bound;
        }
    }

    /// Draws `count` items uniformly without replacement by a partial
    /// Fisher-Yates shuffle; the drawn items come out in draw order and
    /// `items` keeps the undrawn remainder.
    template <typename T>
    std::vector<T> draw(std::vector<T>& items, std::size_t count) {
        const std::size_t n = items.size();
        count = std::min(count, n);
        for (std::size_t i = 0; i < count; ++i) {
            const auto j = i + static_cast<std::size_t>(below(n - i));
            std::swap(items[i], items[j]);
        }
        std::vector<T> drawn(std::make_move_iterator(items.begin()),
                             std::make_move_iterator(items.begin() + static_cast<std::ptrdiff_t>(count)));
        items.erase(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(count));
        return drawn;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sdcc
