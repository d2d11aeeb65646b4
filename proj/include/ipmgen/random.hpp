#pragma once

// Seeded randomness with platform-independent draws. Standard library
// distributions differ between implementations, so bounded draws are done
// here to keep generated output identical everywhere for a given seed.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ipmgen {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed of substream `stream` under `seed`; distinct streams are uncorrelated.
inline std::uint64_t substreamSeed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t s = seed;
    std::uint64_t a = splitmix64(s);
    s = a ^ (stream * 0xd1b54a32d192ed03ull);
    return splitmix64(s);
}

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return splitmix64(state_); }

    /// Uniform in [0, n). Rejection keeps the draw unbiased.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("empty range");
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = (*this)();
        } while (x >= limit);
        return x % n;
    }

    /// Uniform in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) throw std::invalid_argument("empty range");
        const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
        if (span == max()) return static_cast<std::int64_t>((*this)());
        return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
    }

    bool coin() noexcept { return ((*this)() >> 63) != 0; }

    template <class T>
    const T& pick(const std::vector<T>& items) {
        return items.at(static_cast<std::size_t>(below(items.size())));
    }

    /// Fisher-Yates with this generator's draws.
    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

}  // namespace ipmgen
