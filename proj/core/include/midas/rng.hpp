#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace midas {

/// Portable seeded generator used for every key, noise draw and sample in the
/// toolkit.
///
/// The core is SplitMix64 (Steele, Lea & Flood). Its published test vector for
/// seed 1234567 starts 6457827717110365317, 3203168211198807973,
/// 9817491932198370423. Derived draws are defined here rather than taken from
/// <random> distributions, whose outputs differ between standard libraries:
///
///   uniform()     (next() >> 11) * 2^-53, in [0, 1)
///   normal()      Box-Muller on u1 = 1 - uniform(), u2 = uniform(); the cosine
///                 branch is returned first, the sine branch is cached for the
///                 following call
///   below(n)      Lemire multiply-shift with rejection, unbiased in [0, n)
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    std::uint64_t below(std::uint64_t n) noexcept {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// FNV-1a over the bytes of a string; used to turn prompts into seeds.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Separates independent streams that share one user-visible seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t domain) noexcept {
    std::uint64_t z = seed ^ (domain * 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace midas
