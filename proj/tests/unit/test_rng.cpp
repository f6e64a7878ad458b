#include "doctest.h"

#include "midas/rng.hpp"

#include <cmath>
#include <vector>

using namespace midas;

TEST_SUITE("rng") {

TEST_CASE("splitmix64 matches the published sequence for seed 1234567") {
    SplitMix64 g(1234567);
    const std::vector<std::uint64_t> expected{6457827717110365317ULL, 3203168211198807973ULL,
                                              9817491932198370423ULL, 4593380528125082431ULL,
                                              16408922859458223821ULL};
    for (auto v : expected) CHECK(g.next() == v);
}

TEST_CASE("uniform uses the top 53 bits") {
    SplitMix64 a(99);
    SplitMix64 b(99);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == static_cast<double>(b.next() >> 11) * 0x1.0p-53);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("normal returns the cosine branch then the cached sine branch") {
    SplitMix64 a(7);
    SplitMix64 b(7);
    const double u1 = 1.0 - b.uniform();
    const double u2 = b.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    CHECK(a.normal() == doctest::Approx(r * std::cos(2.0 * M_PI * u2)).epsilon(1e-15));
    CHECK(a.normal() == doctest::Approx(r * std::sin(2.0 * M_PI * u2)).epsilon(1e-15));
    CHECK(a.next() == b.next());
}

TEST_CASE("normal draws have unit variance") {
    SplitMix64 g(2024);
    double sum = 0.0;
    double sq = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double v = g.normal();
        sum += v;
        sq += v * v;
    }
    CHECK(std::abs(sum / n) < 0.01);
    CHECK(std::abs(sq / n - 1.0) < 0.01);
}

TEST_CASE("below stays in range and covers it") {
    SplitMix64 g(5);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = g.below(7);
        REQUIRE(v < 7);
        ++hits[v];
    }
    for (int h : hits) CHECK(h > 800);
    CHECK(g.below(1) == 0);
}

TEST_CASE("fnv1a64 and derive_seed") {
    CHECK(fnv1a64("") == 0xCBF29CE484222325ULL);
    CHECK(fnv1a64("a") == 0xAF63DC4C8601EC8CULL);
    CHECK(fnv1a64("foobar") == 0x85944171F73967E8ULL);
    CHECK(derive_seed(1, 2) != derive_seed(2, 1));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}

}
