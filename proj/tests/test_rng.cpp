#include <catch2/catch_amalgamated.hpp>

#include "scenic/rng.hpp"

#include <set>

using namespace scenic;

TEST_CASE("seeded streams reproduce exactly") {
    Rng a(123);
    Rng b(123);
    for (int i = 0; i < 200; ++i) {
        REQUIRE(a.uniform(0.0, 1.0) == b.uniform(0.0, 1.0));
    }
    Rng c(124);
    bool any_diff = false;
    Rng a2(123);
    for (int i = 0; i < 20; ++i) {
        any_diff = any_diff || (a2.uniform(0.0, 1.0) != c.uniform(0.0, 1.0));
    }
    REQUIRE(any_diff);
}

TEST_CASE("split children are independent of parent draw order") {
    Rng parent1(7);
    Rng parent2(7);
    for (int i = 0; i < 17; ++i) parent2.normal();
    Rng c1 = parent1.split(3);
    Rng c2 = parent2.split(3);
    REQUIRE(c1.seed() == c2.seed());
    for (int i = 0; i < 50; ++i) {
        REQUIRE(c1.uniform(0.0, 1.0) == c2.uniform(0.0, 1.0));
    }
}

TEST_CASE("tagged splits are stable and distinct") {
    Rng parent(42);
    Rng a = parent.split("alpha");
    Rng b = parent.split("alpha");
    REQUIRE(a.seed() == b.seed());
    Rng c = parent.split("beta");
    REQUIRE(a.seed() != c.seed());
    Rng a1 = parent.split("alpha", 1);
    REQUIRE(a1.seed() != a.seed());
    REQUIRE(parent.split(0).seed() != parent.split(1).seed());
}

TEST_CASE("distribution helpers stay in range") {
    Rng rng(55);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(-2.0, 3.0);
        REQUIRE(u >= -2.0);
        REQUIRE(u < 3.0);
        const std::size_t k = rng.index(7);
        REQUIRE(k < 7);
    }
    std::set<std::size_t> seen;
    for (int i = 0; i < 200; ++i) seen.insert(rng.index(4));
    REQUIRE(seen.size() == 4);
    int heads = 0;
    for (int i = 0; i < 2000; ++i) heads += rng.bernoulli(0.5) ? 1 : 0;
    REQUIRE(heads > 800);
    REQUIRE(heads < 1200);
    for (int i = 0; i < 100; ++i) {
        REQUIRE_FALSE(rng.bernoulli(0.0));
        REQUIRE(rng.bernoulli(1.0));
    }
}

TEST_CASE("splitmix and fnv1a primitives") {
    std::uint64_t s1 = 99, s2 = 99;
    REQUIRE(splitmix64(s1) == splitmix64(s2));
    REQUIRE(s1 == s2);
    REQUIRE(splitmix64(s1) != splitmix64(s2) - 1);
    REQUIRE(fnv1a64("abc") == fnv1a64("abc"));
    REQUIRE(fnv1a64("abc") != fnv1a64("abd"));
    REQUIRE(fnv1a64("") != 0);
}
