#include <doctest.h>

#include <cmath>
#include <vector>

#include "fragcoal/rng.hpp"

using fragcoal::RandomStream;

TEST_SUITE_BEGIN("rng");

TEST_CASE("same key reproduces the same sequence") {
    RandomStream a = RandomStream::root(42, "test");
    RandomStream b = RandomStream::root(42, "test");
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("tag, seed and child index all separate streams") {
    RandomStream base = RandomStream::root(42, "test");
    CHECK(RandomStream::root(42, "test").next_u64() !=
          RandomStream::root(43, "test").next_u64());
    CHECK(RandomStream::root(42, "test").next_u64() !=
          RandomStream::root(42, "other").next_u64());
    CHECK(base.substream(0).next_u64() != base.substream(1).next_u64());
}

TEST_CASE("substream derivation is independent of draw position") {
    RandomStream a = RandomStream::root(7, "x");
    RandomStream b = RandomStream::root(7, "x");
    for (int i = 0; i < 17; ++i) b.next_u64();  // advancing does not move children
    CHECK(a.substream(5).next_u64() == b.substream(5).next_u64());
}

TEST_CASE("uniform01 stays inside the open interval") {
    RandomStream s = RandomStream::root(1, "uniform");
    double mean = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform01();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
        mean += u;
    }
    mean /= n;
    // se of the mean of U(0,1) is 1/sqrt(12 n)
    CHECK(std::abs(mean - 0.5) < 4.0 / std::sqrt(12.0 * n));
}

TEST_CASE("normal moments") {
    RandomStream s = RandomStream::root(2, "normal");
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sum2 += z * z;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("poisson moments across the splitting threshold") {
    RandomStream s = RandomStream::root(3, "poisson");
    for (double mean : {0.3, 3.0, 120.0}) {
        const int n = 100000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(s.poisson(mean));
            sum += k;
            sum2 += k * k;
        }
        const double m = sum / n;
        const double v = sum2 / n - m * m;
        CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
        CHECK(std::abs(v - mean) < 6.0 * mean / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("gamma moments for shapes on both sides of 1") {
    RandomStream s = RandomStream::root(4, "gamma");
    for (double shape : {0.4, 2.5}) {
        const double rate = 1.7;
        const int n = 200000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double g = s.gamma(shape, rate);
            REQUIRE(g > 0.0);
            sum += g;
            sum2 += g * g;
        }
        const double m = sum / n;
        const double v = sum2 / n - m * m;
        CHECK(std::abs(m - shape / rate) < 5.0 * std::sqrt(shape / (rate * rate) / n));
        CHECK(std::abs(v - shape / (rate * rate)) < 0.05 * shape / (rate * rate));
    }
}

TEST_CASE("exponential mean") {
    RandomStream s = RandomStream::root(5, "exp");
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += s.exponential(4.0);
    CHECK(std::abs(sum / n - 0.25) < 4.0 * 0.25 / std::sqrt(static_cast<double>(n)));
}

TEST_SUITE_END();
