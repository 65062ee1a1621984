#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fragcoal/excursion.hpp"
#include "fragcoal/rng.hpp"
#include "fragcoal/stats.hpp"

using namespace fragcoal;

TEST_SUITE_BEGIN("excursion");

TEST_CASE("bridge endpoints are exactly zero") {
    RandomStream rng = RandomStream::root(201, "bridge");
    for (std::uint32_t n : {2u, 64u, 4096u}) {
        const GridPath p = brownian_bridge(n, rng);
        CHECK(p.values.front() == 0.0);
        CHECK(p.values.back() == 0.0);
        CHECK(p.values.size() == n + 1);
    }
    CHECK_THROWS_AS(brownian_bridge(1, rng), std::invalid_argument);
}

TEST_CASE("bridge midpoint variance and quarter-point mean") {
    RandomStream rng = RandomStream::root(202, "bridge-var");
    const std::uint32_t n = 1024;
    const int paths = 10000;
    double sum_mid = 0.0, sum2_mid = 0.0, sum_q = 0.0;
    for (int i = 0; i < paths; ++i) {
        const GridPath p = brownian_bridge(n, rng);
        const double mid = p.values[n / 2];
        sum_mid += mid;
        sum2_mid += mid * mid;
        sum_q += p.values[n / 4];
    }
    const double mean_mid = sum_mid / paths;
    const double var_mid = sum2_mid / paths - mean_mid * mean_mid;
    // Var b(1/2) = 1/4; the sample variance of a Gaussian has sd ~ var sqrt(2/n).
    CHECK(std::abs(var_mid - 0.25) < 4.0 * 0.25 * std::sqrt(2.0 / paths));
    // E b(1/4) = 0 with sd sqrt(3/16)
    CHECK(std::abs(sum_q / paths) <
          4.0 * std::sqrt(3.0 / 16.0) / std::sqrt(static_cast<double>(paths)));
}

TEST_CASE("theta sequences") {
    const auto t1 = ThetaSequence::normalized({0.6});
    CHECK(t1.sigma == doctest::Approx(0.8).epsilon(1e-12));
    CHECK_FALSE(t1.literal_scaling);
    const auto t2 = ThetaSequence::with_literal_sigma({0.6});
    CHECK(t2.sigma == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(t2.literal_scaling);
    CHECK(ThetaSequence::brownian().sigma == 1.0);
    CHECK_THROWS_AS(ThetaSequence::normalized({0.5, 0.7}), std::invalid_argument);
    CHECK_THROWS_AS(ThetaSequence::normalized({1.1}), std::invalid_argument);
    RandomStream rng = RandomStream::root(203, "theta-bad");
    ThetaSequence bad;
    bad.sigma = 0.5;  // sigma^2 + sum theta^2 != 1
    CHECK_THROWS_AS(theta_bridge(bad, 64, rng), std::invalid_argument);
}

TEST_CASE("pure jump bridge has the deterministic single-jump form") {
    RandomStream rng = RandomStream::root(204, "jump");
    ThetaSequence seq = ThetaSequence::normalized({1.0});
    CHECK(seq.sigma == 0.0);
    const std::uint32_t n = 512;
    const GridPath p = theta_bridge(seq, n, rng);
    // locate the jump cell, then the whole path must be 1{k >= j} - k/n
    std::size_t jump_at = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        if (p.values[k] - p.values[k - 1] > 0.5) jump_at = k;
    }
    REQUIRE(jump_at > 0);
    for (std::size_t k = 0; k <= n; ++k) {
        const double expect =
            (k >= jump_at ? 1.0 : 0.0) - static_cast<double>(k) / static_cast<double>(n);
        CHECK(p.values[k] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("theta bridge carries exactly one jump of the requested size") {
    RandomStream rng = RandomStream::root(205, "jump-detect");
    ThetaSequence seq = ThetaSequence::normalized({0.6});
    const std::uint32_t n = 4096;
    for (int trial = 0; trial < 20; ++trial) {
        const GridPath p = theta_bridge(seq, n, rng);
        CHECK(p.is_bridge());
        int jumps = 0;
        for (std::size_t k = 1; k <= n; ++k) {
            if (p.values[k] - p.values[k - 1] > 0.3) ++jumps;  // 0.6/2 >> grid noise
        }
        CHECK(jumps == 1);
    }
}

TEST_CASE("vervaat on a nonnegative path with the minimum at 0 is the identity") {
    GridPath p;
    p.n_grid = 4;
    p.values = {0.0, 0.5, 1.0, 0.5, 0.0};
    const GridPath v = vervaat(p);
    CHECK(v.values == p.values);
}

TEST_CASE("vervaat of the negated sine bridge is the hand-computed shift") {
    const std::uint32_t n = 256;
    GridPath p;
    p.n_grid = n;
    p.values.resize(n + 1);
    const double two_pi = 6.283185307179586476925286766559;
    for (std::size_t k = 0; k <= n; ++k) {
        p.values[k] = -std::sin(two_pi * static_cast<double>(k) / n);
    }
    const GridPath v = vervaat(p);
    // argmin at k = n/4 where the path hits -1; shifted copy is
    // 1 - sin(2 pi (k + n/4)/n)
    for (std::size_t k = 0; k <= n; ++k) {
        const double expect =
            (k == 0 || k == n)
                ? 0.0
                : 1.0 - std::sin(two_pi * static_cast<double>((k + n / 4) % n) / n);
        CHECK(v.values[k] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("vervaat of random bridges is an excursion pinned at zero") {
    RandomStream rng = RandomStream::root(206, "vervaat");
    for (int trial = 0; trial < 50; ++trial) {
        const GridPath v = vervaat(brownian_bridge(1024, rng));
        CHECK(v.values.front() == 0.0);
        CHECK(v.values.back() == 0.0);
        CHECK(*std::min_element(v.values.begin(), v.values.end()) == 0.0);
        CHECK(v.is_excursion());
    }
    GridPath not_bridge;
    not_bridge.n_grid = 4;
    not_bridge.values = {0.0, 0.5, 1.0, 1.5, 2.0};
    CHECK_THROWS_AS(vervaat(not_bridge), std::invalid_argument);
}

TEST_CASE("fragmentation basics") {
    RandomStream rng = RandomStream::root(207, "frag");
    const GridPath exc = vervaat(brownian_bridge(1 << 12, rng));

    SUBCASE("t = 0 is a single unit fragment") {
        const MassPartition p = fragmentation_at(exc, 0.0);
        REQUIRE(p.size() == 1);
        CHECK(p.masses[0] == 1.0);
    }
    SUBCASE("masses sum to exactly 1 on a power-of-two grid") {
        for (double t : {0.25, 1.0, 3.0}) {
            const MassPartition p = fragmentation_at(exc, t);
            double sum = 0.0;
            for (double m : p.masses) sum += m;
            CHECK(sum == 1.0);
            CHECK(std::is_sorted(p.masses.begin(), p.masses.end(), std::greater<double>()));
        }
    }
    SUBCASE("negative t rejected") {
        CHECK_THROWS_AS(fragmentation_at(exc, -0.1), std::invalid_argument);
    }
    SUBCASE("non-excursion rejected") {
        GridPath bad;
        bad.n_grid = 4;
        bad.values = {0.0, -0.5, 0.2, 0.1, 0.0};
        CHECK_THROWS_AS(fragmentation_at(bad, 1.0), std::invalid_argument);
    }
    SUBCASE("at most 1/eps fragments exceed eps") {
        const MassPartition p = fragmentation_at(exc, 1.0);
        int big = 0;
        for (double m : p.masses)
            if (m >= 0.1) ++big;
        CHECK(big <= 10);
    }
}

TEST_CASE("records only accumulate as t grows (fragment refinement)") {
    RandomStream rng = RandomStream::root(208, "refine");
    for (int trial = 0; trial < 100; ++trial) {
        const GridPath exc = vervaat(brownian_bridge(1 << 10, rng));
        const auto recs_early = record_indices(exc, 0.4);
        const auto recs_late = record_indices(exc, 1.7);
        CHECK(std::includes(recs_late.begin(), recs_late.end(), recs_early.begin(),
                            recs_early.end()));
    }
}

TEST_CASE("fragmentation samples carry provenance") {
    RandomStream rng = RandomStream::root(209, "sample");
    const auto s = sample_brownian_fragmentation(1.0, 1 << 10, rng);
    CHECK(s.t == 1.0);
    CHECK(s.grid_n == (1u << 10));
    CHECK(s.law_tag == "brownian");
    CHECK(s.partition.is_normalized());
    const auto st = sample_theta_fragmentation(ThetaSequence::normalized({0.5}), 1.0,
                                               1 << 10, rng);
    CHECK(st.law_tag == "theta");
    CHECK(st.partition.is_normalized());
}

TEST_CASE("small-fragment count scaling matches the marginal intensity") {
    // #{F_i >= x} ~ sqrt(2/pi) x^{-1/2} as x -> 0 at t = 1; equivalently the
    // n-th largest mass obeys n^2 F_n -> 2/pi. Checked in count form, which
    // concentrates well per path.
    RandomStream rng = RandomStream::root(211, "counts");
    std::vector<double> stat;
    for (int p = 0; p < 40; ++p) {
        RandomStream s = rng.substream(p);
        const MassPartition part =
            fragmentation_at(vervaat(brownian_bridge(1 << 18, s)), 1.0);
        int count = 0;
        for (double m : part.masses)
            if (m >= 1e-4) ++count;
        stat.push_back(0.01 * count);  // sqrt(x) * count at x = 1e-4
    }
    std::sort(stat.begin(), stat.end());
    const double target = std::sqrt(2.0 / 3.14159265358979323846);
    CHECK(std::abs(stat[stat.size() / 2] - target) < 0.05 * target);
}

TEST_CASE("self-similar semigroup composition at desk scale") {
    // Largest mass of F(0.5) sampled directly vs composed: F(0.25), then each
    // fragment m >= delta evolved as m * F'(sqrt(m) * 0.25) on an independent
    // excursion (index-1/2 scaling); fragments below delta cannot carry the
    // maximum.
    RandomStream rng = RandomStream::root(210, "selfsim");
    const std::uint32_t n = 1 << 11;
    const int reps = 800;
    const double delta = 0.02;
    std::vector<double> direct, composed;
    for (int r = 0; r < reps; ++r) {
        RandomStream sd = rng.substream(2 * r);
        direct.push_back(
            fragmentation_at(vervaat(brownian_bridge(n, sd)), 0.5).largest());
        RandomStream sc = rng.substream(2 * r + 1);
        const MassPartition coarse =
            fragmentation_at(vervaat(brownian_bridge(n, sc)), 0.25);
        double best = 0.0;
        std::uint64_t child = 1;
        for (double m : coarse.masses) {
            if (m < delta) {
                best = std::max(best, m);
                continue;
            }
            RandomStream si = sc.substream(child++);
            const MassPartition fine = fragmentation_at(
                vervaat(brownian_bridge(n, si)), std::sqrt(m) * 0.25);
            best = std::max(best, m * fine.largest());
        }
        composed.push_back(best);
    }
    const auto res = two_sample_chi_square(direct, composed, 8);
    CHECK(res.p_value > 1e-3);
}

TEST_SUITE_END();
