#include <doctest.h>

#include <cmath>

#include "fragcoal/quadrature.hpp"
#include "fragcoal/rng.hpp"
#include "fragcoal/stats.hpp"

using namespace fragcoal;

TEST_SUITE_BEGIN("stats");

TEST_CASE("regularized gamma agrees with erf at a = 1/2") {
    // P(1/2, x) = erf(sqrt(x))
    for (double x : {0.25, 1.0, 4.0, 9.0}) {
        CHECK(lower_regularized_gamma(0.5, x) ==
              doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
        CHECK(upper_regularized_gamma(0.5, x) ==
              doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-10));
    }
}

TEST_CASE("chi-square tail matches table values") {
    CHECK(chi_square_sf(30.144, 19) == doctest::Approx(0.05).epsilon(2e-3));
    CHECK(chi_square_sf(43.82, 19) == doctest::Approx(0.001).epsilon(5e-3));
    CHECK(chi_square_sf(27.88, 9) == doctest::Approx(0.001).epsilon(5e-3));
    CHECK(chi_square_sf(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(normal_cdf(1.959963985) == doctest::Approx(0.975).epsilon(1e-8));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-7));
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-10));
    for (double p : {0.01, 0.3, 0.9, 0.999}) {
        CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
    }
}

TEST_CASE("goodness-of-fit statistic on a fair split") {
    std::vector<std::uint64_t> counts = {250, 250, 250, 250};
    std::vector<double> probs(4, 0.25);
    auto res = chi_square_gof(counts, probs);
    CHECK(res.statistic == doctest::Approx(0.0));
    CHECK(res.p_value == doctest::Approx(1.0));
}

TEST_CASE("two-sample chi-square separates shifted samples") {
    RandomStream s = RandomStream::root(11, "two-sample");
    std::vector<double> a, b, c;
    for (int i = 0; i < 4000; ++i) {
        a.push_back(s.normal());
        b.push_back(s.normal());
        c.push_back(s.normal() + 0.5);
    }
    CHECK(two_sample_chi_square(a, b, 10).p_value > 1e-3);
    CHECK(two_sample_chi_square(a, c, 10).p_value < 1e-6);
}

TEST_CASE("adaptive quadrature on smooth integrands") {
    auto quad = adaptive_gauss_kronrod([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
    CHECK(quad.value == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(quad.converged);

    quad = adaptive_gauss_kronrod([](double x) { return std::sin(x); }, 0.0,
                                  3.141592653589793, 1e-12);
    CHECK(quad.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("adaptive quadrature handles an integrable endpoint singularity") {
    auto quad =
        adaptive_gauss_kronrod([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-6);
    CHECK(quad.value == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_SUITE_END();
