#pragma once

#include <cstdint>
#include <vector>

namespace fragcoal {

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x)
// (series expansion below the a+1 crossover, Lentz continued fraction above).
double lower_regularized_gamma(double a, double x);
double upper_regularized_gamma(double a, double x);

// Survival function of the chi-square distribution with `dof` degrees of
// freedom, evaluated at x.
double chi_square_sf(double x, double dof);

double normal_cdf(double z);

// Inverse of normal_cdf on (0,1), by bisection.
double normal_quantile(double p);

struct ChiSquareResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

// Pearson goodness-of-fit statistic for observed counts against expected
// probabilities (dof = bins - 1).
ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& expected_prob);

// Two-sample homogeneity chi-square: bins both samples at pooled quantiles
// and compares bin frequencies (dof = bins - 1, duplicate edges collapsed).
ChiSquareResult two_sample_chi_square(std::vector<double> a, std::vector<double> b,
                                      std::size_t bins);

}  // namespace fragcoal
