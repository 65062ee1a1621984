#include "fragcoal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fragcoal {

namespace {

// Series for P(a,x), valid/fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a,x), valid/fast for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double lower_regularized_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::invalid_argument("lower_regularized_gamma: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double upper_regularized_gamma(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::invalid_argument("upper_regularized_gamma: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double dof) {
    if (!(dof > 0.0)) throw std::invalid_argument("chi_square_sf: dof must be > 0");
    if (x <= 0.0) return 1.0;
    return upper_regularized_gamma(0.5 * dof, 0.5 * x);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("normal_quantile: p in (0,1)");
    double lo = -15.0, hi = 15.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (normal_cdf(mid) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ChiSquareResult chi_square_gof(const std::vector<std::uint64_t>& observed,
                               const std::vector<double>& expected_prob) {
    if (observed.size() != expected_prob.size() || observed.size() < 2)
        throw std::invalid_argument("chi_square_gof: need >= 2 matching bins");
    std::uint64_t n = 0;
    for (auto o : observed) n += o;
    if (n == 0) throw std::invalid_argument("chi_square_gof: empty sample");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = expected_prob[i] * static_cast<double>(n);
        if (!(e > 0.0)) throw std::invalid_argument("chi_square_gof: zero expected bin");
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    const double dof = static_cast<double>(observed.size() - 1);
    return {stat, dof, chi_square_sf(stat, dof)};
}

ChiSquareResult two_sample_chi_square(std::vector<double> a, std::vector<double> b,
                                      std::size_t bins) {
    if (a.size() < bins || b.size() < bins || bins < 2)
        throw std::invalid_argument("two_sample_chi_square: samples too small");
    std::vector<double> pooled;
    pooled.reserve(a.size() + b.size());
    pooled.insert(pooled.end(), a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::sort(pooled.begin(), pooled.end());

    std::vector<double> edges;  // interior edges
    for (std::size_t k = 1; k < bins; ++k) {
        edges.push_back(pooled[k * pooled.size() / bins]);
    }
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    if (edges.empty()) throw std::invalid_argument("two_sample_chi_square: degenerate pooled sample");

    auto bin_of = [&edges](double x) {
        return static_cast<std::size_t>(
            std::upper_bound(edges.begin(), edges.end(), x) - edges.begin());
    };
    const std::size_t k = edges.size() + 1;
    std::vector<double> ca(k, 0.0), cb(k, 0.0);
    for (double x : a) ca[bin_of(x)] += 1.0;
    for (double x : b) cb[bin_of(x)] += 1.0;

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double stat = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < k; ++i) {
        const double tot = ca[i] + cb[i];
        if (tot == 0.0) continue;
        ++used;
        const double ea = na * tot / (na + nb);
        const double eb = nb * tot / (na + nb);
        stat += (ca[i] - ea) * (ca[i] - ea) / ea + (cb[i] - eb) * (cb[i] - eb) / eb;
    }
    if (used < 2) throw std::invalid_argument("two_sample_chi_square: all mass in one bin");
    const double dof = static_cast<double>(used - 1);
    return {stat, dof, chi_square_sf(stat, dof)};
}

}  // namespace fragcoal
