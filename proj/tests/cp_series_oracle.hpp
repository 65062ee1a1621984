#pragma once

// Closed-form series oracles for compound-Poisson subordinators with constant
// jump size a: Gamma_s = a K with K ~ Poisson(lambda s), so every tilted
// expectation is a rapidly converging series over k. These are test-only and
// independent of the library's Monte Carlo evaluation path.

#include <cmath>

namespace oracle {

// E[f(aK)] with f supplied pointwise; terms decay super-exponentially thanks
// to the Gaussian factor in every integrand used below.
template <typename F>
double cp_expect(double lambda, double s, F&& f) {
    const double mean = lambda * s;
    double pk = std::exp(-mean);  // P(K = 0)
    double sum = pk * f(0);
    for (int k = 1; k < 400; ++k) {
        pk *= mean / k;
        const double term = pk * f(k);
        sum += term;
        if (pk < 1e-280) break;
    }
    return sum;
}

// q_s(u)/p_s(u) for the compound-Poisson spec.
inline double ratio_series(double lambda, double a, double c, double s, double u) {
    const double pre = std::exp(c * u - 0.5 * c * c * s);
    return pre * cp_expect(lambda, s, [&](int k) {
               const double g = a * k;
               return std::exp(-g * g / (2.0 * s) - g * (u / s - c));
           });
}

// g(t,x) = e^{-x c^2/2} E exp(-Gamma^2/(2x) + Gamma (t+c)).
inline double g_series(double lambda, double a, double c, double t, double x) {
    if (x == 0.0) return 1.0;
    return std::exp(-0.5 * x * c * c) * cp_expect(lambda, x, [&](int k) {
               const double g = a * k;
               return std::exp(-g * g / (2.0 * x) + g * (t + c));
           });
}

// d/dt of g_series.
inline double dtg_series(double lambda, double a, double c, double t, double x) {
    if (x == 0.0) return 0.0;
    return std::exp(-0.5 * x * c * c) * cp_expect(lambda, x, [&](int k) {
               const double g = a * k;
               return g * std::exp(-g * g / (2.0 * x) + g * (t + c));
           });
}

}  // namespace oracle
