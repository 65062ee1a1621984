#pragma once

#include <cstdint>
#include <functional>

#include "fragcoal/mass_partition.hpp"
#include "fragcoal/mc_estimate.hpp"
#include "fragcoal/rng.hpp"
#include "fragcoal/subordinator.hpp"

namespace fragcoal {

// The standard binary dislocation kernel: a unit mass splits into (y, 1-y).
struct DislocationKernel {
    // Symmetric form on (0,1): (8 pi y^3 (1-y)^3)^{-1/2}.
    static double weight(double y);
    // Measure density on the ordered side y in (1/2, 1): (2 pi y^3 (1-y)^3)^{-1/2}.
    static double nu_density(double y);
};

// Integral of phi(y, 1-y) against the dislocation measure over (1/2, 1).
// The caller declares phi(y,1-y) = O(1-y) as y -> 1; the endpoint singularity
// is removed exactly by the substitution 1-y = w^2 before adaptive
// Gauss-Kronrod integration. Throws if the refinement fails to converge.
double nu_functional(const std::function<double(double, double)>& phi, double tol);

// int (1 - y_1) nu(dy); equals sqrt(2/pi). Computed once and cached.
double nu_one_minus_largest();

// Generator of the self-similar fragmentation applied to the multiplicative
// functional prod_i f(x_i):
//   G f(x) = prod_j f(x_j) * sum_i x_i^alpha int nu(dy) (f(x_i y) f(x_i (1-y)) / f(x_i) - 1).
// f must be C^1, strictly positive, with f(0) = 1 (boundedness above 1 is
// allowed). The fragment series is truncated when the remaining tail is
// provably below tol via |f(ry)f(r(1-y))/f(r) - 1| <= 2 C_f e^{C_f} r (1-y)
// with C_f = sup |f'/f^2|.
double generator_multiplicative(const std::function<double(double)>& f,
                                const MassPartition& partition, double alpha, double tol);

// Exact-in-expectation time derivative of the weight factor g:
//   dt_g(t,x) = e^{-x c^2/2} E[Gamma_x exp(-Gamma_x^2/(2x) + Gamma_x (t+c))].
MCEstimate dt_g(double t, double x, const SubordinatorSpec& spec, std::uint64_t mc,
                RandomStream& rng);

struct PdeResidualResult {
    double value = 0.0;      // dt_g + sqrt(x) * dislocation integral, expected ~ 0
    double std_err = 0.0;    // over independent Monte Carlo blocks
    double quad_err = 0.0;   // quadrature error proxy (Kronrod-Gauss deviation + stub)
    double dt_term = 0.0;    // pooled time-derivative term
    double integral_term = 0.0;  // pooled sqrt(x)-scaled integral term
    std::uint64_t mc = 0;
    std::uint32_t blocks = 0;
    bool exploratory = false;  // gamma-kind spec: smoothness hypotheses unproven
    bool quad_converged = true;  // quadrature error proxy within tol (+ noise)
};

// Residual of the integro-differential equation satisfied by g:
//   dt g(t,x) + sqrt(x) int_0^1 (8 pi y^3 (1-y)^3)^{-1/2}
//                        (g(t,xy) g(t,x(1-y)) - g(t,x)) dy  =  0.
//
// The integral is symmetrized to 2 int_0^{1/2} and substituted y = v^2; the
// g surface is evaluated on a fixed graded Kronrod node set from exact
// subordinator-path skeletons (one increment walk per replicate, shared
// across all nodes), so that the near-cancelling integrand is coupled. Each
// Monte Carlo block splits its paths into two halves, one per factor of the
// g*g product, keeping every block's residual estimate unbiased; the
// reported std_err is the spread of the block estimates.
PdeResidualResult pde_residual(double t, double x, const SubordinatorSpec& spec,
                               std::uint64_t mc, double tol, unsigned workers,
                               RandomStream root);

}  // namespace fragcoal
