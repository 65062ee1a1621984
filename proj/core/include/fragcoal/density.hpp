#pragma once

#include <cstdint>
#include <span>

#include "fragcoal/mass_partition.hpp"
#include "fragcoal/mc_estimate.hpp"
#include "fragcoal/rng.hpp"
#include "fragcoal/subordinator.hpp"

namespace fragcoal {

// Gaussian density p_t(u) = (2 pi t)^{-1/2} exp(-u^2 / (2t)).
double gaussian_density(double t, double u);

// Arguments of a density-ratio evaluation q_s(u) / p_s(u), where p is the
// Gaussian density of B_s and q the density of X_s = B_s - Gamma_s + c s.
struct RatioQuery {
    SubordinatorSpec spec;
    double s = 1.0;                  // time index, in (0,1]
    double u = 0.0;                  // spatial argument
    std::uint64_t mc_samples = 0;    // >= 1000
};

// Unbiased Monte Carlo estimate of q_s(u)/p_s(u) through the identity
//   q_s(u)/p_s(u) = exp(c u - c^2 s / 2) E[exp(-Gamma_s^2/(2s) - Gamma_s (u/s - c))]
// using exact Gamma_s draws (never density deconvolution).
MCEstimate density_ratio(const RatioQuery& query, RandomStream& rng);

// Per-fragment weight factor g(t,x) = e^{t c x} q_x(-t x) / p_x(-t x),
// evaluated through the single-expectation reduction
//   g(t,x) = e^{-x c^2 / 2} E[exp(-Gamma_x^2/(2x) + Gamma_x (t + c))]
// (one Monte Carlo mean, no ratio of estimates); g(t,0) = 1 by convention.
MCEstimate eval_g(double t, double x, const SubordinatorSpec& spec, std::uint64_t mc,
                  RandomStream& rng);

// Evaluates the multiplicative fragment weights of the subordinator-tilted
// fragmentation law relative to the Brownian one. The normalizer
// q_1(0)/p_1(0) multiplies every evaluation, so it is estimated once per
// evaluator with its own sample budget and cached; its standard error is
// propagated to each result by a first-order delta method.
class WeightEvaluator {
public:
    WeightEvaluator(SubordinatorSpec spec, std::uint64_t mc_normalizer, RandomStream rng);

    const SubordinatorSpec& spec() const { return spec_; }
    const MCEstimate& normalizer_ratio() const { return norm_; }  // q_1(0)/p_1(0)

    // Whole-partition weight H(t,x) = (p_1(0)/q_1(0)) prod_i g(t, x_i) for a
    // partition with total mass 1 (sum x_i = 1 absorbs the e^{tc} factor of
    // the raw product form). Factors use independent draws and are combined
    // in log space; the standard error is first-order in the factor errors.
    // Fragments in a tail whose ratio factors are pinned to 1 by the
    // small-mass bounds (within 1e-6) are skipped.
    MCEstimate partition_weight(double t, const MassPartition& partition,
                                std::uint64_t mc_per_fragment, RandomStream& rng) const;

    // Single-fragment weight h(t,x) = e^{tcx} (p_1(0)/q_1(0))^x q_x(-tx)/p_x(-tx).
    MCEstimate fragment_weight(double t, double x, std::uint64_t mc, RandomStream& rng) const;

    // Finite-dimensional weight of a size-biased prefix x_1..x_n with
    // S = sum x_i < 1:
    //   (p_1(0)/q_1(0)) (q_{1-S}(St)/p_{1-S}(St)) prod_i q_{x_i}(-t x_i)/p_{x_i}(-t x_i).
    MCEstimate prefix_weight(double t, std::span<const double> xs, std::uint64_t mc,
                             RandomStream& rng) const;

    // Density of the first size-biased fragment of the tilted law at z:
    //   t q_z(-tz) q_{1-z}(zt) / ((1-z) q_1(0)).
    // Closed form (zero noise) for the zero-subordinator spec.
    MCEstimate first_pick_density(double t, double z, std::uint64_t mc,
                                  RandomStream& rng) const;

private:
    SubordinatorSpec spec_;
    MCEstimate norm_;
};

}  // namespace fragcoal
