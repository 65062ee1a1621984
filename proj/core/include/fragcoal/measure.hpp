#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fragcoal/density.hpp"
#include "fragcoal/excursion.hpp"
#include "fragcoal/mass_partition.hpp"
#include "fragcoal/mc_estimate.hpp"
#include "fragcoal/rng.hpp"
#include "fragcoal/subordinator.hpp"

namespace fragcoal {

// Random reordering by successive size-biased picks without replacement:
// P(first = i) = x_i, then renormalize over the remainder. Drawn via the
// exponential race (sort by Exp_i / x_i), which realizes the same law in one
// pass. Requires total mass 1 (within 1e-9).
std::vector<double> size_biased_rearrange(const MassPartition& partition, RandomStream& rng);

// One size-biased pick (the first element of the rearrangement).
double size_biased_pick(const MassPartition& partition, RandomStream& rng);

struct MartingalePoint {
    double t = 0.0;
    MCEstimate estimate;     // sample mean/se of the per-path weights; the se
                             // includes inner Monte Carlo noise (total-variance)
    double inner_std_err = 0.0;  // share of the se due to inner weight noise
    double effective_sample_size = 0.0;  // (sum w)^2 / sum w^2 of the weights
    double min_weight = 0.0;
};

struct MartingaleReport {
    std::vector<MartingalePoint> points;
    MCEstimate normalizer_ratio;  // cached q_1(0)/p_1(0)
};

// Samples Brownian fragmentations and averages the partition weight at each
// t: the per-t means estimate E[H(t, F(t))], which equals 1 for every t when
// the weight process is a martingale started at the deterministic state (1).
// One excursion per replicate is reused across the whole t list.
MartingaleReport martingale_check(const SubordinatorSpec& spec,
                                  const std::vector<double>& t_list, std::uint32_t grid_n,
                                  std::uint64_t replicates, std::uint64_t mc_inner,
                                  std::uint64_t mc_normalizer, unsigned workers,
                                  RandomStream root);

struct ImportanceResult {
    MCEstimate estimate;
    double effective_sample_size = 0.0;  // (sum w)^2 / sum w^2
    double min_weight = 0.0;
    double max_weight = 0.0;
    bool low_ess_warning = false;  // ess < 10% of replicates
};

// Importance-sampling estimate of E[f(F(t))] under the subordinator-tilted
// law, as the Brownian-law mean of f(F^B(t)) H(t, F^B(t)).
ImportanceResult importance_expectation(const std::function<double(const MassPartition&)>& f,
                                        const SubordinatorSpec& spec, double t,
                                        std::uint32_t grid_n, std::uint64_t replicates,
                                        std::uint64_t mc_inner, std::uint64_t mc_normalizer,
                                        unsigned workers, RandomStream root);

// Closed-form density/CDF of the first size-biased fragment of the Brownian
// fragmentation at time t:
//   density(z) = t (2 pi)^{-1/2} z^{-1/2} (1-z)^{-3/2} exp(-t^2 z / (2(1-z)))
//   cdf(z)     = 2 Phi(t sqrt(z/(1-z))) - 1
// (the plug-in of the Gaussian density into the general first-pick formula;
// the two forms are algebraically identical).
double brownian_first_pick_density(double t, double z);
double brownian_first_pick_cdf(double t, double z);

struct MarginalTestReport {
    std::size_t bins = 0;
    std::vector<double> edges;           // interior bin edges (bins - 1)
    std::vector<std::uint64_t> counts;   // observed, size bins
    std::vector<double> expected_prob;   // 1/bins each
    double chi_square = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
    bool degenerate = false;  // t == 0: the pick is identically 1
};

// Draws Brownian fragmentations, takes one size-biased pick per path, and
// chi-square-tests the picks against the closed-form marginal over
// equal-probability bins.
MarginalTestReport marginal_density_test(double t, std::uint32_t grid_n,
                                         std::uint64_t replicates, std::size_t bins,
                                         unsigned workers, RandomStream root);

}  // namespace fragcoal
