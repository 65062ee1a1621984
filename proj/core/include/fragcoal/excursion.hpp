#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fragcoal/mass_partition.hpp"
#include "fragcoal/rng.hpp"

namespace fragcoal {

// Path sampled on the uniform grid s = k/N, k = 0..N.
struct GridPath {
    std::uint32_t n_grid = 0;     // N
    std::vector<double> values;   // N+1 entries

    double at(std::size_t k) const { return values[k]; }
    bool is_bridge(double tol = 1e-9) const;
    bool is_excursion(double tol = 1e-9) const;
};

// Jump sizes theta_i (decreasing, >= 0) plus the Brownian coefficient sigma
// of a bridge with exchangeable increments. The normalized convention keeps
// sigma^2 + sum theta_i^2 = 1; with_literal_sigma() instead sets
// sigma = 1 - sum theta_i^2 and skips the unit-variance check, for
// side-by-side comparison of the two scalings.
struct ThetaSequence {
    std::vector<double> theta;
    double sigma = 1.0;
    bool literal_scaling = false;

    static ThetaSequence brownian() { return normalized({}); }
    static ThetaSequence normalized(std::vector<double> theta);
    static ThetaSequence with_literal_sigma(std::vector<double> theta);
};

// Standard Brownian bridge, exact finite-dimensional law on the grid:
// cumulative sums of N iid Gaussian(0, 1/N) increments, linearly pinned so
// that value[N] == 0 exactly.
GridPath brownian_bridge(std::uint32_t n_grid, RandomStream& rng);

// sigma * (Brownian bridge) + sum_i theta_i (1{s >= V_i} - s) with iid
// uniform V_i; jumps land at grid index ceil(V_i N) (right-continuity).
GridPath theta_bridge(const ThetaSequence& theta, std::uint32_t n_grid, RandomStream& rng);

// Vervaat transform: cyclic shift of a bridge at its minimum (smallest argmin
// index on ties), offset so the output starts and ends at 0 and is >= 0.
GridPath vervaat(const GridPath& bridge);

// Strict-record grid indices of the running maximum of d(s) = t s -
// excursion(s), always starting at 0. Records at time t are a subset of the
// records at any t' > t, which is the grid form of fragment refinement.
std::vector<std::size_t> record_indices(const GridPath& excursion, double t);

// Fragment masses at time t: lengths of the constancy intervals of the
// running maximum of d(s) = t s - excursion(s), read off as the gaps between
// successive strict-record grid indices (boundary interval included). The
// returned masses are integer multiples of 1/N and sum to 1 exactly.
MassPartition fragmentation_at(const GridPath& excursion, double t);

struct FragmentationSample {
    MassPartition partition;
    double t = 0.0;
    std::uint32_t grid_n = 0;
    std::uint64_t stream_key = 0;
    std::string law_tag;  // "brownian", "theta(...)", "weighted(...)"
};

FragmentationSample sample_brownian_fragmentation(double t, std::uint32_t n_grid,
                                                  RandomStream& rng);

FragmentationSample sample_theta_fragmentation(const ThetaSequence& theta, double t,
                                               std::uint32_t n_grid, RandomStream& rng);

}  // namespace fragcoal
