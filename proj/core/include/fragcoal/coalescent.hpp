#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fragcoal/mass_partition.hpp"
#include "fragcoal/rng.hpp"

namespace fragcoal {

// Thrown by stepping operations when the chain has a single cluster left.
class AbsorbedState : public std::runtime_error {
public:
    AbsorbedState() : std::runtime_error("coalescent state is absorbed (k <= 1)") {}
};

struct CoalescentEvent {
    double time = 0.0;  // absolute event time
    MassPartition state;
};

struct CoalescentTrajectory {
    MassPartition initial;
    std::vector<CoalescentEvent> events;  // strictly increasing times; each
                                          // event drops the cluster count by 1
};

// Total merge intensity of a state with k >= 2 clusters: every unordered
// pair merges at the sum of its masses, so the total is (k-1) * total mass.
double total_merge_rate(const MassPartition& state);

// One exact jump of the chain: an Exp(total rate) holding time and a merging
// pair {i,j} selected with probability (m_i + m_j) / ((k-1) * total). The
// pair is drawn as: first index size-biased by mass, second uniform among
// the rest; summing the two orders of an unordered pair gives exactly the
// target law.
std::pair<double, MassPartition> coalescent_step(const MassPartition& state,
                                                 RandomStream& rng);

// Embedded-chain simulation until t_end (absolute time) or absorption.
CoalescentTrajectory simulate_coalescent(const MassPartition& initial, double t_end,
                                         RandomStream& rng);

// State of the chain started from n equal clusters and run for a duration of
// t + (1/2) ln n; a finite-n stand-in for the eternal coalescent at time t.
MassPartition standard_shifted_state(std::uint64_t n, double t, RandomStream& rng);

}  // namespace fragcoal
