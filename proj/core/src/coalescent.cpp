#include "fragcoal/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fragcoal {

double total_merge_rate(const MassPartition& state) {
    if (state.size() < 2) throw AbsorbedState();
    return static_cast<double>(state.size() - 1) * state.total;
}

namespace {

std::size_t size_biased_index(const MassPartition& state, RandomStream& rng) {
    const double target = rng.uniform01() * state.total;
    double cum = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        cum += state.masses[i];
        if (target <= cum) return i;
    }
    return state.size() - 1;
}

MassPartition merge_pair(const MassPartition& state, std::size_t i, std::size_t j) {
    MassPartition next;
    next.total = state.total;
    next.masses.reserve(state.size() - 1);
    const double merged = state.masses[i] + state.masses[j];
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (k != i && k != j) next.masses.push_back(state.masses[k]);
    }
    auto pos = std::lower_bound(next.masses.begin(), next.masses.end(), merged,
                                std::greater<double>());
    next.masses.insert(pos, merged);
    return next;
}

}  // namespace

std::pair<double, MassPartition> coalescent_step(const MassPartition& state,
                                                 RandomStream& rng) {
    const double rate = total_merge_rate(state);  // throws when absorbed
    const double holding = rng.exponential(rate);

    const std::size_t i = size_biased_index(state, rng);
    std::size_t j = static_cast<std::size_t>(rng.uniform01() *
                                             static_cast<double>(state.size() - 1));
    if (j >= state.size() - 1) j = state.size() - 2;
    if (j >= i) ++j;  // uniform among the k-1 others

    return {holding, merge_pair(state, i, j)};
}

CoalescentTrajectory simulate_coalescent(const MassPartition& initial, double t_end,
                                         RandomStream& rng) {
    if (!(t_end >= 0.0)) throw std::invalid_argument("simulate_coalescent: t_end must be >= 0");
    CoalescentTrajectory traj;
    traj.initial = initial;
    MassPartition state = initial;
    double time = 0.0;
    while (state.size() >= 2) {
        auto [holding, next] = coalescent_step(state, rng);
        time += holding;
        if (time > t_end) break;
        state = std::move(next);
        traj.events.push_back({time, state});
    }
    return traj;
}

MassPartition standard_shifted_state(std::uint64_t n, double t, RandomStream& rng) {
    if (n == 0) throw std::invalid_argument("standard_shifted_state: n must be >= 1");
    const double duration = t + 0.5 * std::log(static_cast<double>(n));
    if (!(duration >= 0.0))
        throw std::invalid_argument("standard_shifted_state: t must be >= -(1/2) ln n");
    MassPartition state = MassPartition::monodisperse(n);
    double time = 0.0;
    while (state.size() >= 2) {
        auto [holding, next] = coalescent_step(state, rng);
        time += holding;
        if (time > duration) break;
        state = std::move(next);
    }
    return state;
}

}  // namespace fragcoal
