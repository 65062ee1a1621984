#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fragcoal {

// Element of the state space of decreasing mass sequences: masses sorted
// nonincreasing, every entry > 0, sum at most 1 (up to numerical slack).
// Fragmentation samplers produce partitions whose masses sum to 1 exactly.
struct MassPartition {
    std::vector<double> masses;  // nonincreasing, all > 0
    double total = 0.0;

    static MassPartition from_masses(std::vector<double> m) {
        for (double x : m) {
            if (!(x > 0.0)) throw std::invalid_argument("MassPartition: masses must be > 0");
        }
        std::stable_sort(m.begin(), m.end(), std::greater<double>());
        double sum = 0.0;
        for (double x : m) sum += x;
        if (sum > 1.0 + 1e-12)
            throw std::invalid_argument("MassPartition: total mass exceeds 1");
        MassPartition p;
        p.masses = std::move(m);
        p.total = sum;
        return p;
    }

    static MassPartition monodisperse(std::size_t n) {
        if (n == 0) throw std::invalid_argument("MassPartition: need at least one cluster");
        return from_masses(std::vector<double>(n, 1.0 / static_cast<double>(n)));
    }

    std::size_t size() const { return masses.size(); }
    double largest() const { return masses.empty() ? 0.0 : masses.front(); }
    double second_largest() const { return masses.size() > 1 ? masses[1] : 0.0; }

    bool is_normalized(double tol = 1e-9) const { return std::abs(total - 1.0) <= tol; }
};

}  // namespace fragcoal
