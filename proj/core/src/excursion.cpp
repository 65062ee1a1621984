#include "fragcoal/excursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fragcoal {

bool GridPath::is_bridge(double tol) const {
    if (values.size() != static_cast<std::size_t>(n_grid) + 1) return false;
    return std::abs(values.back() - values.front()) <= tol;
}

bool GridPath::is_excursion(double tol) const {
    if (values.size() != static_cast<std::size_t>(n_grid) + 1) return false;
    if (std::abs(values.front()) > tol || std::abs(values.back()) > tol) return false;
    for (double v : values)
        if (v < -tol) return false;
    return true;
}

ThetaSequence ThetaSequence::normalized(std::vector<double> theta) {
    double ss = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!(theta[i] >= 0.0)) throw std::invalid_argument("ThetaSequence: theta must be >= 0");
        if (i > 0 && theta[i] > theta[i - 1] + 1e-15)
            throw std::invalid_argument("ThetaSequence: theta must be nonincreasing");
        ss += theta[i] * theta[i];
    }
    if (ss > 1.0 + 1e-12) throw std::invalid_argument("ThetaSequence: sum theta_i^2 must be <= 1");
    ThetaSequence t;
    t.theta = std::move(theta);
    t.sigma = std::sqrt(std::max(0.0, 1.0 - ss));
    return t;
}

ThetaSequence ThetaSequence::with_literal_sigma(std::vector<double> theta) {
    ThetaSequence t = normalized(std::move(theta));
    double ss = 0.0;
    for (double x : t.theta) ss += x * x;
    t.sigma = 1.0 - ss;
    t.literal_scaling = true;
    return t;
}

namespace {

void validate_theta(const ThetaSequence& t) {
    if (!(t.sigma >= 0.0)) throw std::invalid_argument("ThetaSequence: sigma must be >= 0");
    double ss = t.sigma * t.sigma;
    for (std::size_t i = 0; i < t.theta.size(); ++i) {
        if (!(t.theta[i] >= 0.0)) throw std::invalid_argument("ThetaSequence: theta must be >= 0");
        if (i > 0 && t.theta[i] > t.theta[i - 1] + 1e-15)
            throw std::invalid_argument("ThetaSequence: theta must be nonincreasing");
        ss += t.theta[i] * t.theta[i];
    }
    if (!t.literal_scaling && std::abs(ss - 1.0) > 1e-9)
        throw std::invalid_argument("ThetaSequence: sigma^2 + sum theta_i^2 must equal 1");
}

}  // namespace

GridPath brownian_bridge(std::uint32_t n_grid, RandomStream& rng) {
    if (n_grid < 2) throw std::invalid_argument("brownian_bridge: need n_grid >= 2");
    const std::size_t n = n_grid;
    GridPath path;
    path.n_grid = n_grid;
    path.values.assign(n + 1, 0.0);
    const double sd = 1.0 / std::sqrt(static_cast<double>(n));
    double w = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
        w += sd * rng.normal();
        path.values[k] = w;
    }
    const double drift = path.values[n];
    for (std::size_t k = 1; k <= n; ++k) {
        path.values[k] -= (static_cast<double>(k) / static_cast<double>(n)) * drift;
    }
    path.values[n] = 0.0;
    return path;
}

GridPath theta_bridge(const ThetaSequence& theta, std::uint32_t n_grid, RandomStream& rng) {
    validate_theta(theta);
    GridPath path = brownian_bridge(n_grid, rng);
    const std::size_t n = n_grid;
    if (theta.sigma != 1.0) {
        for (auto& v : path.values) v *= theta.sigma;
    }
    if (theta.theta.empty()) return path;

    std::vector<double> step(n + 2, 0.0);
    double theta_sum = 0.0;
    for (double th : theta.theta) {
        const double v = rng.uniform01();
        const std::size_t idx = static_cast<std::size_t>(
            std::ceil(v * static_cast<double>(n)));
        step[std::min(idx, n)] += th;
        theta_sum += th;
    }
    double cum = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
        cum += step[k];
        path.values[k] += cum - theta_sum * (static_cast<double>(k) / static_cast<double>(n));
    }
    return path;
}

GridPath vervaat(const GridPath& bridge) {
    if (!bridge.is_bridge())
        throw std::invalid_argument("vervaat: input is not a bridge");
    const std::size_t n = bridge.n_grid;
    std::size_t argmin = 0;  // smallest index wins on ties
    for (std::size_t k = 1; k <= n; ++k) {
        if (bridge.values[k] < bridge.values[argmin]) argmin = k;
    }
    argmin %= n;  // an endpoint minimum is the start, cyclically
    const double low = bridge.values[argmin];
    GridPath out;
    out.n_grid = bridge.n_grid;
    out.values.assign(n + 1, 0.0);
    // Indices wrap mod n (the duplicate bridge endpoint is dropped), so every
    // output value is bridge[j] - low >= 0 exactly, with 0 at both ends.
    for (std::size_t k = 1; k < n; ++k) {
        out.values[k] = bridge.values[(argmin + k) % n] - low;
    }
    return out;
}

std::vector<std::size_t> record_indices(const GridPath& excursion, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("record_indices: t must be >= 0");
    if (!excursion.is_excursion())
        throw std::invalid_argument("record_indices: input is not an excursion");
    const std::size_t n = excursion.n_grid;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<std::size_t> records;
    records.push_back(0);
    double running_max = 0.0;  // d(0) = 0
    for (std::size_t k = 1; k <= n; ++k) {
        const double d = t * (static_cast<double>(k) * inv_n) - excursion.values[k];
        if (d > running_max) {
            running_max = d;
            records.push_back(k);
        }
    }
    return records;
}

MassPartition fragmentation_at(const GridPath& excursion, double t) {
    const std::vector<std::size_t> records = record_indices(excursion, t);
    const std::size_t n = excursion.n_grid;
    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<double> masses;
    masses.reserve(records.size());
    for (std::size_t i = 1; i < records.size(); ++i) {
        masses.push_back(static_cast<double>(records[i] - records[i - 1]) * inv_n);
    }
    masses.push_back(static_cast<double>(n - records.back()) * inv_n);
    if (masses.back() == 0.0) masses.pop_back();  // record at k = n
    return MassPartition::from_masses(std::move(masses));
}

FragmentationSample sample_brownian_fragmentation(double t, std::uint32_t n_grid,
                                                  RandomStream& rng) {
    FragmentationSample s;
    s.stream_key = rng.key();
    s.partition = fragmentation_at(vervaat(brownian_bridge(n_grid, rng)), t);
    s.t = t;
    s.grid_n = n_grid;
    s.law_tag = "brownian";
    return s;
}

FragmentationSample sample_theta_fragmentation(const ThetaSequence& theta, double t,
                                               std::uint32_t n_grid, RandomStream& rng) {
    FragmentationSample s;
    s.stream_key = rng.key();
    s.partition = fragmentation_at(vervaat(theta_bridge(theta, n_grid, rng)), t);
    s.t = t;
    s.grid_n = n_grid;
    s.law_tag = "theta";
    return s;
}

}  // namespace fragcoal
