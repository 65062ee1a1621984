#include "fragcoal/density.hpp"

#include <cmath>
#include <vector>

namespace fragcoal {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_ratio_query(const RatioQuery& q) {
    if (!(q.s > 0.0) || !(q.s <= 1.0))
        throw std::invalid_argument("density_ratio: s must be in (0,1]");
    if (q.mc_samples < 1000)
        throw std::invalid_argument("density_ratio: mc_samples must be >= 1000");
    if (!std::isfinite(q.u)) throw std::invalid_argument("density_ratio: u must be finite");
}

}  // namespace

double gaussian_density(double t, double u) {
    if (!(t > 0.0)) throw std::invalid_argument("gaussian_density: t must be > 0");
    return std::exp(-u * u / (2.0 * t)) / std::sqrt(kTwoPi * t);
}

MCEstimate density_ratio(const RatioQuery& query, RandomStream& rng) {
    check_ratio_query(query);
    const double c = query.spec.drift();
    const double s = query.s;
    const double slope = query.u / s - c;
    const double prefactor = std::exp(c * query.u - 0.5 * c * c * s);

    const auto draw = query.spec.increment_sampler(s);
    Accumulator acc;
    for (std::uint64_t i = 0; i < query.mc_samples; ++i) {
        const double gamma = draw(rng);
        const double term =
            gamma == 0.0 ? 1.0 : std::exp(-gamma * gamma / (2.0 * s) - gamma * slope);
        acc.add(term);
    }
    MCEstimate est = acc.estimate();
    est.value *= prefactor;
    est.std_err *= prefactor;
    return est;
}

MCEstimate eval_g(double t, double x, const SubordinatorSpec& spec, std::uint64_t mc,
                  RandomStream& rng) {
    if (!(t >= 0.0)) throw std::invalid_argument("eval_g: t must be >= 0");
    if (x == 0.0) return MCEstimate{1.0, 0.0, mc};
    if (!(x > 0.0) || !(x <= 1.0)) throw std::invalid_argument("eval_g: x must be in (0,1]");
    if (mc < 2) throw std::invalid_argument("eval_g: mc must be >= 2");

    const double c = spec.drift();
    const double tilt = t + c;
    const double prefactor = std::exp(-0.5 * x * c * c);
    const auto draw = spec.increment_sampler(x);
    Accumulator acc;
    for (std::uint64_t i = 0; i < mc; ++i) {
        const double gamma = draw(rng);
        const double term =
            gamma == 0.0 ? 1.0 : std::exp(-gamma * gamma / (2.0 * x) + gamma * tilt);
        acc.add(term);
    }
    MCEstimate est = acc.estimate();
    est.value *= prefactor;
    est.std_err *= prefactor;
    return est;
}

WeightEvaluator::WeightEvaluator(SubordinatorSpec spec, std::uint64_t mc_normalizer,
                                 RandomStream rng)
    : spec_(std::move(spec)) {
    norm_ = density_ratio(RatioQuery{spec_, 1.0, 0.0, mc_normalizer}, rng);
}

MCEstimate WeightEvaluator::partition_weight(double t, const MassPartition& partition,
                                             std::uint64_t mc_per_fragment,
                                             RandomStream& rng) const {
    if (!(t >= 0.0)) throw std::invalid_argument("partition_weight: t must be >= 0");
    if (!partition.is_normalized())
        throw std::invalid_argument("partition_weight: partition must have total mass 1");

    // A tail of fragments may be skipped once its ratio factors are pinned to
    // 1 within 1e-6 both ways: |log factor| <= y K with
    // K = t^2/2 + c t + c^2/2 + (total jump rate). Only kinds with a finite
    // jump rate qualify; grid partitions essentially never trigger this.
    const double c = spec_.drift();
    double tail_bound_rate = t * t / 2.0 + c * t + c * c / 2.0;
    bool can_truncate = spec_.has_finite_levy_measure();
    if (spec_.kind() == SubordinatorSpec::Kind::compound_poisson)
        tail_bound_rate += spec_.cp_rate();

    double log_h = t * c - std::log(norm_.value);
    double rel_var = (norm_.std_err / norm_.value) * (norm_.std_err / norm_.value);

    double tail_mass = partition.total;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (can_truncate && tail_mass * tail_bound_rate < 1e-6) break;
        const double x = partition.masses[i];
        // log g(t,x) - t c x  ==  log ratio at (x, -t x)
        MCEstimate g = eval_g(t, x, spec_, mc_per_fragment, rng);
        log_h += std::log(g.value) - t * c * x;
        rel_var += (g.std_err / g.value) * (g.std_err / g.value);
        tail_mass -= x;
    }

    const double value = std::exp(log_h);
    return MCEstimate{value, value * std::sqrt(rel_var), mc_per_fragment};
}

MCEstimate WeightEvaluator::fragment_weight(double t, double x, std::uint64_t mc,
                                            RandomStream& rng) const {
    if (!(x > 0.0) || !(x <= 1.0))
        throw std::invalid_argument("fragment_weight: x must be in (0,1]");
    MCEstimate g = eval_g(t, x, spec_, mc, rng);
    const double log_h = std::log(g.value) - x * std::log(norm_.value);
    const double rel_var = (g.std_err / g.value) * (g.std_err / g.value) +
                           x * x * (norm_.std_err / norm_.value) * (norm_.std_err / norm_.value);
    const double value = std::exp(log_h);
    return MCEstimate{value, value * std::sqrt(rel_var), mc};
}

MCEstimate WeightEvaluator::prefix_weight(double t, std::span<const double> xs,
                                          std::uint64_t mc, RandomStream& rng) const {
    if (!(t >= 0.0)) throw std::invalid_argument("prefix_weight: t must be >= 0");
    if (xs.empty()) throw std::invalid_argument("prefix_weight: need at least one fragment");
    double s_total = 0.0;
    for (double x : xs) {
        if (!(x > 0.0)) throw std::invalid_argument("prefix_weight: fragments must be > 0");
        s_total += x;
    }
    if (!(s_total < 1.0))
        throw std::invalid_argument("prefix_weight: fragment sum must be < 1");

    double log_h = -std::log(norm_.value);
    double rel_var = (norm_.std_err / norm_.value) * (norm_.std_err / norm_.value);

    MCEstimate rest = density_ratio(RatioQuery{spec_, 1.0 - s_total, s_total * t, mc}, rng);
    log_h += std::log(rest.value);
    rel_var += (rest.std_err / rest.value) * (rest.std_err / rest.value);

    for (double x : xs) {
        MCEstimate r = density_ratio(RatioQuery{spec_, x, -t * x, mc}, rng);
        log_h += std::log(r.value);
        rel_var += (r.std_err / r.value) * (r.std_err / r.value);
    }
    const double value = std::exp(log_h);
    return MCEstimate{value, value * std::sqrt(rel_var), mc};
}

MCEstimate WeightEvaluator::first_pick_density(double t, double z, std::uint64_t mc,
                                               RandomStream& rng) const {
    if (!(t > 0.0)) throw std::invalid_argument("first_pick_density: t must be > 0");
    if (!(z > 0.0) || !(z < 1.0))
        throw std::invalid_argument("first_pick_density: z must be in (0,1)");

    MCEstimate r1 = density_ratio(RatioQuery{spec_, z, -t * z, mc}, rng);
    MCEstimate r2 = density_ratio(RatioQuery{spec_, 1.0 - z, z * t, mc}, rng);
    const double base = t * gaussian_density(z, -t * z) * gaussian_density(1.0 - z, z * t) /
                        ((1.0 - z) * gaussian_density(1.0, 0.0));
    const double value = base * r1.value * r2.value / norm_.value;
    const double rel_var = (r1.std_err / r1.value) * (r1.std_err / r1.value) +
                           (r2.std_err / r2.value) * (r2.std_err / r2.value) +
                           (norm_.std_err / norm_.value) * (norm_.std_err / norm_.value);
    return MCEstimate{value, std::abs(value) * std::sqrt(rel_var), mc};
}

}  // namespace fragcoal
