#include "fragcoal/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fragcoal/parallel.hpp"
#include "fragcoal/stats.hpp"

namespace fragcoal {

std::vector<double> size_biased_rearrange(const MassPartition& partition, RandomStream& rng) {
    if (!partition.is_normalized())
        throw std::invalid_argument("size_biased_rearrange: partition must have total mass 1");
    const std::size_t k = partition.size();
    std::vector<std::pair<double, double>> keyed(k);  // (Exp_i / x_i, x_i)
    for (std::size_t i = 0; i < k; ++i) {
        const double x = partition.masses[i];
        keyed[i] = {rng.exponential(1.0) / x, x};
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = keyed[i].second;
    return out;
}

double size_biased_pick(const MassPartition& partition, RandomStream& rng) {
    if (!partition.is_normalized())
        throw std::invalid_argument("size_biased_pick: partition must have total mass 1");
    const double target = rng.uniform01() * partition.total;
    double cum = 0.0;
    for (double x : partition.masses) {
        cum += x;
        if (target <= cum) return x;
    }
    return partition.masses.back();
}

MartingaleReport martingale_check(const SubordinatorSpec& spec,
                                  const std::vector<double>& t_list, std::uint32_t grid_n,
                                  std::uint64_t replicates, std::uint64_t mc_inner,
                                  std::uint64_t mc_normalizer, unsigned workers,
                                  RandomStream root) {
    if (t_list.empty()) throw std::invalid_argument("martingale_check: t_list is empty");
    if (replicates < 2) throw std::invalid_argument("martingale_check: need >= 2 replicates");

    RandomStream norm_stream = root.substream(replicates);
    WeightEvaluator evaluator(spec, mc_normalizer, norm_stream);

    const std::size_t nt = t_list.size();
    std::vector<double> values(replicates * nt);
    std::vector<double> inner_var(replicates * nt);

    parallel_for(replicates, workers, [&](std::uint64_t r) {
        RandomStream stream = root.substream(r);
        const GridPath excursion = vervaat(brownian_bridge(grid_n, stream));
        for (std::size_t j = 0; j < nt; ++j) {
            const MassPartition part = fragmentation_at(excursion, t_list[j]);
            const MCEstimate h = evaluator.partition_weight(t_list[j], part, mc_inner, stream);
            values[r * nt + j] = h.value;
            inner_var[r * nt + j] = h.std_err * h.std_err;
        }
    });

    MartingaleReport report;
    report.normalizer_ratio = evaluator.normalizer_ratio();
    for (std::size_t j = 0; j < nt; ++j) {
        Accumulator acc;
        double mean_inner = 0.0;
        double sum_w = 0.0, sum_w2 = 0.0, min_w = values[j];
        for (std::uint64_t r = 0; r < replicates; ++r) {
            const double w = values[r * nt + j];
            acc.add(w);
            sum_w += w;
            sum_w2 += w * w;
            min_w = std::min(min_w, w);
            mean_inner += inner_var[r * nt + j];
        }
        mean_inner /= static_cast<double>(replicates);
        MartingalePoint pt;
        pt.t = t_list[j];
        pt.estimate = acc.estimate();
        pt.inner_std_err = std::sqrt(mean_inner / static_cast<double>(replicates));
        pt.effective_sample_size = sum_w * sum_w / sum_w2;
        pt.min_weight = min_w;
        report.points.push_back(pt);
    }
    return report;
}

ImportanceResult importance_expectation(const std::function<double(const MassPartition&)>& f,
                                        const SubordinatorSpec& spec, double t,
                                        std::uint32_t grid_n, std::uint64_t replicates,
                                        std::uint64_t mc_inner, std::uint64_t mc_normalizer,
                                        unsigned workers, RandomStream root) {
    if (replicates < 2) throw std::invalid_argument("importance_expectation: need >= 2 replicates");

    RandomStream norm_stream = root.substream(replicates);
    WeightEvaluator evaluator(spec, mc_normalizer, norm_stream);

    std::vector<double> weighted(replicates);
    std::vector<double> weights(replicates);
    parallel_for(replicates, workers, [&](std::uint64_t r) {
        RandomStream stream = root.substream(r);
        const MassPartition part =
            fragmentation_at(vervaat(brownian_bridge(grid_n, stream)), t);
        const MCEstimate h = evaluator.partition_weight(t, part, mc_inner, stream);
        weights[r] = h.value;
        weighted[r] = h.value * f(part);
    });

    Accumulator acc;
    for (double v : weighted) acc.add(v);
    double sum_w = 0.0, sum_w2 = 0.0;
    double min_w = weights[0], max_w = weights[0];
    for (double w : weights) {
        sum_w += w;
        sum_w2 += w * w;
        min_w = std::min(min_w, w);
        max_w = std::max(max_w, w);
    }
    ImportanceResult res;
    res.estimate = acc.estimate();
    res.effective_sample_size = sum_w * sum_w / sum_w2;
    res.min_weight = min_w;
    res.max_weight = max_w;
    res.low_ess_warning =
        res.effective_sample_size < 0.1 * static_cast<double>(replicates);
    return res;
}

double brownian_first_pick_density(double t, double z) {
    if (!(t > 0.0)) throw std::invalid_argument("brownian_first_pick_density: t must be > 0");
    if (!(z > 0.0) || !(z < 1.0)) return 0.0;
    return t * 0.3989422804014326779399461 * std::pow(z, -0.5) * std::pow(1.0 - z, -1.5) *
           std::exp(-t * t * z / (2.0 * (1.0 - z)));
}

double brownian_first_pick_cdf(double t, double z) {
    if (!(t > 0.0)) throw std::invalid_argument("brownian_first_pick_cdf: t must be > 0");
    if (z <= 0.0) return 0.0;
    if (z >= 1.0) return 1.0;
    return 2.0 * normal_cdf(t * std::sqrt(z / (1.0 - z))) - 1.0;
}

MarginalTestReport marginal_density_test(double t, std::uint32_t grid_n,
                                         std::uint64_t replicates, std::size_t bins,
                                         unsigned workers, RandomStream root) {
    if (!(t >= 0.0)) throw std::invalid_argument("marginal_density_test: t must be >= 0");
    if (bins < 2) throw std::invalid_argument("marginal_density_test: need >= 2 bins");
    if (replicates < bins * 5)
        throw std::invalid_argument("marginal_density_test: too few replicates for bin count");

    MarginalTestReport report;
    report.bins = bins;
    report.expected_prob.assign(bins, 1.0 / static_cast<double>(bins));

    if (t == 0.0) {
        // Single constancy interval: every pick is the whole mass at z = 1.
        report.degenerate = true;
        report.counts.assign(bins, 0);
        report.counts.back() = replicates;
        report.chi_square = 0.0;
        report.dof = static_cast<double>(bins - 1);
        report.p_value = 1.0;
        return report;
    }

    // Equal-probability bin edges from the closed-form CDF:
    // z_k = v^2/(1+v^2) with v = Phi^{-1}((1 + k/bins)/2) / t.
    for (std::size_t k = 1; k < bins; ++k) {
        const double p = static_cast<double>(k) / static_cast<double>(bins);
        const double v = normal_quantile(0.5 * (1.0 + p)) / t;
        report.edges.push_back(v * v / (1.0 + v * v));
    }

    std::vector<std::uint8_t> bin_index(replicates);
    parallel_for(replicates, workers, [&](std::uint64_t r) {
        RandomStream stream = root.substream(r);
        const MassPartition part =
            fragmentation_at(vervaat(brownian_bridge(grid_n, stream)), t);
        const double z = size_biased_pick(part, stream);
        bin_index[r] = static_cast<std::uint8_t>(
            std::upper_bound(report.edges.begin(), report.edges.end(), z) -
            report.edges.begin());
    });

    report.counts.assign(bins, 0);
    for (std::uint64_t r = 0; r < replicates; ++r) ++report.counts[bin_index[r]];

    const ChiSquareResult chi = chi_square_gof(report.counts, report.expected_prob);
    report.chi_square = chi.statistic;
    report.dof = chi.dof;
    report.p_value = chi.p_value;
    return report;
}

}  // namespace fragcoal
