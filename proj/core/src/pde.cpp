#include "fragcoal/pde.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fragcoal/parallel.hpp"
#include "fragcoal/quadrature.hpp"

namespace fragcoal {

namespace {
constexpr double kInvSqrt8Pi = 0.19947114020071633896997302996719;  // (8 pi)^{-1/2}
constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;  // (2 pi)^{-1/2}
}  // namespace

double DislocationKernel::weight(double y) {
    if (!(y > 0.0) || !(y < 1.0)) throw std::invalid_argument("weight: y must be in (0,1)");
    return kInvSqrt8Pi / std::sqrt(y * y * y * (1.0 - y) * (1.0 - y) * (1.0 - y));
}

double DislocationKernel::nu_density(double y) {
    if (!(y > 0.5) || !(y < 1.0))
        throw std::invalid_argument("nu_density: y must be in (1/2,1)");
    return kInvSqrt2Pi / std::sqrt(y * y * y * (1.0 - y) * (1.0 - y) * (1.0 - y));
}

double nu_functional(const std::function<double(double, double)>& phi, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("nu_functional: tol must be > 0");
    // Substitute 1-y = w^2: dy = -2w dw maps (1/2,1) to w in (0, 1/sqrt 2) and
    // cancels the (1-y)^{-3/2} endpoint singularity against phi = O(1-y).
    auto integrand = [&phi](double w) {
        const double w2 = w * w;
        const double y = 1.0 - w2;
        return 2.0 * phi(y, w2) * kInvSqrt2Pi / (w2 * std::sqrt(y * y * y));
    };
    QuadResult q = adaptive_gauss_kronrod(integrand, 0.0, std::sqrt(0.5), tol, 4000);
    if (!q.converged)
        throw std::runtime_error(
            "nu_functional: quadrature did not converge (integrand not O(1-y)?)");
    return q.value;
}

double nu_one_minus_largest() {
    static const double cached =
        nu_functional([](double y1, double) { return 1.0 - y1; }, 1e-12);
    return cached;
}

namespace {

// sup |f'/f^2| on [0,1] by central differences on a fine grid.
double sup_fprime_over_f2(const std::function<double(double)>& f) {
    const int n = 2048;
    const double h = 1.0 / n;
    double sup = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) * h;
        const double x0 = std::max(0.0, x - 0.5 * h);
        const double x1 = std::min(1.0, x + 0.5 * h);
        const double deriv = (f(x1) - f(x0)) / (x1 - x0);
        const double fx = f(x);
        sup = std::max(sup, std::abs(deriv) / (fx * fx));
    }
    return sup;
}

}  // namespace

double generator_multiplicative(const std::function<double(double)>& f,
                                const MassPartition& partition, double alpha, double tol) {
    if (!(alpha >= 0.0)) throw std::invalid_argument("generator_multiplicative: alpha >= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("generator_multiplicative: tol > 0");
    if (std::abs(f(0.0) - 1.0) > 1e-9)
        throw std::invalid_argument("generator_multiplicative: f(0) must equal 1");
    for (int i = 0; i <= 512; ++i) {
        const double v = f(static_cast<double>(i) / 512.0);
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("generator_multiplicative: f must be positive on [0,1]");
    }

    const double cf = sup_fprime_over_f2(f);
    const double tail_coeff = 2.0 * cf * std::exp(cf) * nu_one_minus_largest();

    double f_product = 1.0;
    for (double x : partition.masses) f_product *= f(x);

    // Suffix sums of x^{alpha+1} drive the truncation bound.
    std::vector<double> suffix(partition.size() + 1, 0.0);
    for (std::size_t i = partition.size(); i-- > 0;) {
        suffix[i] = suffix[i + 1] + std::pow(partition.masses[i], alpha + 1.0);
    }

    const double quad_tol =
        0.5 * tol / static_cast<double>(std::max<std::size_t>(1, partition.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < partition.size(); ++i) {
        if (tail_coeff * suffix[i] < 0.5 * tol) break;
        const double r = partition.masses[i];
        auto phi = [&f, r](double y1, double y2) {
            return f(r * y1) * f(r * y2) / f(r) - 1.0;
        };
        sum += std::pow(r, alpha) * nu_functional(phi, quad_tol);
    }
    return f_product * sum;
}

MCEstimate dt_g(double t, double x, const SubordinatorSpec& spec, std::uint64_t mc,
                RandomStream& rng) {
    if (!(t >= 0.0)) throw std::invalid_argument("dt_g: t must be >= 0");
    if (x == 0.0) return MCEstimate{0.0, 0.0, mc};
    if (!(x > 0.0) || !(x <= 1.0)) throw std::invalid_argument("dt_g: x must be in (0,1]");
    if (mc < 2) throw std::invalid_argument("dt_g: mc must be >= 2");

    const double c = spec.drift();
    const double tilt = t + c;
    const double prefactor = std::exp(-0.5 * x * c * c);
    const auto draw = spec.increment_sampler(x);
    Accumulator acc;
    for (std::uint64_t i = 0; i < mc; ++i) {
        const double gamma = draw(rng);
        const double term =
            gamma == 0.0 ? 0.0
                         : gamma * std::exp(-gamma * gamma / (2.0 * x) + gamma * tilt);
        acc.add(term);
    }
    MCEstimate est = acc.estimate();
    est.value *= prefactor;
    est.std_err *= prefactor;
    return est;
}

namespace {

// QUADPACK K15/G7 constants (shared with quadrature.cpp, restated here for
// the fixed-node residual rule).
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kWeights15[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWeightsG7[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct ResidualNode {
    double v = 0.0;        // substituted coordinate, y = v^2
    double w15 = 0.0;      // K15 quadrature weight including the kernel factor
    double g7 = 0.0;       // matching G7 weight (0 at Kronrod-only nodes)
    std::size_t small_scale = 0;  // index of x*y in the scale array
    std::size_t large_scale = 0;  // index of x*(1-y)
};

// Integrand weight after symmetrizing to 2 * int_0^{1/2} and substituting
// y = v^2: 4 (8 pi)^{-1/2} v^{-2} (1-v^2)^{-3/2}.
double v_weight(double v) {
    const double one_minus = 1.0 - v * v;
    return 4.0 * kInvSqrt8Pi / (v * v * one_minus * std::sqrt(one_minus));
}

}  // namespace

PdeResidualResult pde_residual(double t, double x, const SubordinatorSpec& spec,
                               std::uint64_t mc, double tol, unsigned workers,
                               RandomStream root) {
    if (!(t >= 0.0)) throw std::invalid_argument("pde_residual: t must be >= 0");
    if (!(x > 0.0) || !(x <= 1.0)) throw std::invalid_argument("pde_residual: x in (0,1]");
    if (!(tol > 0.0)) throw std::invalid_argument("pde_residual: tol must be > 0");
    if (mc < 256) throw std::invalid_argument("pde_residual: mc must be >= 256");

    const double c = spec.drift();
    const double tilt = t + c;

    // Fixed graded panels [v0 2^j, v0 2^{j+1}] up to sqrt(1/2). The integrand
    // is smooth and bounded in v; the region below v0 contributes O(v0) and
    // is closed with a one-node stub counted entirely as quadrature error.
    // Fixed nodes (rather than noise-driven refinement) keep the node set
    // independent of the sampled surface.
    const double v0 = std::clamp(0.1 * tol, 1e-8, 1e-3);
    const double vmax = std::sqrt(0.5);
    std::vector<ResidualNode> nodes;
    std::vector<std::pair<std::size_t, std::size_t>> panel_ranges;
    std::vector<double> scales;  // all distinct Gamma time indices, then sorted

    auto add_node = [&](double v, double w15, double g7) {
        ResidualNode nd;
        nd.v = v;
        nd.w15 = w15 * v_weight(v);
        nd.g7 = g7 * v_weight(v);
        const double y = v * v;
        scales.push_back(x * y);
        scales.push_back(x * (1.0 - y));
        nodes.push_back(nd);
    };

    for (double a = v0; a < vmax; a *= 2.0) {
        const double b = std::min(2.0 * a, vmax);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        const std::size_t first = nodes.size();
        for (int i = 0; i < 7; ++i) {
            const bool gauss = (i % 2 == 1);
            const double g7w = gauss ? kWeightsG7[i / 2] * half : 0.0;
            add_node(mid - half * kNodes[i], kWeights15[i] * half, g7w);
            add_node(mid + half * kNodes[i], kWeights15[i] * half, g7w);
        }
        add_node(mid, kWeights15[7] * half, kWeightsG7[3] * half);
        panel_ranges.emplace_back(first, nodes.size());
    }
    // Stub node closing [0, v0].
    const std::size_t stub_index = nodes.size();
    add_node(v0, v0, 0.0);

    scales.push_back(x);
    std::sort(scales.begin(), scales.end());
    scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
    const std::size_t n_scales = scales.size();
    auto scale_index = [&scales](double s) {
        return static_cast<std::size_t>(
            std::lower_bound(scales.begin(), scales.end(), s) - scales.begin());
    };
    for (auto& nd : nodes) {
        nd.small_scale = scale_index(x * nd.v * nd.v);
        nd.large_scale = scale_index(x * (1.0 - nd.v * nd.v));
    }
    const std::size_t x_scale = scale_index(x);

    // Blocks of paths; each block -> one unbiased residual estimate.
    const std::uint32_t blocks = 32;
    const std::uint64_t per_block = mc / blocks;
    const std::uint64_t half_paths = std::max<std::uint64_t>(1, per_block / 2);

    // term(s) = exp(-Gamma_s^2/(2s) + Gamma_s (t+c)) accumulated per scale,
    // one increment walk per path so all nodes share the same paths.
    std::vector<SubordinatorSpec::IncrementSampler> step_samplers;
    step_samplers.reserve(n_scales);
    double prev_scale = 0.0;
    for (double s : scales) {
        step_samplers.push_back(spec.increment_sampler(s - prev_scale));
        prev_scale = s;
    }
    const auto draw_x = spec.increment_sampler(x);
    std::vector<double> half_sums(blocks * 2 * n_scales, 0.0);
    std::vector<double> dt_means(blocks, 0.0);

    parallel_for(blocks, workers, [&](std::uint64_t b) {
        RandomStream block_stream = root.substream(b);
        for (int half = 0; half < 2; ++half) {
            double* sums = &half_sums[(b * 2 + half) * n_scales];
            for (std::uint64_t p = 0; p < half_paths; ++p) {
                RandomStream path =
                    block_stream.substream(static_cast<std::uint64_t>(half) * half_paths + p);
                double gamma = 0.0;
                for (std::size_t i = 0; i < n_scales; ++i) {
                    gamma += step_samplers[i](path);
                    sums[i] += gamma == 0.0
                                   ? 1.0
                                   : std::exp(-gamma * gamma / (2.0 * scales[i]) + gamma * tilt);
                }
            }
        }
        RandomStream dt_stream = block_stream.substream(2 * half_paths + 7);
        double dt_sum = 0.0;
        for (std::uint64_t p = 0; p < 2 * half_paths; ++p) {
            const double gamma = draw_x(dt_stream);
            if (gamma != 0.0)
                dt_sum += gamma * std::exp(-gamma * gamma / (2.0 * x) + gamma * tilt);
        }
        dt_means[b] = dt_sum / static_cast<double>(2 * half_paths);
    });

    const double inv_half = 1.0 / static_cast<double>(half_paths);
    auto g_of = [&](const double* sums, std::size_t i) {
        return std::exp(-0.5 * scales[i] * c * c) * sums[i] * inv_half;
    };

    // Per-block residuals: the product g(xy) g(x(1-y)) pairs the A half with
    // the B half, so each block estimate is unbiased.
    std::vector<double> block_residuals(blocks, 0.0);
    const double pref = std::exp(-0.5 * x * c * c);
    for (std::uint32_t b = 0; b < blocks; ++b) {
        const double* a_sums = &half_sums[(b * 2 + 0) * n_scales];
        const double* b_sums = &half_sums[(b * 2 + 1) * n_scales];
        const double gb_x = g_of(b_sums, x_scale);
        double integral = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double bracket =
                g_of(a_sums, nodes[k].small_scale) * g_of(b_sums, nodes[k].large_scale) - gb_x;
            integral += nodes[k].w15 * bracket;
        }
        block_residuals[b] = pref * dt_means[b] + std::sqrt(x) * integral;
    }

    Accumulator block_acc;
    for (double r : block_residuals) block_acc.add(r);

    // Pooled surface for the reported terms and the quadrature error proxy.
    std::vector<double> pooled(n_scales, 0.0);
    for (std::uint32_t b = 0; b < blocks; ++b) {
        for (int half = 0; half < 2; ++half) {
            const double* sums = &half_sums[(b * 2 + half) * n_scales];
            for (std::size_t i = 0; i < n_scales; ++i) pooled[i] += sums[i];
        }
    }
    const double inv_total = 1.0 / static_cast<double>(2 * half_paths * blocks);
    auto g_pooled = [&](std::size_t i) {
        return std::exp(-0.5 * scales[i] * c * c) * pooled[i] * inv_total;
    };
    const double gp_x = g_pooled(x_scale);
    auto pooled_bracket = [&](std::size_t k) {
        return g_pooled(nodes[k].small_scale) * g_pooled(nodes[k].large_scale) - gp_x;
    };
    double integral15 = 0.0, quad_err = 0.0;
    for (const auto& [first, last] : panel_ranges) {
        double p15 = 0.0, p7 = 0.0;
        for (std::size_t k = first; k < last; ++k) {
            const double br = pooled_bracket(k);
            p15 += nodes[k].w15 * br;
            p7 += nodes[k].g7 * br;
        }
        integral15 += p15;
        quad_err += std::abs(p15 - p7);
    }
    const double stub = nodes[stub_index].w15 * pooled_bracket(stub_index);
    integral15 += stub;
    quad_err += std::abs(stub);

    double dt_pooled = 0.0;
    for (double d : dt_means) dt_pooled += d;
    dt_pooled = pref * dt_pooled / static_cast<double>(blocks);

    PdeResidualResult res;
    res.value = block_acc.mean();
    res.std_err = block_acc.std_error();
    res.quad_err = quad_err;
    res.dt_term = dt_pooled;
    res.integral_term = std::sqrt(x) * integral15;
    res.mc = static_cast<std::uint64_t>(2 * half_paths) * blocks;
    res.blocks = blocks;
    res.exploratory = !spec.has_finite_levy_measure();
    res.quad_converged = quad_err <= tol + 4.0 * res.std_err;
    return res;
}

}  // namespace fragcoal
