#include "fragcoal/subordinator.hpp"

#include <cmath>
#include <vector>

#include "fragcoal/quadrature.hpp"

namespace fragcoal {

SubordinatorSpec SubordinatorSpec::zero(double c) {
    SubordinatorSpec s;
    s.kind_ = Kind::zero;
    s.c_ = c;
    s.check_drift_dominates_mean();
    return s;
}

SubordinatorSpec SubordinatorSpec::compound_poisson(double rate, JumpLaw jump, double c) {
    if (!(rate > 0.0)) throw std::invalid_argument("SubordinatorSpec: rate must be > 0");
    SubordinatorSpec s;
    s.kind_ = Kind::compound_poisson;
    s.rate_ = rate;
    s.jump_ = jump;
    s.c_ = c;
    s.check_drift_dominates_mean();
    return s;
}

SubordinatorSpec SubordinatorSpec::gamma_process(double shape, double rate, double c) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("SubordinatorSpec: gamma shape and rate must be > 0");
    SubordinatorSpec s;
    s.kind_ = Kind::gamma_process;
    s.shape_ = shape;
    s.rate_ = rate;
    s.c_ = c;
    s.check_drift_dominates_mean();
    return s;
}

void SubordinatorSpec::check_drift_dominates_mean() const {
    if (!std::isfinite(c_)) throw std::invalid_argument("SubordinatorSpec: c must be finite");
    if (c_ < mean_rate() - 1e-12)
        throw std::invalid_argument("SubordinatorSpec: require c >= E(Gamma_1)");
}

double SubordinatorSpec::laplace_exponent(double q) const {
    if (!(q >= 0.0)) throw std::invalid_argument("laplace_exponent: q must be >= 0");
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::compound_poisson:
            return rate_ * (1.0 - jump_.laplace(q));
        case Kind::gamma_process:
            return shape_ * std::log1p(q / rate_);
    }
    return 0.0;
}

double SubordinatorSpec::mean_rate() const {
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::compound_poisson:
            return rate_ * jump_.mean();
        case Kind::gamma_process:
            return shape_ / rate_;
    }
    return 0.0;
}

double SubordinatorSpec::sample_increment(double s, RandomStream& rng) const {
    if (!(s > 0.0)) throw std::invalid_argument("sample_increment: s must be > 0");
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::compound_poisson: {
            const std::uint64_t k = rng.poisson(rate_ * s);
            if (jump_.dist == JumpLaw::Dist::constant)
                return jump_.param * static_cast<double>(k);
            double total = 0.0;
            for (std::uint64_t i = 0; i < k; ++i) total += jump_.sample(rng);
            return total;
        }
        case Kind::gamma_process:
            return rng.gamma(shape_ * s, rate_);
    }
    return 0.0;
}

SubordinatorSpec::IncrementSampler SubordinatorSpec::increment_sampler(double s) const {
    if (!(s > 0.0)) throw std::invalid_argument("increment_sampler: s must be > 0");
    IncrementSampler sampler;
    sampler.kind_ = kind_;
    switch (kind_) {
        case Kind::zero:
            break;
        case Kind::compound_poisson:
            sampler.mean_ = rate_ * s;
            sampler.p0_ = std::exp(-rate_ * s);
            sampler.jump_ = jump_;
            break;
        case Kind::gamma_process:
            sampler.shape_s_ = shape_ * s;
            sampler.rate_ = rate_;
            break;
    }
    return sampler;
}

double SubordinatorSpec::integrated_tail(double x) const {
    if (!(x > 0.0)) throw std::invalid_argument("integrated_tail: x must be > 0");
    switch (kind_) {
        case Kind::zero:
            return 0.0;
        case Kind::compound_poisson:
            if (jump_.dist == JumpLaw::Dist::constant)
                return rate_ * std::min(x, jump_.param);
            // tail of rate * Exponential(mean): pi(]t,inf[) = rate e^{-t/mean}
            return rate_ * jump_.param * (1.0 - std::exp(-x / jump_.param));
        case Kind::gamma_process: {
            // Levy density a t^{-1} e^{-bt}, so pi(]t,inf[) = a E1(b t); the
            // log singularity at 0 is integrable.
            const double a = shape_, b = rate_;
            auto tail = [a, b](double t) { return -a * std::expint(-b * t); };
            return adaptive_gauss_kronrod(tail, 0.0, x, 1e-11, 4000).value;
        }
    }
    return 0.0;
}

std::string SubordinatorSpec::describe() const {
    switch (kind_) {
        case Kind::zero:
            return "zero(c=" + std::to_string(c_) + ")";
        case Kind::compound_poisson:
            return "compound_poisson(rate=" + std::to_string(rate_) +
                   (jump_.dist == JumpLaw::Dist::constant ? ", constant jump "
                                                          : ", exponential jump ") +
                   std::to_string(jump_.param) + ", c=" + std::to_string(c_) + ")";
        case Kind::gamma_process:
            return "gamma(shape=" + std::to_string(shape_) + ", rate=" + std::to_string(rate_) +
                   ", c=" + std::to_string(c_) + ")";
    }
    return "?";
}

void SubordinatorSpec::to_json(nlohmann::json& j) const {
    switch (kind_) {
        case Kind::zero:
            j = {{"kind", "zero"}, {"c", c_}};
            break;
        case Kind::compound_poisson: {
            nlohmann::json jump;
            if (jump_.dist == JumpLaw::Dist::constant)
                jump = {{"dist", "constant"}, {"a", jump_.param}};
            else
                jump = {{"dist", "exponential"}, {"mean", jump_.param}};
            j = {{"kind", "compound_poisson"}, {"rate", rate_}, {"jump", jump}, {"c", c_}};
            break;
        }
        case Kind::gamma_process:
            j = {{"kind", "gamma"}, {"shape", shape_}, {"rate", rate_}, {"c", c_}};
            break;
    }
}

SubordinatorSpec SubordinatorSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.contains("c"))
        throw std::invalid_argument("spec json: need object with \"kind\" and \"c\"");
    const std::string kind = j.at("kind").get<std::string>();
    const double c = j.at("c").get<double>();
    if (kind == "zero") return SubordinatorSpec::zero(c);
    if (kind == "compound_poisson") {
        const auto& jj = j.at("jump");
        const std::string dist = jj.at("dist").get<std::string>();
        JumpLaw jump;
        if (dist == "constant")
            jump = JumpLaw::constant(jj.at("a").get<double>());
        else if (dist == "exponential")
            jump = JumpLaw::exponential(jj.at("mean").get<double>());
        else
            throw std::invalid_argument("spec json: unknown jump dist \"" + dist + "\"");
        return SubordinatorSpec::compound_poisson(j.at("rate").get<double>(), jump, c);
    }
    if (kind == "gamma")
        return SubordinatorSpec::gamma_process(j.at("shape").get<double>(),
                                               j.at("rate").get<double>(), c);
    throw std::invalid_argument("spec json: unknown kind \"" + kind + "\"");
}

EquivalenceVerdict classify_equivalence(const SubordinatorSpec& spec, double delta,
                                        double x_max, double tol) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw std::invalid_argument("classify_equivalence: delta must be in (0,1)");
    if (!(x_max >= 1e3))
        throw std::invalid_argument("classify_equivalence: x_max must be >= 1e3");
    if (!(tol > 0.0)) throw std::invalid_argument("classify_equivalence: tol must be > 0");

    // 16 points per decade from 1 to x_max.
    std::vector<double> values;
    const double step = std::pow(10.0, 1.0 / 16.0);
    for (double x = 1.0; x <= x_max * (1.0 + 1e-12); x *= step) {
        values.push_back(spec.laplace_exponent(x) * std::pow(x, delta - 1.0));
    }
    std::size_t last_rise = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[i - 1] * (1.0 + 1e-12)) last_rise = i;
    }
    const bool eventually_decreasing = last_rise <= (2 * values.size()) / 3;
    const bool below_tol = values.back() < tol;
    return (eventually_decreasing && below_tol) ? EquivalenceVerdict::holds_numerically
                                                : EquivalenceVerdict::fails_numerically;
}

const char* to_string(EquivalenceVerdict v) {
    return v == EquivalenceVerdict::holds_numerically ? "holds_numerically"
                                                      : "fails_numerically";
}

}  // namespace fragcoal
