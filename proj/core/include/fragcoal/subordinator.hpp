#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "fragcoal/rng.hpp"

#include <json.hpp>

namespace fragcoal {

// Jump-size law for the compound-Poisson kind.
struct JumpLaw {
    enum class Dist { constant, exponential };
    Dist dist = Dist::constant;
    double param = 1.0;  // constant size a, or exponential mean

    static JumpLaw constant(double a) {
        if (!(a > 0.0)) throw std::invalid_argument("JumpLaw: constant size must be > 0");
        return {Dist::constant, a};
    }
    static JumpLaw exponential(double mean) {
        if (!(mean > 0.0)) throw std::invalid_argument("JumpLaw: exponential mean must be > 0");
        return {Dist::exponential, mean};
    }

    double mean() const { return param; }
    // E exp(-q J), closed form.
    double laplace(double q) const {
        return dist == Dist::constant ? std::exp(-q * param) : 1.0 / (1.0 + q * param);
    }
    double sample(RandomStream& rng) const {
        return dist == Dist::constant ? param : rng.exponential(1.0 / param);
    }
};

// Drift-free subordinator together with the drift constant c of the driving
// process X_t = B_t - Gamma_t + c t. Only kinds with exact finite-time
// increment samplers are admitted (zero, compound Poisson, gamma), since all
// downstream Monte Carlo identities require exact draws of Gamma_s.
// Invariants: E(Gamma_1) finite and c >= E(Gamma_1).
class SubordinatorSpec {
public:
    enum class Kind { zero, compound_poisson, gamma_process };

    static SubordinatorSpec zero(double c = 0.0);
    static SubordinatorSpec compound_poisson(double rate, JumpLaw jump, double c);
    static SubordinatorSpec gamma_process(double shape, double rate, double c);

    Kind kind() const { return kind_; }
    double drift() const { return c_; }
    double cp_rate() const { return rate_; }
    const JumpLaw& jump() const { return jump_; }
    double gamma_shape() const { return shape_; }
    double gamma_rate() const { return rate_; }

    // Laplace exponent phi(q) with E exp(-q Gamma_s) = exp(-s phi(q)).
    // phi(0) = 0; phi is nondecreasing and concave.
    double laplace_exponent(double q) const;

    // E Gamma_1.
    double mean_rate() const;

    // Exact draw of Gamma_s (no discretization).
    double sample_increment(double s, RandomStream& rng) const;

    // Repeated exact draws at a fixed s. Precomputes the per-s constants
    // (Poisson atom, gamma shape) once; the Monte Carlo kernels draw millions
    // of increments at the same scale. Same laws as sample_increment.
    class IncrementSampler {
    public:
        double operator()(RandomStream& rng) const {
            switch (kind_) {
                case Kind::zero:
                    return 0.0;
                case Kind::compound_poisson: {
                    // inversion with the cached zero atom; p_k recurrence
                    const double u = rng.uniform01();
                    if (u <= p0_) return 0.0;
                    double pk = p0_, cum = p0_;
                    std::uint64_t k = 0;
                    while (u > cum && k < 2000) {
                        ++k;
                        pk *= mean_ / static_cast<double>(k);
                        cum += pk;
                    }
                    if (jump_.dist == JumpLaw::Dist::constant)
                        return jump_.param * static_cast<double>(k);
                    double total = 0.0;
                    for (std::uint64_t i = 0; i < k; ++i) total += jump_.sample(rng);
                    return total;
                }
                case Kind::gamma_process:
                    return rng.gamma(shape_s_, rate_);
            }
            return 0.0;
        }

    private:
        friend class SubordinatorSpec;
        Kind kind_ = Kind::zero;
        double mean_ = 0.0;    // lambda * s
        double p0_ = 1.0;      // e^{-lambda s}
        double shape_s_ = 0.0;
        double rate_ = 0.0;
        JumpLaw jump_{};
    };

    IncrementSampler increment_sampler(double s) const;

    // Integrated Levy tail I(x) = int_0^x pi(]t,inf[) dt. Closed form for
    // the compound-Poisson kinds, adaptive quadrature of the known tail for
    // the gamma kind.
    double integrated_tail(double x) const;

    bool has_finite_levy_measure() const { return kind_ != Kind::gamma_process; }

    std::string describe() const;

    void to_json(nlohmann::json& j) const;
    static SubordinatorSpec from_json(const nlohmann::json& j);

private:
    SubordinatorSpec() = default;
    void check_drift_dominates_mean() const;

    Kind kind_ = Kind::zero;
    double c_ = 0.0;
    double rate_ = 0.0;   // compound-Poisson event rate, or gamma rate b
    double shape_ = 0.0;  // gamma shape a
    JumpLaw jump_{};
};

enum class EquivalenceVerdict { holds_numerically, fails_numerically };

// Numerical surrogate for the vanishing of phi(x) x^{delta-1} at infinity:
// evaluates on a geometric grid up to x_max and requires the sequence to be
// eventually decreasing with final value below tol. A finite grid cannot
// certify a limit, hence the "numerically" labels.
EquivalenceVerdict classify_equivalence(const SubordinatorSpec& spec, double delta,
                                        double x_max, double tol);

const char* to_string(EquivalenceVerdict v);

}  // namespace fragcoal
