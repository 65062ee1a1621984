#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace fragcoal {

// Monte Carlo value with its standard error (sample sd / sqrt(n)) and the
// sample count. The return type of every stochastic evaluation.
struct MCEstimate {
    double value = 0.0;
    double std_err = 0.0;
    std::uint64_t n = 0;
};

// Single-pass mean/variance accumulator over first and second moments.
// Accumulation order is fixed by the caller, which keeps reductions
// bit-reproducible; the second-moment form keeps the hot loops division-free
// and is exact (variance 0) for constant inputs.
class Accumulator {
public:
    void add(double x) {
        ++n_;
        sum_ += x;
        sum2_ += x * x;
    }

    std::uint64_t count() const { return n_; }
    double mean() const { return n_ ? sum_ / static_cast<double>(n_) : 0.0; }

    double variance() const {
        if (n_ < 2) return 0.0;
        const double n = static_cast<double>(n_);
        const double v = (sum2_ - sum_ * (sum_ / n)) / (n - 1.0);
        return v > 0.0 ? v : 0.0;
    }

    double std_error() const {
        if (n_ < 2) return 0.0;
        return std::sqrt(variance() / static_cast<double>(n_));
    }

    MCEstimate estimate() const {
        if (n_ == 0) throw std::logic_error("Accumulator: no samples");
        return MCEstimate{mean(), std_error(), n_};
    }

private:
    std::uint64_t n_ = 0;
    double sum_ = 0.0;
    double sum2_ = 0.0;
};

}  // namespace fragcoal
