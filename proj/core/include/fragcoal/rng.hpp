#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace fragcoal {

// Counter-based random stream (Philox 4x32-10, Salmon et al. 2011).
//
// A stream is identified by a 64-bit key; draws are a pure function of
// (key, counter). Substreams are derived by hashing a child index into the
// key, so replicate i of a run can be seeded as
//     RandomStream::root(seed, "module-tag").substream(i)
// and produces the same values no matter how work is scheduled across
// threads. All samplers below are hand-rolled so that results do not depend
// on the standard library's unspecified distribution algorithms.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t key) : key_(key) {}

    static RandomStream root(std::uint64_t seed, std::string_view tag) {
        return RandomStream(mix(seed, fnv1a(tag)));
    }

    // Independent child stream; deterministic in (key, child).
    RandomStream substream(std::uint64_t child) const {
        return RandomStream(mix(key_, 0x6A09E667F3BCC909ULL + child));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64() {
        if (have_spare_block_) {
            have_spare_block_ = false;
            return spare_block_;
        }
        std::array<std::uint32_t, 4> out = block(counter_++);
        spare_block_ = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
        have_spare_block_ = true;
        return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    }

    // Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second variate of each pair is
    // cached on the stream.
    double normal() {
        if (have_spare_normal_) {
            have_spare_normal_ = false;
            return spare_normal_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_normal_ = r * std::sin(theta);
        have_spare_normal_ = true;
        return r * std::cos(theta);
    }

    double exponential(double rate) {
        if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
        return -std::log(uniform01()) / rate;
    }

    // Poisson by inversion for small means; larger means are split using
    // Poisson(a+b) = Poisson(a) + Poisson(b).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        std::uint64_t total = 0;
        while (mean > 60.0) {
            total += poisson_inversion(30.0);
            mean -= 30.0;
        }
        return total + poisson_inversion(mean);
    }

    // Gamma(shape, rate) via Marsaglia-Tsang; shape < 1 uses the boost
    // Gamma(a) = Gamma(a+1) * U^{1/a}.
    double gamma(double shape, double rate) {
        if (!(shape > 0.0) || !(rate > 0.0))
            throw std::invalid_argument("gamma: shape and rate must be > 0");
        double boost = 1.0;
        if (shape < 1.0) {
            boost = std::pow(uniform01(), 1.0 / shape);
            shape += 1.0;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double z, v;
            do {
                z = normal();
                v = 1.0 + c * z;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform01();
            if (u < 1.0 - 0.0331 * z * z * z * z) return boost * d * v / rate;
            if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v))) return boost * d * v / rate;
        }
    }

private:
    std::uint64_t poisson_inversion(double mean) {
        double p = std::exp(-mean);
        double cum = p;
        double u = uniform01();
        std::uint64_t k = 0;
        while (u > cum) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
            if (k > 2000) break;  // cum ~ 1 long before this for mean <= 60
        }
        return k;
    }

    std::array<std::uint32_t, 4> block(std::uint64_t n) const {
        std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(n >> 32),
            0xDECAFBADu, 0x2545F491u};
        std::array<std::uint32_t, 2> key = {
            static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)};
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ULL * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ULL * ctr[2];
            std::array<std::uint32_t, 4> next = {
                static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                static_cast<std::uint32_t>(p1),
                static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                static_cast<std::uint32_t>(p0)};
            ctr = next;
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        return splitmix(splitmix(a ^ 0xA0761D6478BD642FULL) + b);
    }

    static std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xCBF29CE484222325ULL;
        for (char ch : s) {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001B3ULL;
        }
        return h;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t spare_block_ = 0;
    double spare_normal_ = 0.0;
    bool have_spare_block_ = false;
    bool have_spare_normal_ = false;
};

}  // namespace fragcoal
