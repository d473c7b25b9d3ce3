#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace wocc {

/// Seeded generator with distribution code written out here, because the
/// standard distributions are implementation-defined and would break
/// byte-identical output across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) { return lo + static_cast<std::int64_t>(index(static_cast<std::size_t>(hi - lo + 1))); }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean = 0.0, double sd = 1.0)
    {
        // Box-Muller; the second variate is discarded to keep the draw count fixed.
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return mean + sd * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double exponential(double mean) { return -mean * std::log(1.0 - uniform()); }

    std::int64_t poisson(double lambda)
    {
        if (lambda <= 0) return 0;
        if (lambda > 50) return std::max<std::int64_t>(0, std::llround(normal(lambda, std::sqrt(lambda))));
        const double limit = std::exp(-lambda);
        std::int64_t k = 0;
        double p = uniform();
        while (p > limit) {
            ++k;
            p *= uniform();
        }
        return k;
    }

    /// Index drawn proportionally to non-negative weights.
    std::size_t weighted(std::span<const double> weights)
    {
        double total = 0;
        for (double w : weights) total += w;
        double x = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (x < weights[i]) return i;
            x -= weights[i];
        }
        return weights.size() - 1;
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[index(i)]);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

} // namespace wocc
