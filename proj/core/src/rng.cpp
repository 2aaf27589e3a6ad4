#include "snn/rng.hpp"

#include <cmath>

namespace snn {

std::uint64_t CounterRng::below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    __uint128_t m = static_cast<__uint128_t>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<__uint128_t>((*this)()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

namespace {

double log_factorial(std::uint64_t k) {
    return std::lgamma(static_cast<double>(k) + 1.0);
}

}  // namespace

std::uint64_t CounterRng::poisson(double mean) noexcept {
    return poisson(mean, mean < 10.0 ? std::exp(-mean) : 0.0);
}

std::uint64_t CounterRng::poisson(double mean, double exp_neg_mean) noexcept {
    if (!(mean > 0.0)) return 0;

    if (mean < 10.0) {
        // Knuth: multiply uniforms until the product drops below e^-mean.
        const double limit = exp_neg_mean;
        std::uint64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    // Hörmann's PTRS (transformed rejection with squeeze).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::fabs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        const auto k = static_cast<std::uint64_t>(kf);
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + kf * loglam - log_factorial(k)) {
            return k;
        }
    }
}

}  // namespace snn
