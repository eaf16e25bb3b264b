#include "ctdn/rng.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctdn {

double RngStream::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

std::uint64_t RngStream::uniform_int(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double RngStream::normal() {
    // Box-Muller, cosine branch only; keeps the uniform consumption fixed.
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double RngStream::normal(double mean, double sd) {
    return mean + sd * normal();
}

long long RngStream::poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) {
        // Knuth: multiply uniforms until the product drops below exp(-mean).
        const double threshold = std::exp(-mean);
        long long k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform();
        } while (p > threshold);
        return k - 1;
    }
    // PTRS (Hormann 1993), exact for large means at O(1) expected cost.
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double u = uniform() - 0.5;
        double v = uniform();
        double us = 0.5 - std::fabs(u);
        double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        double k = kf;
        double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        double rhs = k * log_mean - mean - std::lgamma(k + 1.0);
        if (lhs <= rhs) return static_cast<long long>(kf);
    }
}

std::string RngStream::save_state() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void RngStream::load_state(const std::string& state) {
    std::istringstream is(state);
    is >> engine_;
    if (is.fail()) throw std::runtime_error("RngStream: malformed state string");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    // splitmix64 finalizer over seed ^ rotated salt
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace ctdn
