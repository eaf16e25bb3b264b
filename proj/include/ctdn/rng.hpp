// Deterministic random streams. All randomness in the project flows through
// RngStream so that a seed fully determines every sampled value, independent
// of the standard library's distribution implementations.
#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace ctdn {

class RngStream {
public:
    RngStream() : engine_(0x9e3779b97f4a7c15ull) {}
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    // Uniform on [lo, hi).
    double uniform(double lo, double hi);
    // Uniform integer in [0, n), n > 0. Rejection sampling, no modulo bias.
    std::uint64_t uniform_int(std::uint64_t n);
    // Standard normal via Box-Muller. Consumes exactly two uniforms per call.
    double normal();
    double normal(double mean, double sd);
    // Poisson with the given mean. Knuth's method below mean 10, Hormann's
    // PTRS transformed rejection above it.
    long long poisson(double mean);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // Engine state round-trips through a plain text token stream.
    std::string save_state() const;
    void load_state(const std::string& state);

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// Stable 64-bit mix for deriving per-item sub-seeds from a master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

} // namespace ctdn
