#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace ucpd {

// Deterministic RNG with named sub-streams derived from one master seed.
// Sub-streams are independent by construction: the stream key is a
// splitmix64 hash of (master seed, label), so replacing the consumer of one
// stream never perturbs the draws of another.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    int uniform_int(int n);

    // index sampled from a (not necessarily normalized) non-negative weight vector
    int sample_index(const std::vector<double>& weights);

    // point drawn uniformly from the probability simplex of dimension n
    std::vector<double> simplex(int n);

    // +1 or -1 with equal probability
    double rademacher() { return (engine_() & 1u) ? 1.0 : -1.0; }

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// splitmix64 of the master seed combined with an FNV-1a hash of the label
std::uint64_t derive_seed(std::uint64_t master, std::string_view label);

inline Rng derive_stream(std::uint64_t master, std::string_view label) {
    return Rng(derive_seed(master, label));
}

// Stateless per-(t, index) hash to [-1, 1]; used by loss schedules that need
// arbitrary-looking values which are still pure functions of t.
double hash_to_signed_unit(std::uint64_t seed, std::uint64_t t, std::uint64_t index);

}  // namespace ucpd
