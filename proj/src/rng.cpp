#include "ucpd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ucpd {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

int Rng::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniform_int: n must be positive");
    // rejection sampling keeps the draw unbiased
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<int>(x % bound);
}

int Rng::sample_index(const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (total <= 0.0) throw std::invalid_argument("Rng::sample_index: non-positive total weight");
    double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
}

std::vector<double> Rng::simplex(int n) {
    // normalized exponentials = flat Dirichlet
    std::vector<double> v(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double u = uniform();
        if (u <= 0.0) u = 0x1.0p-53;
        v[i] = -std::log(u);
        total += v[i];
    }
    for (int i = 0; i < n; ++i) v[i] /= total;
    return v;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
    return splitmix64(master ^ splitmix64(fnv1a(label)));
}

double hash_to_signed_unit(std::uint64_t seed, std::uint64_t t, std::uint64_t index) {
    std::uint64_t h = splitmix64(seed ^ splitmix64(t ^ splitmix64(index + 0x51ed2701)));
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;  // [0,1)
    return 2.0 * u - 1.0;
}

}  // namespace ucpd
