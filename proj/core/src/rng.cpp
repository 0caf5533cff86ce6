#include "glmf/rng.hpp"

#include <cmath>
#include <limits>

namespace glmf {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t state = master;
    std::uint64_t out = splitmix64(state);
    for (std::uint64_t p : path) {
        state = out ^ (p * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
        out = splitmix64(state);
    }
    return out;
}

double Rng::normal(double mean, double sd) {
    const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * M_PI * u2);
}

long Rng::uniform_int(long lo, long hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1ULL;
    if (span == 0) return lo + static_cast<long>(eng_());  // full 64-bit span
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do {
        v = eng_();
    } while (v >= limit);
    return lo + static_cast<long>(v % span);
}

long Rng::binomial(long n, double p) {
    long k = 0;
    for (long i = 0; i < n; ++i)
        if (uniform() < p) ++k;
    return k;
}

std::vector<std::size_t> Rng::permutation(std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<long>(i) - 1));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

}  // namespace glmf
