#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace glmf {

// splitmix64 step; advances the state and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

// Stable seed derivation: hashes a path of indices under a master seed so
// any unit of work (grid cell, fold, replicate) is reproducible in isolation.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

// Deterministic random source. The engine is std::mt19937_64 (bit-exact by
// the standard); all distributions are implemented here rather than with
// std::*_distribution, whose streams are implementation-defined.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Box-Muller draw; consumes exactly two uniforms.
    double normal(double mean = 0.0, double sd = 1.0);

    // Uniform integer on [lo, hi], inclusive, rejection sampled.
    long uniform_int(long lo, long hi);

    // Sum of n Bernoulli(p) draws.
    long binomial(long n, double p);

    // Fisher-Yates permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

    std::mt19937_64& engine() { return eng_; }

  private:
    std::mt19937_64 eng_;
};

}  // namespace glmf
