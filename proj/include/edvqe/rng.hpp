#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace edvqe {

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the C++
/// standard. The distribution transforms are implemented here instead of
/// using <random> distributions, which are implementation-defined, so a
/// given seed produces the same graphs, parameters and samples everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform on [lo, hi]; returns lo when lo == hi.
    double uniform(double lo, double hi);

    /// Unbiased integer in [0, n). n must be positive.
    std::size_t below(std::size_t n);

    /// Integer uniform on [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via the polar Box-Muller method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// Derives an independent child seed from (seed, stream) with splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace edvqe
