#pragma once

#include <cstdint>
#include <random>

namespace sl2ode {

/// Deterministic random draws.  mt19937_64 output is pinned by the standard,
/// and we scale the raw 53-bit mantissa ourselves instead of going through
/// uniform_real_distribution (whose mapping is implementation-defined), so a
/// given seed produces the same sequence on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform draw in [lo, hi).
    double uniform(double lo, double hi) {
        const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    /// Uniform draw in +-[lo, hi), i.e. magnitude in [lo, hi) with random sign.
    double uniform_signed(double lo, double hi) {
        return sign() * uniform(lo, hi);
    }

    double sign() { return (eng_() & 1u) ? 1.0 : -1.0; }

    /// Uniform integer in [0, n).
    int index(int n) { return static_cast<int>(eng_() % static_cast<std::uint64_t>(n)); }

private:
    std::mt19937_64 eng_;
};

} // namespace sl2ode
