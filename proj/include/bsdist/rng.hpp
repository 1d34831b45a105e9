#pragma once

#include <cstdint>
#include <random>

#include "bsdist/math.hpp"

namespace bsdist {

// Seeded generator with platform-stable output. mt19937_64 is bit-reproducible
// by the standard; variates are derived from it without going through the
// implementation-defined <random> distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Uniform on (0,1); never returns an exact 0 or 1.
    double uniform() {
        const std::uint64_t u = engine_() >> 11;  // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    double normal() { return norm_quantile(uniform()); }

    double chisq1() {
        const double z = normal();
        return z * z;
    }

    // Splits off an independent stream; used to hand workers their own seeds.
    std::uint64_t derive_seed() { return engine_() ^ 0x9e3779b97f4a7c15ull; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace bsdist
