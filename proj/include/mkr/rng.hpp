#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mkr {

/// Deterministic random stream used everywhere randomness is needed.
///
/// Generator algorithm (fixed, so that the streams are reproducible and can
/// be matched by other implementations): std::mt19937_64 seeded directly with
/// the 64-bit seed; uniforms take the top 53 bits of one draw
/// (u = (x >> 11) * 2^-53, so u is in [0, 1)); normals use the Box-Muller
/// transform on two such uniforms, returning the pair in order.
/// std::*_distribution is deliberately not used because its output is
/// implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // Box-Muller; guard u1 away from 0 so log() stays finite.
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t next_u64() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace mkr
