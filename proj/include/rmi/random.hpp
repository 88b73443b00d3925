#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace rmi {

/**
 * Seeded pseudo-random source used by every generator and workload in this library.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++ standard. The
 * standard distributions are implementation-defined, so the derived draws are computed here:
 *  - uniform01(): top 53 bits of one engine output scaled by 2^-53, in [0, 1)
 *  - below(m):    Lemire's multiply-shift with rejection, unbiased in [0, m)
 *  - normal():    Box-Muller on two uniform01() draws, both outputs used in order
 *
 * Identical seeds therefore give bit-identical keys on every conforming platform. Do not change
 * any of these definitions: stored fixtures depend on them.
 */
class Rng
{
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;

    public:
    explicit Rng(std::uint64_t seed) : engine_(seed) { }

    std::uint64_t next() { return engine_(); }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, m); m must be non-zero.
    std::uint64_t below(std::uint64_t m) {
        auto product = static_cast<unsigned __int128>(engine_()) * m;
        auto low = static_cast<std::uint64_t>(product);
        if (low < m) {
            const std::uint64_t threshold = -m % m;
            while (low < threshold) {
                product = static_cast<unsigned __int128>(engine_()) * m;
                low = static_cast<std::uint64_t>(product);
            }
        }
        return static_cast<std::uint64_t>(product >> 64);
    }

    /// Standard normal draw.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_normal_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_normal_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }
};

} // namespace rmi
