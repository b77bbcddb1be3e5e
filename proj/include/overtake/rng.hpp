#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

namespace overtake {

// Seeded random source with a fixed bits-to-double mapping so that documented
// seeds reproduce identical streams on every platform (std::*_distribution
// output is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0, 1).
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, one spare value cached between calls.
    double normal(double mean = 0.0, double sd = 1.0) {
        if (spare_) {
            const double z = *spare_;
            spare_.reset();
            return mean + sd * z;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * M_PI * u2;
        spare_ = radius * std::sin(angle);
        return mean + sd * radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace overtake
