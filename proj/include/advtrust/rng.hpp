#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace advtrust {

/// Seeded RNG wrapper. Draws are derived from raw mt19937 output so streams
/// stay reproducible independent of the standard library's distribution
/// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(static_cast<std::uint32_t>(seed ^ (seed >> 32))) {}

    std::uint32_t next_u32() { return eng_(); }

    /// Uniform in [0, 1).
    float uniform() { return static_cast<float>(eng_() * (1.0 / 4294967296.0)); }

    float uniform(float lo, float hi) { return lo + (hi - lo) * uniform(); }

    double uniform_double() { return eng_() * (1.0 / 4294967296.0); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    /// Box-Muller normal draw.
    float normal(float mean = 0.0f, float stddev = 1.0f) {
        if (have_spare_) {
            have_spare_ = false;
            return mean + stddev * spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform_double() - 1.0;
            v = 2.0 * uniform_double() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = static_cast<float>(v * m);
        have_spare_ = true;
        return mean + stddev * static_cast<float>(u * m);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937 eng_;
    bool have_spare_ = false;
    float spare_ = 0.0f;
};

}  // namespace advtrust
