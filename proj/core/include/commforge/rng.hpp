#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace commforge {

inline constexpr double kPi = 3.14159265358979323846;

/// Deterministic 64-bit RNG (splitmix64 core). Distribution helpers are
/// hand-rolled so that streams are bit-reproducible across compilers and
/// standard libraries; every stochastic component owns its own stream.
class Rng {
public:
    Rng() : state_(0x9e3779b97f4a7c15ULL) {}
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {
        next_u64();
    }
    Rng(std::uint64_t seed, std::uint64_t stream) : Rng(seed ^ mix(stream + 0x1234567u)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be > 0.
    int uniform_int(int n) {
        const auto wide = static_cast<unsigned __int128>(next_u64()) *
                          static_cast<unsigned __int128>(static_cast<std::uint64_t>(n));
        return static_cast<int>(wide >> 64);
    }

    /// Standard normal via Box-Muller with a cached spare.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * kPi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Derive an independent child stream; label keeps call sites self-describing.
    Rng split(std::string_view label) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (const char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return Rng(next_u64() ^ h);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace commforge
