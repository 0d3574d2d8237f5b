#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "wvpanel/errors.hpp"

namespace wvpanel {

// Deterministic randomness.
//
// Every random draw in the library flows from a 64-bit master seed through
// SplitMix64-derived stream seeds feeding std::mt19937_64 engines, whose
// output sequence is fixed by the standard. Distribution sampling is
// hand-rolled (polar method for normals, Chambers-Mallows-Stuck for
// symmetric alpha-stable variates) because the standard library
// distributions are implementation-defined and would break cross-platform
// reproducibility.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Independent stream seed from (master, stream index). Streams with
// distinct indices never share draws, and adding a stream leaves existing
// ones untouched, so resizing a panel does not perturb its other columns.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master;
    const std::uint64_t a = splitmix64(s);
    std::uint64_t t = stream ^ 0xD1B54A32D192ED03ULL;
    const std::uint64_t b = splitmix64(t);
    std::uint64_t c = a ^ b;
    return splitmix64(c);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
    return derive_seed(master, fnv1a64(tag));
}

class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on the open interval (0, 1); safe to feed into logs.
    double uniform_open() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // N(0, sigma^2) via the Marsaglia polar method; pairs are cached.
    double normal(double sigma = 1.0) {
        if (has_spare_) {
            has_spare_ = false;
            return spare_ * sigma;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f * sigma;
    }

    // Symmetric alpha-stable variate, Chambers-Mallows-Stuck transform.
    // alpha = 2 reduces to N(0, 2*scale^2), i.e. std = scale*sqrt(2).
    double stable(double alpha, double scale) {
        if (!(alpha > 0.0) || alpha > 2.0) {
            throw InvalidAlpha("stability index must lie in (0, 2], got " + std::to_string(alpha));
        }
        if (scale == 0.0) return 0.0;
        const double pi = 3.14159265358979323846;
        const double v = pi * (uniform_open() - 0.5);  // (-pi/2, pi/2)
        const double w = -std::log(uniform_open());    // Exp(1), strictly positive
        double x;
        if (alpha == 1.0) {
            x = std::tan(v);
        } else {
            x = std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
                std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
        }
        return scale * x;
    }

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace wvpanel
