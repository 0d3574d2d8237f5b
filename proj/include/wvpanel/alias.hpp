#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/matrix.hpp"

namespace wvpanel {

// Tail events of a real array: elements whose deviation from the array
// mean exceeds threshold_sigmas element-level standard deviations
// (two-tailed). Stored values are the mean-centered deviations, so
// |value| > threshold_sigmas * array_std holds for every entry. Support
// indices are row-major ordered and unique by construction.
struct AliasedMap {
    std::vector<std::pair<std::size_t, std::size_t>> support;
    std::vector<double> values;  // centered deviations at the support
    std::size_t rows = 0;
    std::size_t cols = 0;
    double threshold_sigmas = 0.0;
    double array_std = 0.0;
    double array_mean = 0.0;
};

// Default per-element threshold in units of the array std. 2.03 comes from
// scaling a 36-sigma whole-array criterion down by sqrt(313): two-tailed
// exceedance under a standard normal is about 4.24%, although the figure
// is often loosely quoted as 5.1% (which would correspond to ~1.95 sigma).
constexpr double kDefaultThresholdSigmas = 2.03;

inline AliasedMap threshold_alias(const Matrix& m, double threshold_sigmas = kDefaultThresholdSigmas) {
    if (!(threshold_sigmas > 0.0)) throw InvalidSpec("threshold_sigmas must be > 0");
    if (m.size() == 0) throw ShapeMismatch("threshold_alias: empty matrix");
    double lo = m.data[0], hi = m.data[0];
    for (double v : m.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) throw ZeroVariance("threshold_alias: array is constant");
    AliasedMap out;
    out.rows = m.rows;
    out.cols = m.cols;
    out.threshold_sigmas = threshold_sigmas;
    out.array_mean = matrix_mean(m);
    out.array_std = matrix_std(m);
    if (out.array_std == 0.0) throw ZeroVariance("threshold_alias: zero element std");
    const double cut = threshold_sigmas * out.array_std;
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            const double dev = m(i, j) - out.array_mean;
            if (std::abs(dev) > cut) {
                out.support.emplace_back(i, j);
                out.values.push_back(dev);
            }
        }
    }
    return out;
}

// Dense view: centered deviations on the support, zeros elsewhere.
inline Matrix densify(const AliasedMap& map) {
    Matrix out(map.rows, map.cols, 0.0);
    for (std::size_t s = 0; s < map.support.size(); ++s) {
        out(map.support[s].first, map.support[s].second) = map.values[s];
    }
    return out;
}

namespace detail {

// Half-sample reflection: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
// Folding with period 2n handles kernels wider than the image.
inline std::size_t reflect_index(long i, std::size_t n) {
    const long period = 2 * static_cast<long>(n);
    long j = i % period;
    if (j < 0) j += period;
    if (j >= static_cast<long>(n)) j = period - 1 - j;
    return static_cast<std::size_t>(j);
}

}  // namespace detail

// Convolution with a truncated (+/- 4 sigma) normalized Gaussian kernel,
// separable passes, reflective boundary. Preserves total mass and leaves
// constants unchanged.
inline Matrix gaussian_smooth(const Matrix& dense, double kernel_sigma) {
    if (!(kernel_sigma > 0.0)) throw InvalidSpec("kernel_sigma must be > 0");
    const long radius = static_cast<long>(std::ceil(4.0 * kernel_sigma));
    std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
    double norm = 0.0;
    for (long d = -radius; d <= radius; ++d) {
        const double w = std::exp(-0.5 * static_cast<double>(d * d) / (kernel_sigma * kernel_sigma));
        kernel[static_cast<std::size_t>(d + radius)] = w;
        norm += w;
    }
    for (double& w : kernel) w /= norm;

    Matrix tmp(dense.rows, dense.cols);
    for (std::size_t i = 0; i < dense.rows; ++i) {
        for (std::size_t j = 0; j < dense.cols; ++j) {
            double acc = 0.0;
            for (long d = -radius; d <= radius; ++d) {
                const std::size_t jj = detail::reflect_index(static_cast<long>(j) + d, dense.cols);
                acc += kernel[static_cast<std::size_t>(d + radius)] * dense(i, jj);
            }
            tmp(i, j) = acc;
        }
    }
    Matrix out(dense.rows, dense.cols);
    for (std::size_t i = 0; i < dense.rows; ++i) {
        for (std::size_t j = 0; j < dense.cols; ++j) {
            double acc = 0.0;
            for (long d = -radius; d <= radius; ++d) {
                const std::size_t ii = detail::reflect_index(static_cast<long>(i) + d, dense.rows);
                acc += kernel[static_cast<std::size_t>(d + radius)] * tmp(ii, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

inline Matrix gaussian_smooth(const AliasedMap& map, double kernel_sigma) {
    return gaussian_smooth(densify(map), kernel_sigma);
}

// Grayscale image of an aliased map: |value| mapped linearly to [0, 255],
// zeros off the support.
inline MatrixT<int> densitogram(const AliasedMap& map) {
    MatrixT<int> img(map.rows, map.cols, 0);
    double peak = 0.0;
    for (double v : map.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return img;
    for (std::size_t s = 0; s < map.support.size(); ++s) {
        const double level = std::abs(map.values[s]) / peak * 255.0;
        img(map.support[s].first, map.support[s].second) = static_cast<int>(std::lround(level));
    }
    return img;
}

}  // namespace wvpanel
