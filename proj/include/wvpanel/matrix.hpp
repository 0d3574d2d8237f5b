#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "wvpanel/errors.hpp"

namespace wvpanel {

// Dense row-major matrix with value semantics.
template <typename T>
struct MatrixT {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> data;  // row-major, rows*cols elements

    MatrixT() = default;
    MatrixT(std::size_t r, std::size_t c, T fill = T{}) : rows(r), cols(c), data(r * c, fill) {}

    T& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::size_t size() const { return data.size(); }
    bool same_shape(const MatrixT& other) const { return rows == other.rows && cols == other.cols; }
};

using Matrix = MatrixT<double>;
using CMatrix = MatrixT<std::complex<double>>;

inline double matrix_mean(const Matrix& m) {
    if (m.size() == 0) throw ShapeMismatch("mean of empty matrix");
    double sum = 0.0;
    for (double v : m.data) sum += v;
    return sum / static_cast<double>(m.size());
}

// Population standard deviation (divide by element count, mean subtracted).
inline double matrix_std(const Matrix& m) {
    const double mean = matrix_mean(m);
    double ss = 0.0;
    for (double v : m.data) {
        const double d = v - mean;
        ss += d * d;
    }
    return std::sqrt(ss / static_cast<double>(m.size()));
}

inline double max_abs(const Matrix& m) {
    double best = 0.0;
    for (double v : m.data) best = std::max(best, std::abs(v));
    return best;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) throw ShapeMismatch("max_abs_diff: shapes differ");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a.data[i] - b.data[i]));
    return best;
}

}  // namespace wvpanel
