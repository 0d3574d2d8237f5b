#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/matrix.hpp"

namespace wvpanel {

// Discrete bilinear time-frequency transforms.
//
// Conventions (fixed once, every oracle test pins them):
//  * Even-lag discretization: the bilinear product at center time n and
//    half-lag k is x[n-k] * conj(y[n+k]), so the true lag tau = 2k and the
//    half-sample shifts of the continuous definition stay integral.
//  * Zero padding outside [0, N-1]: products involving out-of-range samples
//    vanish, giving each row the valid half-lag window K_n = min(n, N-1-n).
//  * Transform sign exp(-i*2*pi*m*k/N): frequency bins m = 0..N-1 map to
//    [0, 2*pi) over the half-lag index k. A sampled tone exp(i*w0*n) with
//    w0 = 2*pi*m0/N therefore peaks in bin (-2*m0) mod N; the factor 2 is
//    the even-lag discretization doubling frequencies.
//  * No marginal rescaling: summing a row over frequency bins yields
//    N * |x[n]|^2 and summing a column over time yields the even-lag
//    periodogram (lag sums then transform); the N factors are carried, not
//    divided out.

// Bilinear lag-product array: values[t][j] = x[t-k] * y[t+k] with
// k = j - max_half_lag, zero-padded outside the sample. The expectation
// over t of the continuous definition is left to the caller: the raw array
// feeds the transforms, and time_averaged_correlogram gives the averaged
// reading.
struct LagCovariance {
    Matrix values;  // [center time t x half-lag column]
    std::size_t n = 0;
    int max_half_lag = 0;  // K; columns cover k = -K..K
    std::string normalization = "raw_product_zero_padded";
};

// Complex time-frequency array, N x N. Metadata records the fixed
// conventions above.
struct WvfArray {
    CMatrix values;  // [time n x frequency bin m]
    std::size_t n = 0;
    static constexpr const char* lag_convention = "even_lag_zero_padded";
    static constexpr const char* transform_sign = "exp(-i*2*pi*m*k/N)";
};

inline LagCovariance lag_covariance(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw LengthMismatch("lag_covariance: series lengths differ");
    if (n < 2) throw LengthMismatch("lag_covariance: need at least 2 samples");
    const int k_max = static_cast<int>((n - 1) / 2);
    LagCovariance out;
    out.n = n;
    out.max_half_lag = k_max;
    out.values = Matrix(n, static_cast<std::size_t>(2 * k_max + 1));
    for (std::size_t t = 0; t < n; ++t) {
        const int tt = static_cast<int>(t);
        const int reach = std::min(tt, static_cast<int>(n) - 1 - tt);
        const int lo = -std::min(reach, k_max);
        const int hi = std::min(reach, k_max);
        for (int k = lo; k <= hi; ++k) {
            out.values(t, static_cast<std::size_t>(k + k_max)) =
                x[static_cast<std::size_t>(tt - k)] * y[static_cast<std::size_t>(tt + k)];
        }
    }
    return out;
}

// Mean over center times per half-lag (zero-padded products included),
// the time-averaged reading of the lag array.
inline std::vector<double> time_averaged_correlogram(const LagCovariance& c) {
    std::vector<double> out(c.values.cols, 0.0);
    for (std::size_t t = 0; t < c.values.rows; ++t) {
        for (std::size_t j = 0; j < c.values.cols; ++j) out[j] += c.values(t, j);
    }
    for (double& v : out) v /= static_cast<double>(c.values.rows);
    return out;
}

namespace detail {

inline void twiddle_tables(std::size_t n, std::vector<double>& cos_t, std::vector<double>& sin_t) {
    cos_t.resize(n);
    sin_t.resize(n);
    const double step = -2.0 * 3.14159265358979323846 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double angle = step * static_cast<double>(j);
        cos_t[j] = std::cos(angle);
        sin_t[j] = std::sin(angle);
    }
}

// Generic bilinear transform between two complex series.
inline WvfArray wvf_bilinear(const std::vector<std::complex<double>>& x,
                             const std::vector<std::complex<double>>& y) {
    const std::size_t n = x.size();
    if (y.size() != n) throw LengthMismatch("cross_wvf: series lengths differ");
    if (n < 2) throw LengthMismatch("wvf: need at least 2 samples");
    std::vector<double> cos_t, sin_t;
    twiddle_tables(n, cos_t, sin_t);

    WvfArray out;
    out.n = n;
    out.values = CMatrix(n, n);
    const int ni = static_cast<int>(n);
    std::vector<std::complex<double>> prod(n);
    for (int t = 0; t < ni; ++t) {
        const int reach = std::min(t, ni - 1 - t);
        for (int k = -reach; k <= reach; ++k) {
            prod[static_cast<std::size_t>(k + reach)] =
                x[static_cast<std::size_t>(t - k)] * std::conj(y[static_cast<std::size_t>(t + k)]);
        }
        for (int m = 0; m < ni; ++m) {
            // twiddle index advances by m per unit k; start at k = -reach
            int idx = static_cast<int>((static_cast<long long>(m) * (ni - reach % ni)) % ni);
            double re = 0.0, im = 0.0;
            for (int k = -reach; k <= reach; ++k) {
                const std::complex<double>& p = prod[static_cast<std::size_t>(k + reach)];
                const double c = cos_t[static_cast<std::size_t>(idx)];
                const double s = sin_t[static_cast<std::size_t>(idx)];
                re += p.real() * c - p.imag() * s;
                im += p.real() * s + p.imag() * c;
                idx += m;
                if (idx >= ni) idx -= ni;
            }
            out.values(static_cast<std::size_t>(t), static_cast<std::size_t>(m)) = {re, im};
        }
    }
    return out;
}

}  // namespace detail

// Auto-transform of a real series; the even-lag product row is symmetric
// in k, so each row is a pure cosine sum and the result is real.
inline WvfArray auto_wvf(const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n < 2) throw LengthMismatch("auto_wvf: need at least 2 samples");
    std::vector<double> cos_t, sin_t;
    detail::twiddle_tables(n, cos_t, sin_t);

    WvfArray out;
    out.n = n;
    out.values = CMatrix(n, n);
    const int ni = static_cast<int>(n);
    std::vector<double> prod(n / 2 + 1);
    for (int t = 0; t < ni; ++t) {
        const int reach = std::min(t, ni - 1 - t);
        for (int k = 0; k <= reach; ++k) {
            prod[static_cast<std::size_t>(k)] =
                x[static_cast<std::size_t>(t - k)] * x[static_cast<std::size_t>(t + k)];
        }
        for (int m = 0; m < ni; ++m) {
            double acc = prod[0];
            int idx = 0;
            for (int k = 1; k <= reach; ++k) {
                idx += m;
                if (idx >= ni) idx -= ni;
                acc += 2.0 * prod[static_cast<std::size_t>(k)] * cos_t[static_cast<std::size_t>(idx)];
            }
            out.values(static_cast<std::size_t>(t), static_cast<std::size_t>(m)) = acc;
        }
    }
    return out;
}

inline WvfArray auto_wvf(const std::vector<std::complex<double>>& x) {
    return detail::wvf_bilinear(x, x);
}

inline WvfArray cross_wvf(const std::vector<std::complex<double>>& x,
                          const std::vector<std::complex<double>>& y) {
    return detail::wvf_bilinear(x, y);
}

inline WvfArray cross_wvf(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::complex<double>> cx(x.begin(), x.end());
    std::vector<std::complex<double>> cy(y.begin(), y.end());
    return detail::wvf_bilinear(cx, cy);
}

// All unordered pairs of a residual panel. Only the upper triangle
// (i <= k) is computed; the mirror element is the complex conjugate by
// construction.
class MatrixWvf {
public:
    explicit MatrixWvf(const std::vector<std::vector<double>>& series) : m_(series.size()) {
        if (m_ < 2) throw InvalidSpec("matrix_wvf: need at least 2 series");
        for (const auto& s : series) {
            if (s.size() != series[0].size()) {
                throw LengthMismatch("matrix_wvf: series lengths differ");
            }
        }
        cells_.reserve(m_ * (m_ + 1) / 2);
        for (std::size_t i = 0; i < m_; ++i) {
            for (std::size_t k = i; k < m_; ++k) {
                if (i == k) {
                    cells_.push_back(auto_wvf(series[i]));
                } else {
                    cells_.push_back(cross_wvf(series[i], series[k]));
                }
            }
        }
    }

    std::size_t size() const { return m_; }

    // i <= k required.
    const WvfArray& upper(std::size_t i, std::size_t k) const { return cells_[pack(i, k)]; }

    // Any (i, k); the lower triangle is conjugated on access.
    WvfArray get(std::size_t i, std::size_t k) const {
        if (i <= k) return cells_[pack(i, k)];
        WvfArray w = cells_[pack(k, i)];
        for (auto& v : w.values.data) v = std::conj(v);
        return w;
    }

private:
    std::size_t pack(std::size_t i, std::size_t k) const {
        // row-major upper triangle offset
        return i * m_ - i * (i + 1) / 2 + k;
    }

    std::size_t m_;
    std::vector<WvfArray> cells_;
};

inline MatrixWvf matrix_wvf(const std::vector<std::vector<double>>& residuals) {
    return MatrixWvf(residuals);
}

// Row sums over frequency bins; equals N * |x[n]|^2 for an auto-transform.
inline std::vector<double> time_marginal(const WvfArray& w) {
    std::vector<double> out(w.n, 0.0);
    for (std::size_t t = 0; t < w.n; ++t) {
        double acc = 0.0;
        for (std::size_t m = 0; m < w.n; ++m) acc += w.values(t, m).real();
        out[t] = acc;
    }
    return out;
}

// Column sums over center times; equals the even-lag periodogram for an
// auto-transform.
inline std::vector<double> freq_marginal(const WvfArray& w) {
    std::vector<double> out(w.n, 0.0);
    for (std::size_t t = 0; t < w.n; ++t) {
        for (std::size_t m = 0; m < w.n; ++m) out[m] += w.values(t, m).real();
    }
    return out;
}

inline Matrix wvf_modulus(const WvfArray& w) {
    Matrix out(w.values.rows, w.values.cols);
    for (std::size_t i = 0; i < w.values.size(); ++i) out.data[i] = std::abs(w.values.data[i]);
    return out;
}

}  // namespace wvpanel
