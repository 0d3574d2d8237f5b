#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "wvpanel/alias.hpp"
#include "wvpanel/errors.hpp"
#include "wvpanel/fixing.hpp"
#include "wvpanel/matrix.hpp"
#include "wvpanel/wvf.hpp"

namespace wvpanel {

// Which per-entity array the detector correlates: the modulus of each
// entity's auto time-frequency array (default), or the raw bilinear lag
// array.
enum class Substrate {
    wvf_modulus,
    aliased_covariance,
};

inline const char* substrate_name(Substrate s) {
    return s == Substrate::wvf_modulus ? "wvf_modulus" : "aliased_covariance";
}

struct DetectorConfig {
    Substrate substrate = Substrate::wvf_modulus;
    double threshold_sigmas = kDefaultThresholdSigmas;
    // Correlate only over the union of the two supports instead of all
    // elements (sensitivity analysis).
    bool support_union_only = false;
};

// Symmetric pairwise correlations of the entities' aliased arrays.
struct CorrelationMatrix {
    std::vector<std::string> labels;
    Matrix values;  // unit diagonal, entries in [-1, 1]
    std::string method;
    double threshold_sigmas = kDefaultThresholdSigmas;
};

// Pearson correlation over all flattened elements.
inline double array_correlation(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) {
        throw ShapeMismatch("array_correlation: " + std::to_string(a.rows) + "x" +
                            std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                            std::to_string(b.cols));
    }
    const double ma = matrix_mean(a);
    const double mb = matrix_mean(b);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a.data[i] - ma;
        const double db = b.data[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw ZeroVariance("array_correlation: constant array");
    const double rho = sab / std::sqrt(saa * sbb);
    return std::min(1.0, std::max(-1.0, rho));
}

namespace detail {

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(a.size());
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma;
        const double db = b[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa == 0.0 || sbb == 0.0) throw ZeroVariance("support-union correlation: constant values");
    return std::min(1.0, std::max(-1.0, sab / std::sqrt(saa * sbb)));
}

inline Matrix detector_substrate(const std::vector<double>& residual, Substrate substrate) {
    if (substrate == Substrate::wvf_modulus) return wvf_modulus(auto_wvf(residual));
    return lag_covariance(residual, residual).values;
}

}  // namespace detail

// The pipeline behind the pairwise table: per entity, build the substrate
// array of its residual series, alias it at the configured threshold, and
// Pearson-correlate the densified arrays for every pair.
inline CorrelationMatrix detector(const std::vector<std::vector<double>>& residuals,
                                  const std::vector<std::string>& labels,
                                  const DetectorConfig& config = {}) {
    const std::size_t m = residuals.size();
    if (m < 2) throw InvalidSpec("detector: need at least 2 residual series");
    if (labels.size() != m) throw InvalidSpec("detector: labels do not match series count");
    for (const auto& r : residuals) {
        if (r.size() != residuals[0].size()) {
            throw LengthMismatch("detector: residual series lengths differ");
        }
    }

    std::vector<AliasedMap> maps;
    std::vector<Matrix> dense;
    maps.reserve(m);
    dense.reserve(m);
    for (const auto& r : residuals) {
        maps.push_back(threshold_alias(detail::detector_substrate(r, config.substrate),
                                       config.threshold_sigmas));
        dense.push_back(densify(maps.back()));
    }

    CorrelationMatrix out;
    out.labels = labels;
    out.method = substrate_name(config.substrate);
    out.threshold_sigmas = config.threshold_sigmas;
    out.values = Matrix(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i) out.values(i, i) = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t k = i + 1; k < m; ++k) {
            double rho;
            if (config.support_union_only) {
                std::set<std::pair<std::size_t, std::size_t>> cells(maps[i].support.begin(),
                                                                    maps[i].support.end());
                cells.insert(maps[k].support.begin(), maps[k].support.end());
                std::vector<double> vi, vk;
                vi.reserve(cells.size());
                vk.reserve(cells.size());
                for (const auto& [r, c] : cells) {
                    vi.push_back(dense[i](r, c));
                    vk.push_back(dense[k](r, c));
                }
                if (vi.size() < 2) throw ZeroVariance("support-union correlation: empty union");
                rho = detail::pearson(vi, vk);
            } else {
                rho = array_correlation(dense[i], dense[k]);
            }
            out.values(i, k) = rho;
            out.values(k, i) = rho;
        }
    }
    return out;
}

struct NullModel {
    enum Kind { gaussian, levy } kind = gaussian;
    double alpha = 2.0;  // stability index, levy only
};

// Quantiles of |rho| across all trials and pairs of independent null
// panels.
struct NullCalibration {
    double median_abs_rho = 0.0;
    double q25_abs_rho = 0.0;
    double q75_abs_rho = 0.0;
    double p95_abs_rho = 0.0;
    double p99_abs_rho = 0.0;
    std::size_t trials = 0;
    std::size_t n_series = 0;
    std::size_t n_days = 0;
    std::vector<double> samples;  // sorted |rho| pool
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw InvalidSpec("quantile of empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace detail

// Runs the detector on panels of independent null walks. Both models
// produce random walks; the levy walk uses stable increments with scale
// 1/sqrt(2) so that alpha = 2 coincides in distribution with the unit
// Gaussian walk. Per-trial, per-series seeds are derived from the master
// seed, so the trial count is reproducible regardless of scheduling.
inline NullCalibration null_calibration(std::size_t n_series, std::size_t n_days, NullModel model,
                                        std::size_t trials, std::uint64_t seed,
                                        const DetectorConfig& config = {}) {
    if (trials < 1) throw InvalidSpec("null_calibration: trials must be >= 1");
    if (n_series < 2) throw InvalidSpec("null_calibration: need at least 2 series");
    NullCalibration out;
    out.trials = trials;
    out.n_series = n_series;
    out.n_days = n_days;
    std::vector<std::string> labels(n_series);
    for (std::size_t s = 0; s < n_series; ++s) labels[s] = "s" + std::to_string(s);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(trial));
        std::vector<std::vector<double>> series(n_series);
        for (std::size_t s = 0; s < n_series; ++s) {
            const std::uint64_t s_seed = derive_seed(trial_seed, static_cast<std::uint64_t>(s));
            if (model.kind == NullModel::gaussian) {
                series[s] = gaussian_walk(n_days, 1.0, s_seed);
            } else {
                const auto steps = levy_increments(n_days, model.alpha, 1.0 / std::sqrt(2.0), s_seed);
                series[s].resize(n_days);
                double acc = 0.0;
                for (std::size_t i = 0; i < n_days; ++i) {
                    acc += steps[i];
                    series[s][i] = acc;
                }
            }
        }
        const CorrelationMatrix corr = detector(series, labels, config);
        for (std::size_t i = 0; i < n_series; ++i) {
            for (std::size_t k = i + 1; k < n_series; ++k) {
                out.samples.push_back(std::abs(corr.values(i, k)));
            }
        }
    }
    std::sort(out.samples.begin(), out.samples.end());
    out.median_abs_rho = detail::quantile_sorted(out.samples, 0.5);
    out.q25_abs_rho = detail::quantile_sorted(out.samples, 0.25);
    out.q75_abs_rho = detail::quantile_sorted(out.samples, 0.75);
    out.p95_abs_rho = detail::quantile_sorted(out.samples, 0.95);
    out.p99_abs_rho = detail::quantile_sorted(out.samples, 0.99);
    return out;
}

}  // namespace wvpanel
