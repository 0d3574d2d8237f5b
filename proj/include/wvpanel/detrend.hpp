#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/panel.hpp"

namespace wvpanel {

// Outcome of an intercept OLS fit of one entity's quotes on the benchmark
// (and optionally on a fitted credit proxy). Rates in percent, so alpha and
// the residuals are in percent; beta is dimensionless; theta carries the
// mixed percent-per-basis-point units of the proxy regressor, which enters
// in bp with no rescaling.
struct RegressionResult {
    std::string entity;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> theta;
    double se_alpha = 0.0;
    double se_beta = 0.0;
    std::optional<double> se_theta;
    double r_squared = 0.0;
    std::vector<double> residuals;
};

// Daily credit-quality proxy: CDS spread (bp) fitted on the national short
// rate (percent). The fitted series is reused as a regressor.
struct CreditProxy {
    std::string entity;
    double alpha_credit = 0.0;  // bp
    double beta_credit = 0.0;   // bp per percent
    std::vector<double> fitted;
    std::vector<double> residuals;
};

namespace detail {

inline double vector_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations. Only used
// on the tiny normal-equation matrices (2x2, 3x3).
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
        }
        if (off < 1e-300) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
    return eig;
}

// 2-norm condition number of the design matrix, computed as
// sqrt(cond(X'X)). Near-singular designs (> 1e12) are rejected.
inline double design_condition(const std::vector<std::vector<double>>& xtx) {
    const auto eig = symmetric_eigenvalues(xtx);
    double lo = eig[0], hi = eig[0];
    for (double e : eig) {
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (lo <= 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(hi / lo);
}

constexpr double kConditionLimit = 1e12;

}  // namespace detail

// Single-regressor OLS with intercept: y = alpha + beta*x + e, solved by
// the centered normal equations. Standard errors use the unbiased
// homoskedastic residual-variance estimator.
inline RegressionResult ols_fit(const std::vector<double>& y, const std::vector<double>& x) {
    const std::size_t n = y.size();
    if (x.size() != n) {
        throw LengthMismatch("ols_fit: y has " + std::to_string(n) + " points, x has " +
                             std::to_string(x.size()));
    }
    if (n < 3) throw InvalidSpec("ols_fit: need at least 3 observations for one regressor");

    double sx = 0.0, sxx = 0.0;
    for (double v : x) {
        sx += v;
        sxx += v * v;
    }
    const double nn = static_cast<double>(n);
    const double cond = detail::design_condition({{nn, sx}, {sx, sxx}});
    if (!(cond <= detail::kConditionLimit)) throw SingularDesign(cond);

    const double x_mean = detail::vector_mean(x);
    const double y_mean = detail::vector_mean(y);
    double sxx_c = 0.0, sxy_c = 0.0, tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - x_mean;
        const double dy = y[i] - y_mean;
        sxx_c += dx * dx;
        sxy_c += dx * dy;
        tss += dy * dy;
    }

    RegressionResult r;
    r.beta = sxy_c / sxx_c;
    r.alpha = y_mean - r.beta * x_mean;
    r.residuals.resize(n);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.residuals[i] = y[i] - r.alpha - r.beta * x[i];
        rss += r.residuals[i] * r.residuals[i];
    }
    const double s2 = rss / static_cast<double>(n - 2);
    r.se_beta = std::sqrt(s2 / sxx_c);
    r.se_alpha = std::sqrt(s2 * (1.0 / nn + x_mean * x_mean / sxx_c));
    r.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    r.r_squared = std::min(1.0, std::max(0.0, r.r_squared));
    return r;
}

// Two-regressor OLS with intercept: y = alpha + b1*x1 + b2*x2 + e.
inline RegressionResult ols_fit(const std::vector<double>& y, const std::vector<double>& x1,
                                const std::vector<double>& x2) {
    const std::size_t n = y.size();
    if (x1.size() != n || x2.size() != n) {
        throw LengthMismatch("ols_fit: regressor length differs from y");
    }
    if (n < 4) throw InvalidSpec("ols_fit: need at least 4 observations for two regressors");

    double s1 = 0.0, s2 = 0.0, s11 = 0.0, s22 = 0.0, s12 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s1 += x1[i];
        s2 += x2[i];
        s11 += x1[i] * x1[i];
        s22 += x2[i] * x2[i];
        s12 += x1[i] * x2[i];
    }
    const double nn = static_cast<double>(n);
    const double cond =
        detail::design_condition({{nn, s1, s2}, {s1, s11, s12}, {s2, s12, s22}});
    if (!(cond <= detail::kConditionLimit)) throw SingularDesign(cond);

    const double m1 = detail::vector_mean(x1);
    const double m2 = detail::vector_mean(x2);
    const double my = detail::vector_mean(y);
    double c11 = 0.0, c22 = 0.0, c12 = 0.0, g1 = 0.0, g2 = 0.0, tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d1 = x1[i] - m1;
        const double d2 = x2[i] - m2;
        const double dy = y[i] - my;
        c11 += d1 * d1;
        c22 += d2 * d2;
        c12 += d1 * d2;
        g1 += d1 * dy;
        g2 += d2 * dy;
        tss += dy * dy;
    }
    const double det = c11 * c22 - c12 * c12;

    RegressionResult r;
    r.beta = (c22 * g1 - c12 * g2) / det;
    const double theta = (c11 * g2 - c12 * g1) / det;
    r.theta = theta;
    r.alpha = my - r.beta * m1 - theta * m2;
    r.residuals.resize(n);
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.residuals[i] = y[i] - r.alpha - r.beta * x1[i] - theta * x2[i];
        rss += r.residuals[i] * r.residuals[i];
    }
    const double sigma2 = rss / static_cast<double>(n - 3);
    r.se_beta = std::sqrt(sigma2 * c22 / det);
    r.se_theta = std::sqrt(sigma2 * c11 / det);
    r.se_alpha = std::sqrt(
        sigma2 * (1.0 / nn + (c22 * m1 * m1 - 2.0 * c12 * m1 * m2 + c11 * m2 * m2) / det));
    r.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;
    r.r_squared = std::min(1.0, std::max(0.0, r.r_squared));
    return r;
}

// Detrend every non-benchmark entity against the benchmark column.
// Results keep the panel's column order.
inline std::vector<RegressionResult> detrend_benchmark(const PanelSeries& panel) {
    const std::size_t bench = panel.benchmark_index();
    const auto x = panel.column(bench);
    std::vector<RegressionResult> results;
    results.reserve(panel.n_entities() - 1);
    for (std::size_t j = 0; j < panel.n_entities(); ++j) {
        if (j == bench) continue;
        RegressionResult r = ols_fit(panel.column(j), x);
        r.entity = panel.entities[j].label;
        results.push_back(std::move(r));
    }
    return results;
}

// Fit the credit proxy: spread (bp) on the national short rate (percent).
// The fitted series is recomputed from the coefficients so that
// fitted[t] = alpha_credit + beta_credit * short_rate[t] holds exactly.
inline CreditProxy fit_credit_proxy(const CdsPanel& cds) {
    const RegressionResult r = ols_fit(cds.cds_spread_bp, cds.short_rate_pct);
    CreditProxy proxy;
    proxy.entity = cds.entity;
    proxy.alpha_credit = r.alpha;
    proxy.beta_credit = r.beta;
    proxy.fitted.resize(cds.dates.size());
    proxy.residuals.resize(cds.dates.size());
    for (std::size_t i = 0; i < cds.dates.size(); ++i) {
        proxy.fitted[i] = proxy.alpha_credit + proxy.beta_credit * cds.short_rate_pct[i];
        proxy.residuals[i] = cds.cds_spread_bp[i] - proxy.fitted[i];
    }
    return proxy;
}

// Two-regressor detrending with the fitted credit proxy as control. Only
// entities with a proxy are fit, in panel column order. The proxy enters
// in basis points while rates are in percent; no rescaling is applied, so
// theta is directly comparable across entities.
inline std::vector<RegressionResult> detrend_with_credit(
    const PanelSeries& panel, const std::map<std::string, CreditProxy>& proxies) {
    const std::size_t bench = panel.benchmark_index();
    const auto x = panel.column(bench);
    std::vector<RegressionResult> results;
    for (std::size_t j = 0; j < panel.n_entities(); ++j) {
        if (j == bench) continue;
        const auto it = proxies.find(panel.entities[j].label);
        if (it == proxies.end()) continue;
        const CreditProxy& proxy = it->second;
        if (proxy.fitted.size() != panel.n_dates()) {
            throw LengthMismatch("credit proxy for '" + panel.entities[j].label +
                                 "' is not aligned to the panel dates");
        }
        RegressionResult r = ols_fit(panel.column(j), x, proxy.fitted);
        r.entity = panel.entities[j].label;
        results.push_back(std::move(r));
    }
    return results;
}

// Extensive-statistics report. Columns are fixed:
// entity,mean_rate,alpha,se_alpha,beta,se_beta,theta,se_theta,r_squared
// with the theta columns left empty for single-regressor fits.
inline std::string report_header() {
    return "entity,mean_rate,alpha,se_alpha,beta,se_beta,theta,se_theta,r_squared\n";
}

inline std::string report_row(const std::string& entity, double mean_rate,
                              const RegressionResult& r) {
    std::string out = entity;
    out += ',';
    out += detail::format_double(mean_rate);
    out += ',';
    out += detail::format_double(r.alpha);
    out += ',';
    out += detail::format_double(r.se_alpha);
    out += ',';
    out += detail::format_double(r.beta);
    out += ',';
    out += detail::format_double(r.se_beta);
    out += ',';
    if (r.theta) out += detail::format_double(*r.theta);
    out += ',';
    if (r.se_theta) out += detail::format_double(*r.se_theta);
    out += ',';
    out += detail::format_double(r.r_squared);
    out += '\n';
    return out;
}

inline std::string regression_report_csv(const std::vector<RegressionResult>& results,
                                         const PanelSeries& panel) {
    std::string out = report_header();
    for (const auto& r : results) {
        const auto col = panel.column(panel.entity_index(r.entity));
        out += report_row(r.entity, detail::vector_mean(col), r);
    }
    return out;
}

}  // namespace wvpanel
