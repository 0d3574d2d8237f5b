#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/matrix.hpp"

namespace wvpanel {

// Continuous-variable Wigner transforms on rectangular (q, p) grids.
//
// The transform convention is
//     W(q, p) = integral f(q + u/2) * f(q - u/2) * exp(-i*p*u) du
// evaluated by trapezoid quadrature on uniform grids. Fields are stored
// with p as the row index and q as the column index.

struct Grid1D {
    double min = 0.0;
    double max = 0.0;
    std::size_t n = 0;

    double step() const { return (max - min) / static_cast<double>(n - 1); }
    double point(std::size_t i) const { return min + step() * static_cast<double>(i); }
};

struct PhaseGrid {
    Grid1D q;
    Grid1D p;
};

// Orthonormal Hermite-mode expansion of a sampled distribution. The basis
// U_n(q) = sqrt(alpha) * phi_n(alpha*q) with phi_n the orthonormal Hermite
// functions, so integral U_n U_m dq = delta_{nm}.
struct HermiteExpansion {
    double alpha = 1.0;
    std::vector<double> coefficients;  // c_n, n = 0..n_max
    Grid1D grid;
    double reconstruction_l2_error = 0.0;
};

namespace detail {

// phi_n(xi) for n = 0..n_max by the stable three-term recurrence:
// phi_0 = pi^(-1/4) exp(-xi^2/2), phi_{n+1} = xi*sqrt(2/(n+1))*phi_n
//         - sqrt(n/(n+1))*phi_{n-1}.
inline void hermite_functions(double xi, std::size_t n_max, std::vector<double>& out) {
    out.resize(n_max + 1);
    const double pi_quarter = 0.75112554446494248286;  // pi^(-1/4)
    out[0] = pi_quarter * std::exp(-0.5 * xi * xi);
    if (n_max == 0) return;
    out[1] = std::sqrt(2.0) * xi * out[0];
    for (std::size_t k = 1; k < n_max; ++k) {
        const double kk = static_cast<double>(k);
        out[k + 1] = xi * std::sqrt(2.0 / (kk + 1.0)) * out[k] -
                     std::sqrt(kk / (kk + 1.0)) * out[k - 1];
    }
}

// Laguerre polynomials L_n(z) for n = 0..n_max.
inline void laguerre(double z, std::size_t n_max, std::vector<double>& out) {
    out.resize(n_max + 1);
    out[0] = 1.0;
    if (n_max == 0) return;
    out[1] = 1.0 - z;
    for (std::size_t k = 1; k < n_max; ++k) {
        const double kk = static_cast<double>(k);
        out[k + 1] = ((2.0 * kk + 1.0 - z) * out[k] - kk * out[k - 1]) / (kk + 1.0);
    }
}

inline double trapezoid_weight(std::size_t i, std::size_t n) {
    return (i == 0 || i + 1 == n) ? 0.5 : 1.0;
}

}  // namespace detail

inline double hermite_mode(std::size_t n, double alpha, double q) {
    std::vector<double> phi;
    detail::hermite_functions(alpha * q, n, phi);
    return std::sqrt(alpha) * phi[n];
}

struct GaussianWignerResult {
    Matrix quadrature;   // [p row x q col]
    Matrix closed_form;  // C * exp(-(q^2/sigma^2 + sigma^2 p^2)), C = 2*sigma*sqrt(pi)
};

// Wigner transform of f(q) = exp(-q^2 / (2 sigma^2)), both by honest
// quadrature of the defining integral and by the closed form. The widths
// scale as sigma/sqrt(2) in q and 1/(sigma*sqrt(2)) in p; the grid must
// resolve the narrower of the two (>= 6 points per sigma in each axis).
inline GaussianWignerResult gaussian_wigner_closed_form(double sigma, const PhaseGrid& grid) {
    if (!(sigma > 0.0)) throw InvalidSpec("gaussian_wigner_closed_form: sigma must be > 0");
    if (grid.q.n < 2 || grid.p.n < 2) throw GridTooCoarse("phase grid needs at least 2x2 points");
    if (grid.q.step() > sigma / 6.0) {
        throw GridTooCoarse("q spacing " + std::to_string(grid.q.step()) +
                            " exceeds sigma/6; the Gaussian is under-resolved");
    }
    if (grid.p.step() > 1.0 / (6.0 * sigma)) {
        throw GridTooCoarse("p spacing " + std::to_string(grid.p.step()) +
                            " exceeds 1/(6*sigma); the Gaussian is under-resolved");
    }
    const double pi = 3.14159265358979323846;
    const double p_abs_max = std::max(std::abs(grid.p.min), std::abs(grid.p.max));
    // Truncation at |u| = 12*sigma leaves a relative tail below 1e-15; the
    // step keeps the periodized alias of the u-Gaussian negligible out to
    // the largest requested |p|.
    const double u_half = 12.0 * sigma;
    const double du_limit = 2.0 * pi / (p_abs_max + 14.0 / sigma);
    const double du_target = std::min(sigma / 8.0, du_limit);
    const std::size_t nu = static_cast<std::size_t>(std::ceil(2.0 * u_half / du_target)) + 1;
    const double du = 2.0 * u_half / static_cast<double>(nu - 1);

    auto f = [sigma](double q) { return std::exp(-q * q / (2.0 * sigma * sigma)); };

    GaussianWignerResult out;
    out.quadrature = Matrix(grid.p.n, grid.q.n);
    out.closed_form = Matrix(grid.p.n, grid.q.n);
    std::vector<double> u_nodes(nu), weights(nu);
    for (std::size_t j = 0; j < nu; ++j) {
        u_nodes[j] = -u_half + du * static_cast<double>(j);
        weights[j] = du * detail::trapezoid_weight(j, nu);
    }
    for (std::size_t iq = 0; iq < grid.q.n; ++iq) {
        const double q = grid.q.point(iq);
        std::vector<double> g(nu);
        for (std::size_t j = 0; j < nu; ++j) {
            g[j] = weights[j] * f(q + 0.5 * u_nodes[j]) * f(q - 0.5 * u_nodes[j]);
        }
        for (std::size_t ip = 0; ip < grid.p.n; ++ip) {
            const double p = grid.p.point(ip);
            // the imaginary part vanishes by symmetry; integrate the cosine
            double acc = 0.0;
            for (std::size_t j = 0; j < nu; ++j) acc += g[j] * std::cos(p * u_nodes[j]);
            out.quadrature(ip, iq) = acc;
            out.closed_form(ip, iq) =
                2.0 * sigma * std::sqrt(pi) *
                std::exp(-(q * q / (sigma * sigma) + sigma * sigma * p * p));
        }
    }
    return out;
}

// Expansion coefficients c_n = integral f(q) U_n(q) dq by trapezoid
// quadrature, plus the L2 reconstruction error on the same grid.
inline HermiteExpansion hermite_expand(const std::vector<double>& f, const Grid1D& grid,
                                       double alpha, std::size_t n_max) {
    if (!(alpha > 0.0)) throw InvalidSpec("hermite_expand: alpha must be > 0");
    if (f.size() != grid.n) throw LengthMismatch("hermite_expand: samples do not match grid");
    if (grid.n < 2) throw GridTooCoarse("hermite_expand: need at least 2 grid points");
    const double dq = grid.step();
    // The highest mode oscillates with local wavenumber ~ alpha*sqrt(2n+1);
    // require several points per oscillation.
    if (dq * alpha * std::sqrt(2.0 * static_cast<double>(n_max) + 1.0) > 0.5) {
        throw GridTooCoarse("grid spacing too coarse for mode " + std::to_string(n_max));
    }

    HermiteExpansion e;
    e.alpha = alpha;
    e.grid = grid;
    e.coefficients.assign(n_max + 1, 0.0);
    const double sqrt_alpha = std::sqrt(alpha);
    std::vector<double> phi;
    std::vector<std::vector<double>> modes(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        detail::hermite_functions(alpha * grid.point(i), n_max, phi);
        modes[i] = phi;
        const double w = dq * detail::trapezoid_weight(i, grid.n);
        for (std::size_t nmode = 0; nmode <= n_max; ++nmode) {
            e.coefficients[nmode] += w * f[i] * sqrt_alpha * phi[nmode];
        }
    }
    double err2 = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
        double rec = 0.0;
        for (std::size_t nmode = 0; nmode <= n_max; ++nmode) {
            rec += e.coefficients[nmode] * sqrt_alpha * modes[i][nmode];
        }
        const double d = f[i] - rec;
        err2 += dq * detail::trapezoid_weight(i, grid.n) * d * d;
    }
    e.reconstruction_l2_error = std::sqrt(err2);
    return e;
}

// Wigner field of an expansion: W(q, p) = sum_n |c_n|^2 V_n(q, p) with
//     V_n = 2 * (-1)^n * L_n(2*rho) * exp(-rho),  rho = alpha^2 q^2 + p^2/alpha^2.
// The n = 0 term reproduces gaussian_wigner_closed_form for a width-1/alpha
// Gaussian. (The L_n here are Laguerre polynomials; the quadrature oracle
// in the test suite validates this form directly.)
inline Matrix wigner_from_expansion(const HermiteExpansion& e, const PhaseGrid& grid) {
    const std::size_t n_max = e.coefficients.size() - 1;
    Matrix out(grid.p.n, grid.q.n);
    std::vector<double> lag;
    for (std::size_t ip = 0; ip < grid.p.n; ++ip) {
        const double p = grid.p.point(ip);
        for (std::size_t iq = 0; iq < grid.q.n; ++iq) {
            const double q = grid.q.point(iq);
            const double rho = e.alpha * e.alpha * q * q + p * p / (e.alpha * e.alpha);
            detail::laguerre(2.0 * rho, n_max, lag);
            const double damp = std::exp(-rho);
            double acc = 0.0;
            double sign = 1.0;
            for (std::size_t nmode = 0; nmode <= n_max; ++nmode) {
                acc += e.coefficients[nmode] * e.coefficients[nmode] * sign * lag[nmode];
                sign = -sign;
            }
            out(ip, iq) = 2.0 * acc * damp;
        }
    }
    return out;
}

}  // namespace wvpanel
