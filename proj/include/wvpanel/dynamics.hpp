#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/matrix.hpp"
#include "wvpanel/wigner_continuous.hpp"

namespace wvpanel {

// Generator of a one-dimensional diffusion: a(x) d2/dx2 + b(x) d/dx + c(x).
// a is half the squared volatility, c plays the role of the short rate.
// db_dx and d2c_dx2 may be supplied analytically; otherwise they are
// formed by centered differences of the sampled b and c.
struct DiffusionGenerator {
    std::function<double(double)> a;
    std::function<double(double)> b;
    std::function<double(double)> c;
    std::function<double(double)> db_dx;    // optional
    std::function<double(double)> d2c_dx2;  // optional
};

// Real field W[p, x] on a uniform rectangular grid; rows index p, columns
// index x.
struct WignerField {
    Grid1D x;
    Grid1D p;
    Matrix values;
    double time = 0.0;
};

namespace detail {

struct SampledGenerator {
    std::vector<double> a, dbdx, c, d2c;
};

inline SampledGenerator sample_generator(const DiffusionGenerator& gen, const Grid1D& x) {
    SampledGenerator s;
    const std::size_t nx = x.n;
    const double dx = x.step();
    s.a.resize(nx);
    s.dbdx.resize(nx);
    s.c.resize(nx);
    s.d2c.resize(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        const double xi = x.point(i);
        s.a[i] = gen.a ? gen.a(xi) : 0.0;
        s.c[i] = gen.c ? gen.c(xi) : 0.0;
        if (s.a[i] < 0.0) {
            throw InvalidSpec("diffusion coefficient negative at x = " + std::to_string(xi));
        }
        if (gen.db_dx) {
            s.dbdx[i] = gen.db_dx(xi);
        } else if (gen.b) {
            s.dbdx[i] = (gen.b(xi + dx) - gen.b(xi - dx)) / (2.0 * dx);
        } else {
            s.dbdx[i] = 0.0;
        }
        if (gen.d2c_dx2) {
            s.d2c[i] = gen.d2c_dx2(xi);
        } else if (gen.c) {
            s.d2c[i] = (gen.c(xi + dx) - 2.0 * gen.c(xi) + gen.c(xi - dx)) / (dx * dx);
        } else {
            s.d2c[i] = 0.0;
        }
    }
    return s;
}

inline double stable_dt_limit(const SampledGenerator& s, double dx, double dp) {
    double a_max = 0.0, c2_max = 0.0;
    for (double v : s.a) a_max = std::max(a_max, v);
    for (double v : s.d2c) c2_max = std::max(c2_max, std::abs(v));
    double limit = std::numeric_limits<double>::infinity();
    if (a_max > 0.0) limit = std::min(limit, dx * dx / (2.0 * a_max));
    if (c2_max > 0.0) limit = std::min(limit, dp * dp / c2_max);
    return 0.9 * limit;
}

}  // namespace detail

// Explicit forward-Euler step of
//   dW/dt = a(x) d2W/dx2 - b'(x) dW/dp + c(x) W + (1/2) c''(x) d2W/dp2
// with centered differences and Dirichlet-zero boundaries. Refuses time
// steps beyond 0.9x the explicit stability limit.
inline WignerField evolve(WignerField field, const DiffusionGenerator& gen, double dt,
                          std::size_t n_steps) {
    if (field.values.rows != field.p.n || field.values.cols != field.x.n) {
        throw ShapeMismatch("evolve: field values do not match its grids");
    }
    if (!(dt > 0.0)) throw InvalidSpec("evolve: dt must be > 0");
    const double dx = field.x.step();
    const double dp = field.p.step();
    if (!(dx > 0.0) || !(dp > 0.0)) throw InvalidSpec("evolve: grid spacings must be > 0");

    const auto s = detail::sample_generator(gen, field.x);
    const double dt_max = detail::stable_dt_limit(s, dx, dp);
    if (dt > dt_max) {
        throw UnstableStep("dt = " + std::to_string(dt) + " exceeds the stability limit " +
                           std::to_string(dt_max));
    }
    if (n_steps == 0) return field;

    const std::size_t nx = field.x.n;
    const std::size_t np = field.p.n;
    const double inv_dx2 = 1.0 / (dx * dx);
    const double inv_dp2 = 1.0 / (dp * dp);
    const double inv_2dp = 1.0 / (2.0 * dp);

    Matrix next(np, nx, 0.0);
    Matrix& w = field.values;
    // Dirichlet-zero: the boundary ring is pinned to zero throughout.
    for (std::size_t i = 0; i < np; ++i) {
        w(i, 0) = 0.0;
        w(i, nx - 1) = 0.0;
    }
    for (std::size_t j = 0; j < nx; ++j) {
        w(0, j) = 0.0;
        w(np - 1, j) = 0.0;
    }
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t ip = 1; ip + 1 < np; ++ip) {
            for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
                const double wc = w(ip, ix);
                const double lap_x = (w(ip, ix + 1) - 2.0 * wc + w(ip, ix - 1)) * inv_dx2;
                const double grad_p = (w(ip + 1, ix) - w(ip - 1, ix)) * inv_2dp;
                const double lap_p = (w(ip + 1, ix) - 2.0 * wc + w(ip - 1, ix)) * inv_dp2;
                next(ip, ix) = wc + dt * (s.a[ix] * lap_x - s.dbdx[ix] * grad_p + s.c[ix] * wc +
                                          0.5 * s.d2c[ix] * lap_p);
            }
        }
        std::swap(w.data, next.data);
        field.time += dt;
    }
    return field;
}

// 1-D companion equation for the x-factor when b and c are constant:
// dWbar/dt = a(x) d2Wbar/dx2 + c Wbar, same scheme and boundaries.
inline std::vector<double> evolve_profile(std::vector<double> profile, const Grid1D& x,
                                          const DiffusionGenerator& gen, double dt,
                                          std::size_t n_steps) {
    const auto s = detail::sample_generator(gen, x);
    const double dx = x.step();
    const double dt_max = detail::stable_dt_limit(s, dx, dx);
    if (dt > dt_max) {
        throw UnstableStep("dt = " + std::to_string(dt) + " exceeds the stability limit " +
                           std::to_string(dt_max));
    }
    const std::size_t nx = x.n;
    profile.front() = 0.0;
    profile.back() = 0.0;
    std::vector<double> next(nx, 0.0);
    const double inv_dx2 = 1.0 / (dx * dx);
    for (std::size_t step = 0; step < n_steps; ++step) {
        for (std::size_t ix = 1; ix + 1 < nx; ++ix) {
            const double lap = (profile[ix + 1] - 2.0 * profile[ix] + profile[ix - 1]) * inv_dx2;
            next[ix] = profile[ix] + dt * (s.a[ix] * lap + s.c[ix] * profile[ix]);
        }
        std::swap(profile, next);
    }
    return profile;
}

struct ReductionReport {
    double max_rel_deviation = 0.0;  // 2-D field vs 1-D solution x static p-factor
    double growth_factor_2d = 1.0;   // mass ratio after / before
    double growth_factor_1d = 1.0;
};

// For constant b and c a separable field stays separable and its x-factor
// obeys the 1-D diffusion form. Evolves both and reports the maximum
// deviation relative to the field's peak, plus the mass growth factors.
inline ReductionReport diffusion_reduction_check(const WignerField& field,
                                                 const DiffusionGenerator& gen, double dt,
                                                 std::size_t n_steps) {
    // constant-coefficient precondition
    const double b0 = gen.b ? gen.b(field.x.min) : 0.0;
    const double c0 = gen.c ? gen.c(field.x.min) : 0.0;
    for (std::size_t i = 0; i < field.x.n; ++i) {
        const double xi = field.x.point(i);
        if (gen.b && std::abs(gen.b(xi) - b0) > 1e-12 * (1.0 + std::abs(b0))) {
            throw InvalidSpec("diffusion_reduction_check: b is not constant");
        }
        if (gen.c && std::abs(gen.c(xi) - c0) > 1e-12 * (1.0 + std::abs(c0))) {
            throw InvalidSpec("diffusion_reduction_check: c is not constant");
        }
    }

    // factor the (separable) initial field through its peak row and column
    std::size_t ip_star = 0, ix_star = 0;
    double peak = 0.0;
    for (std::size_t ip = 0; ip < field.p.n; ++ip) {
        for (std::size_t ix = 0; ix < field.x.n; ++ix) {
            if (std::abs(field.values(ip, ix)) > std::abs(peak)) {
                peak = field.values(ip, ix);
                ip_star = ip;
                ix_star = ix;
            }
        }
    }
    if (peak == 0.0) throw InvalidSpec("diffusion_reduction_check: field is identically zero");
    std::vector<double> x_profile(field.x.n);
    std::vector<double> p_factor(field.p.n);
    for (std::size_t ix = 0; ix < field.x.n; ++ix) x_profile[ix] = field.values(ip_star, ix);
    for (std::size_t ip = 0; ip < field.p.n; ++ip) {
        p_factor[ip] = field.values(ip, ix_star) / peak;
    }

    const double mass_before_2d = [&] {
        double m = 0.0;
        for (double v : field.values.data) m += v;
        return m;
    }();
    double mass_before_1d = 0.0;
    for (double v : x_profile) mass_before_1d += v;

    const WignerField evolved = evolve(field, gen, dt, n_steps);
    const auto profile_t = evolve_profile(x_profile, field.x, gen, dt, n_steps);

    double mass_after_2d = 0.0;
    for (double v : evolved.values.data) mass_after_2d += v;
    double mass_after_1d = 0.0;
    for (double v : profile_t) mass_after_1d += v;

    double peak_after = 0.0;
    for (double v : evolved.values.data) peak_after = std::max(peak_after, std::abs(v));
    ReductionReport report;
    for (std::size_t ip = 0; ip < field.p.n; ++ip) {
        for (std::size_t ix = 0; ix < field.x.n; ++ix) {
            const double predicted = p_factor[ip] * profile_t[ix];
            const double dev = std::abs(evolved.values(ip, ix) - predicted);
            if (peak_after > 0.0) {
                report.max_rel_deviation = std::max(report.max_rel_deviation, dev / peak_after);
            }
        }
    }
    if (mass_before_2d != 0.0) report.growth_factor_2d = mass_after_2d / mass_before_2d;
    if (mass_before_1d != 0.0) report.growth_factor_1d = mass_after_1d / mass_before_1d;
    return report;
}

}  // namespace wvpanel
