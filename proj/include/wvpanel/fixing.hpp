#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/panel.hpp"
#include "wvpanel/rng.hpp"

namespace wvpanel {

// Parameters of a synthetic submission panel. Colluding entities receive a
// common daily shock on top of their idiosyncratic one; with an empty
// colluder set the panel is the honest null. The generative model is this
// library's own construction for calibrating the detector; it is not
// fitted to market data.
struct CollusionSpec {
    std::set<std::size_t> colluders;
    double shared_factor_sigma = 0.0;  // daily std of the common shock, percent
    double idio_sigma = 0.0;           // std of per-entity shock innovations, percent
    double ar1_rho = 0.0;              // persistence of idiosyncratic shocks, [0, 1)
    std::uint64_t seed = 0;
    double init_rate = 0.5;            // starting fix level, percent
};

// Trimmed-mean fixing: sort, drop the four lowest and four highest quotes,
// average the rest unweighted.
inline double trimmed_mean_fix(std::vector<double> quotes) {
    if (quotes.size() < 9) {
        throw TooFewQuotes("need at least 9 quotes to trim 4 from each side, got " +
                           std::to_string(quotes.size()));
    }
    std::sort(quotes.begin(), quotes.end());
    double sum = 0.0;
    for (std::size_t i = 4; i + 4 < quotes.size(); ++i) sum += quotes[i];
    return sum / static_cast<double>(quotes.size() - 8);
}

// Random walk: cumulative sum of iid N(0, sigma^2) steps. The seed feeds
// the stream engine directly.
inline std::vector<double> gaussian_walk(std::size_t n, double sigma, std::uint64_t seed) {
    if (n < 1) throw InvalidSpec("gaussian_walk: n must be >= 1");
    if (sigma < 0.0) throw InvalidSpec("gaussian_walk: sigma must be >= 0");
    RandomStream stream(seed);
    std::vector<double> out(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += stream.normal(sigma);
        out[i] = acc;
    }
    return out;
}

// iid symmetric alpha-stable increments (Chambers-Mallows-Stuck).
// alpha = 2 gives Gaussians with std = scale*sqrt(2).
inline std::vector<double> levy_increments(std::size_t n, double alpha, double scale,
                                           std::uint64_t seed) {
    if (!(alpha > 0.0) || alpha > 2.0) {
        throw InvalidAlpha("stability index must lie in (0, 2], got " + std::to_string(alpha));
    }
    RandomStream stream(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = stream.stable(alpha, scale);
    return out;
}

namespace detail {

inline void validate(const CollusionSpec& spec, std::size_t n_entities, std::size_t n_days) {
    if (n_entities < 9) throw InvalidSpec("synthesize_panel: need at least 9 entities");
    if (n_days < 2) throw InvalidSpec("synthesize_panel: need at least 2 days");
    if (spec.shared_factor_sigma < 0.0) throw InvalidSpec("shared_factor_sigma must be >= 0");
    if (spec.idio_sigma < 0.0) throw InvalidSpec("idio_sigma must be >= 0");
    if (spec.ar1_rho < 0.0 || spec.ar1_rho >= 1.0) throw InvalidSpec("ar1_rho must lie in [0, 1)");
    for (std::size_t c : spec.colluders) {
        if (c >= n_entities) {
            throw InvalidSpec("colluder index " + std::to_string(c) + " out of range");
        }
    }
}

}  // namespace detail

// Day-by-day synthetic panel. Each entity quotes the previous day's fix
// plus an AR(1) idiosyncratic shock, colluders add the day's shared shock,
// and the day's fix is the trimmed mean of the quotes. The benchmark
// column holds the fixes. Entity i draws from its own derived substream,
// so changing the entity count never perturbs other entities' draws.
inline PanelSeries synthesize_panel(std::size_t n_entities, std::size_t n_days,
                                    const CollusionSpec& spec,
                                    std::string_view benchmark_label = "LIBOR") {
    detail::validate(spec, n_entities, n_days);

    std::vector<RandomStream> streams;
    streams.reserve(n_entities);
    for (std::size_t i = 0; i < n_entities; ++i) {
        streams.emplace_back(derive_seed(spec.seed, static_cast<std::uint64_t>(i)));
    }
    RandomStream shared_stream(derive_seed(spec.seed, "shared-factor"));

    PanelSeries panel;
    panel.benchmark_label = std::string(benchmark_label);
    panel.entities.reserve(n_entities + 1);
    for (std::size_t i = 0; i < n_entities; ++i) {
        char label[16];
        std::snprintf(label, sizeof label, "bank%02zu", i + 1);
        panel.entities.push_back({label, ""});
    }
    panel.entities.push_back({panel.benchmark_label, ""});
    panel.values = Matrix(n_days, n_entities + 1);
    panel.dates.reserve(n_days);

    const long day0 = detail::days_from_civil(2011, 4, 18);
    std::vector<double> shock(n_entities, 0.0);
    std::vector<double> quotes(n_entities);
    double fix_prev = spec.init_rate;
    for (std::size_t t = 0; t < n_days; ++t) {
        panel.dates.push_back(detail::civil_from_days(day0 + static_cast<long>(t)));
        const double shared = shared_stream.normal(spec.shared_factor_sigma);
        for (std::size_t i = 0; i < n_entities; ++i) {
            shock[i] = spec.ar1_rho * shock[i] + streams[i].normal(spec.idio_sigma);
            quotes[i] = fix_prev + shock[i];
            if (spec.colluders.count(i)) quotes[i] += shared;
            panel.values(t, i) = quotes[i];
        }
        const double fix = trimmed_mean_fix(quotes);
        panel.values(t, n_entities) = fix;
        fix_prev = fix;
    }
    return panel;
}

}  // namespace wvpanel
