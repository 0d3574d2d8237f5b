// wvpanel command-line driver.
//
// Subcommands wire the library end-to-end: simulate -> detrend ->
// wvf/correlate, plus calibrate (null models), evolve (field dynamics) and
// report (re-emit the fit table). Every run resolves a key=value config
// (CLI flag > config key > default), derives all randomness from the
// single master seed, and writes its artifacts plus a manifest through one
// writer, so reruns with identical config are byte-identical.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wvpanel/alias.hpp"
#include "wvpanel/config.hpp"
#include "wvpanel/correlate.hpp"
#include "wvpanel/detrend.hpp"
#include "wvpanel/dynamics.hpp"
#include "wvpanel/errors.hpp"
#include "wvpanel/fixing.hpp"
#include "wvpanel/io.hpp"
#include "wvpanel/panel.hpp"
#include "wvpanel/wvf.hpp"

namespace {

using nlohmann::json;
using namespace wvpanel;

struct CliOverrides {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_dir;
    std::string seed;
};

KeyValueConfig resolve_config(const CliOverrides& cli) {
    KeyValueConfig cfg;
    if (!cli.config_path.empty()) {
        cfg = KeyValueConfig::parse(read_text_file(cli.config_path));
    }
    for (const auto& kv : cli.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!cli.out_dir.empty()) cfg.set("out_dir", cli.out_dir);
    if (!cli.seed.empty()) cfg.set("seed", cli.seed);
    return cfg;
}

std::set<std::size_t> parse_colluders(const std::string& csv) {
    std::set<std::size_t> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        const std::string tok = csv.substr(pos, comma - pos);
        if (!tok.empty()) {
            std::size_t idx = 0;
            try {
                idx = static_cast<std::size_t>(std::stoull(tok));
            } catch (const std::exception&) {
                throw ConfigError("config key 'synth.colluders': '" + tok + "' is not an index");
            }
            out.insert(idx);
        }
        pos = comma + 1;
    }
    return out;
}

DetectorConfig detector_config(const KeyValueConfig& cfg) {
    DetectorConfig dc;
    const std::string substrate = cfg.get_string("substrate", "wvf_modulus");
    if (substrate == "wvf_modulus") {
        dc.substrate = Substrate::wvf_modulus;
    } else if (substrate == "aliased_covariance") {
        dc.substrate = Substrate::aliased_covariance;
    } else {
        throw ConfigError("config key 'substrate': expected wvf_modulus or aliased_covariance");
    }
    dc.threshold_sigmas = cfg.get_double("threshold_sigmas", kDefaultThresholdSigmas);
    if (!(dc.threshold_sigmas > 0.0)) {
        throw ConfigError("config key 'threshold_sigmas': must be > 0");
    }
    dc.support_union_only = cfg.get_bool("support_union", false);
    return dc;
}

int run_simulate(const KeyValueConfig& cfg) {
    CollusionSpec spec;
    spec.colluders = parse_colluders(cfg.get_string("synth.colluders", ""));
    spec.shared_factor_sigma = cfg.get_double("synth.shared_sigma", 0.0);
    spec.idio_sigma = cfg.get_double("synth.idio_sigma", 0.01);
    spec.ar1_rho = cfg.get_double("synth.ar1_rho", 0.0);
    spec.init_rate = cfg.get_double("synth.init_rate", 0.5);
    const std::uint64_t master = cfg.get_u64("seed", 12345);
    spec.seed = stage_seed(master, "simulate");
    const std::size_t n_entities = cfg.get_size("synth.n_entities", 18);
    const std::size_t n_days = cfg.get_size("synth.n_days", 313);
    const std::string benchmark = cfg.get_string("benchmark", "LIBOR");

    const PanelSeries panel = synthesize_panel(n_entities, n_days, spec, benchmark);

    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    writer.add("panel.csv", to_csv(panel));
    writer.commit("simulate", cfg.hash(), master);
    return 0;
}

int run_detrend(const KeyValueConfig& cfg) {
    const std::string benchmark = cfg.get_string("benchmark", "LIBOR");
    const std::string mode = cfg.get_string("mode", "eq2");
    if (mode != "eq2" && mode != "eq3") {
        throw ConfigError("config key 'mode': expected eq2 or eq3");
    }
    const auto parsed = parse_panel_csv(read_text_file(cfg.require_string("panel")), benchmark);
    PanelSeries panel = parsed.series;

    std::vector<RegressionResult> fits;
    if (mode == "eq2") {
        fits = detrend_benchmark(panel);
    } else {
        const auto cds_paths = cfg.with_prefix("cds.");
        if (cds_paths.empty()) {
            throw ConfigError("config key 'cds.<entity>': eq3 mode needs at least one CDS panel");
        }
        // restrict the panel to the dates every CDS panel covers
        std::map<std::string, CdsPanel> cds;
        for (const auto& [entity, path] : cds_paths) {
            cds[entity] = parse_cds_csv(read_text_file(path), entity).panel;
        }
        for (const auto& [entity, panel_cds] : cds) {
            panel = align(panel, panel_cds).panel;
        }
        std::map<std::string, CreditProxy> proxies;
        for (auto& [entity, panel_cds] : cds) {
            proxies[entity] = fit_credit_proxy(align(panel, panel_cds).cds);
        }
        fits = detrend_with_credit(panel, proxies);
    }

    SeriesTable residuals;
    residuals.dates = panel.dates;
    for (const auto& fit : fits) {
        residuals.labels.push_back(fit.entity);
        residuals.columns.push_back(fit.residuals);
    }

    std::string report = regression_report_csv(fits, panel);
    if (mode == "eq2") {
        // mirror the table's benchmark self-regression row
        RegressionResult self = ols_fit(panel.benchmark(), panel.benchmark());
        self.entity = benchmark;
        report += report_row(benchmark, detail::vector_mean(panel.benchmark()), self);
    }

    json fits_json;
    fits_json["mode"] = mode;
    fits_json["benchmark"] = benchmark;
    fits_json["n_dates"] = panel.n_dates();
    fits_json["fits"] = json::array();
    for (const auto& fit : fits) {
        json f;
        f["entity"] = fit.entity;
        f["mean_rate"] = detail::vector_mean(panel.column(panel.entity_index(fit.entity)));
        f["alpha"] = fit.alpha;
        f["se_alpha"] = fit.se_alpha;
        f["beta"] = fit.beta;
        f["se_beta"] = fit.se_beta;
        if (fit.theta) {
            f["theta"] = *fit.theta;
            f["se_theta"] = *fit.se_theta;
        }
        f["r_squared"] = fit.r_squared;
        fits_json["fits"].push_back(f);
    }

    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    writer.add("residuals.csv", series_table_to_csv(residuals));
    writer.add("report.csv", report);
    writer.add("fits.json", fits_json.dump(2) + "\n");
    writer.commit("detrend", cfg.hash(), cfg.get_u64("seed", 12345));
    return 0;
}

int run_wvf(const KeyValueConfig& cfg) {
    const auto table = series_table_from_csv(read_text_file(cfg.require_string("residuals")));
    const std::string only = cfg.get_string("wvf.entity", "");
    const double threshold = cfg.get_double("threshold_sigmas", kDefaultThresholdSigmas);
    const double smooth_sigma = cfg.get_double("smooth_sigma", 2.0);

    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    bool matched = false;
    for (std::size_t j = 0; j < table.labels.size(); ++j) {
        const std::string& label = table.labels[j];
        if (!only.empty() && label != only) continue;
        matched = true;
        const WvfArray w = auto_wvf(table.columns[j]);
        const Matrix modulus = wvf_modulus(w);
        writer.add("wvf_" + label + "_modulus.csv", matrix_to_csv(modulus));
        writer.add("wvf_" + label + "_real.csv", wvf_real_csv(w));
        writer.add("wvf_" + label + "_imag.csv", wvf_imag_csv(w));
        writer.add("wvf_" + label + "_meta.json", wvf_sidecar_json(w, label));
        const AliasedMap aliased = threshold_alias(modulus, threshold);
        writer.add("aliased_" + label + ".csv", aliased_map_to_csv(aliased));
        writer.add("smoothed_" + label + ".csv",
                   matrix_to_csv(gaussian_smooth(aliased, smooth_sigma)));
        writer.add("densitogram_" + label + ".pgm", pgm_p2(densitogram(aliased)));
    }
    if (!matched) {
        throw DataError("wvf.entity '" + only + "' not present in the residual table");
    }
    writer.commit("wvf", cfg.hash(), cfg.get_u64("seed", 12345));
    return 0;
}

int run_correlate(const KeyValueConfig& cfg) {
    const auto table = series_table_from_csv(read_text_file(cfg.require_string("residuals")));
    const DetectorConfig dc = detector_config(cfg);
    const CorrelationMatrix corr = detector(table.columns, table.labels, dc);

    json summary;
    summary["method"] = corr.method;
    summary["threshold_sigmas"] = corr.threshold_sigmas;
    summary["labels"] = corr.labels;
    summary["values"] = json::array();
    for (std::size_t i = 0; i < corr.values.rows; ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < corr.values.cols; ++k) row.push_back(corr.values(i, k));
        summary["values"].push_back(row);
    }

    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    writer.add("correlation.csv", correlation_table_csv(corr.labels, corr.values));
    writer.add("correlation.json", summary.dump(2) + "\n");
    writer.commit("correlate", cfg.hash(), cfg.get_u64("seed", 12345));
    return 0;
}

int run_calibrate(const KeyValueConfig& cfg) {
    NullModel model;
    const std::string kind = cfg.get_string("null.model", "gaussian");
    if (kind == "gaussian") {
        model.kind = NullModel::gaussian;
    } else if (kind == "levy") {
        model.kind = NullModel::levy;
        model.alpha = cfg.get_double("null.alpha", 1.5);
    } else {
        throw ConfigError("config key 'null.model': expected gaussian or levy");
    }
    const std::uint64_t master = cfg.get_u64("seed", 12345);
    const NullCalibration cal = null_calibration(
        cfg.get_size("null.n_series", 4), cfg.get_size("null.n_days", 313), model,
        cfg.get_size("null.trials", 100), stage_seed(master, "calibrate"), detector_config(cfg));

    json summary;
    summary["model"] = kind;
    if (model.kind == NullModel::levy) summary["alpha"] = model.alpha;
    summary["n_series"] = cal.n_series;
    summary["n_days"] = cal.n_days;
    summary["trials"] = cal.trials;
    summary["abs_rho"] = {{"median", cal.median_abs_rho}, {"q25", cal.q25_abs_rho},
                          {"q75", cal.q75_abs_rho},       {"p95", cal.p95_abs_rho},
                          {"p99", cal.p99_abs_rho}};

    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    writer.add("calibration.json", summary.dump(2) + "\n");
    writer.commit("calibrate", cfg.hash(), master);
    return 0;
}

int run_evolve(const KeyValueConfig& cfg) {
    WignerField field;
    field.x = {cfg.get_double("evolve.x_min", -5.0), cfg.get_double("evolve.x_max", 5.0),
               cfg.get_size("evolve.nx", 129)};
    field.p = {cfg.get_double("evolve.p_min", -5.0), cfg.get_double("evolve.p_max", 5.0),
               cfg.get_size("evolve.np", 65)};
    const double sigma_x = cfg.get_double("evolve.sigma_x", 0.5);
    const double sigma_p = cfg.get_double("evolve.sigma_p", 0.5);
    field.values = Matrix(field.p.n, field.x.n);
    for (std::size_t ip = 0; ip < field.p.n; ++ip) {
        for (std::size_t ix = 0; ix < field.x.n; ++ix) {
            const double x = field.x.point(ix);
            const double p = field.p.point(ip);
            field.values(ip, ix) = std::exp(-0.5 * x * x / (sigma_x * sigma_x)) *
                                   std::exp(-0.5 * p * p / (sigma_p * sigma_p));
        }
    }

    const double a0 = cfg.get_double("evolve.a", 0.1);
    const double b0 = cfg.get_double("evolve.b", 0.0);
    const double c0 = cfg.get_double("evolve.c", 0.0);
    DiffusionGenerator gen;
    gen.a = [a0](double) { return a0; };
    gen.b = [b0](double) { return b0; };
    gen.c = [c0](double) { return c0; };
    gen.db_dx = [](double) { return 0.0; };
    gen.d2c_dx2 = [](double) { return 0.0; };

    const auto sampled = detail::sample_generator(gen, field.x);
    const double dt_auto = 0.5 * detail::stable_dt_limit(sampled, field.x.step(), field.p.step());
    const double dt = cfg.get_double("evolve.dt", dt_auto);
    const std::size_t steps = cfg.get_size("evolve.steps", 100);

    double mass_before = 0.0;
    for (double v : field.values.data) mass_before += v;
    const WignerField final_field = evolve(field, gen, dt, steps);
    double mass_after = 0.0;
    for (double v : final_field.values.data) mass_after += v;

    json summary;
    summary["a"] = a0;
    summary["b"] = b0;
    summary["c"] = c0;
    summary["dt"] = dt;
    summary["steps"] = steps;
    summary["time"] = final_field.time;
    summary["mass_before"] = mass_before;
    summary["mass_after"] = mass_after;

    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    writer.add("field_final.csv", matrix_to_csv(final_field.values));
    writer.add("field_final.pgm", pgm_p2(grayscale(final_field.values)));
    writer.add("evolve.json", summary.dump(2) + "\n");
    writer.commit("evolve", cfg.hash(), cfg.get_u64("seed", 12345));
    return 0;
}

int run_report(const KeyValueConfig& cfg) {
    const json fits_json = json::parse(read_text_file(cfg.require_string("fits")));
    std::string report = report_header();
    for (const auto& f : fits_json.at("fits")) {
        RegressionResult r;
        r.alpha = f.at("alpha").get<double>();
        r.se_alpha = f.at("se_alpha").get<double>();
        r.beta = f.at("beta").get<double>();
        r.se_beta = f.at("se_beta").get<double>();
        if (f.contains("theta")) {
            r.theta = f.at("theta").get<double>();
            r.se_theta = f.at("se_theta").get<double>();
        }
        r.r_squared = f.at("r_squared").get<double>();
        report += report_row(f.at("entity").get<std::string>(), f.at("mean_rate").get<double>(), r);
    }
    ArtifactWriter writer(cfg.get_string("out_dir", "out"));
    writer.add("report.csv", report);
    writer.commit("report", cfg.hash(), cfg.get_u64("seed", 12345));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coordinated-structure detector for benchmark-rate panels"};
    app.require_subcommand(1);

    CliOverrides cli;
    std::string subcommand;
    for (const char* name : {"simulate", "detrend", "wvf", "correlate", "calibrate", "evolve",
                             "report"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", cli.config_path, "key=value config file");
        sub->add_option("--set", cli.sets, "override a config key (key=value, repeatable)");
        sub->add_option("--out", cli.out_dir, "output directory (overrides out_dir)");
        sub->add_option("--seed", cli.seed, "master seed (overrides seed)");
        sub->callback([&subcommand, name] { subcommand = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1, help exits 0
    }

    try {
        const KeyValueConfig cfg = resolve_config(cli);
        if (subcommand == "simulate") return run_simulate(cfg);
        if (subcommand == "detrend") return run_detrend(cfg);
        if (subcommand == "wvf") return run_wvf(cfg);
        if (subcommand == "correlate") return run_correlate(cfg);
        if (subcommand == "calibrate") return run_calibrate(cfg);
        if (subcommand == "evolve") return run_evolve(cfg);
        if (subcommand == "report") return run_report(cfg);
        std::cerr << "error: unknown subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
