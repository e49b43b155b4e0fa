// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: design, response, filter, simulate.
//
// Exit codes: 0 success, 2 config/validation error, 3 numerical failure,
// 4 I/O error.
#pragma once

#include "csg/analysis_bank.hpp"
#include "csg/detector.hpp"
#include "csg/io.hpp"
#include "csg/presets.hpp"
#include "csg/sim_harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace csg::cli {

using io::json;

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3, kIoError = 4 };

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct DesignSection {
    std::optional<Preset> preset;
    std::optional<std::size_t> length;
    std::optional<std::size_t> terms;
    std::size_t derivative = 0;
    double sample_period = 1.0;
    std::optional<NoiseModelSpec> noise;
    PresetOverrides overrides;
    SolveRoute route = SolveRoute::Auto;
};

struct DetectorSection {
    double threshold_db = kDefaultThresholdDb;
    double epsilon = kDefaultEpsilon;
    std::vector<std::size_t> foreground{2};
    std::vector<std::size_t> background_zero{0, 2};
    bool collapse_runs = false;
};

struct ScenarioSection {
    std::vector<ScenarioTag> tags{kAllScenarios.begin(), kAllScenarios.end()};
    std::uint64_t first_seed = 1;
    std::size_t seed_count = 20;
    double amplitude = 10.0;
    bool calibrate = false;
    std::size_t gap = 0;
    bool white_noise_in_colored = false;
    std::vector<Preset> presets{kAllPresets.begin(), kAllPresets.end()};
};

struct Config {
    DesignSection design;
    std::size_t grid = kDefaultResponseGrid;
    DetectorSection detector;
    ScenarioSection scenario;
    std::string out_dir = ".";
    std::string format = "csv";
};

inline SolveRoute parse_route(const std::string& s) {
    if (s == "auto") return SolveRoute::Auto;
    if (s == "weighted-ls") return SolveRoute::WeightedLeastSquares;
    if (s == "bordered-kkt") return SolveRoute::BorderedKkt;
    throw ValidationError("unknown solve route '" + s + "' (expected auto, weighted-ls or bordered-kkt)");
}

inline Config parse_config(const json& doc) {
    using io::check_keys;
    using io::get_optional;
    io::check_keys(doc, {"design", "response", "detector", "scenario", "output"}, "config");
    Config c;
    if (doc.contains("design")) {
        const auto& d = doc.at("design");
        const std::string w = "config.design";
        check_keys(d, {"preset", "M", "L", "d", "sample_period", "noise", "overrides", "route"}, w);
        if (auto p = get_optional<std::string>(d, "preset", w)) c.design.preset = parse_preset(*p);
        if (d.contains("M")) c.design.length = io::get_count(d, "M", w);
        if (d.contains("L")) c.design.terms = io::get_count(d, "L", w);
        if (d.contains("d")) c.design.derivative = io::get_count(d, "d", w);
        c.design.sample_period = get_optional<double>(d, "sample_period", w).value_or(1.0);
        if (d.contains("noise")) c.design.noise = io::noise_from_json(d.at("noise"), w + ".noise");
        if (auto r = get_optional<std::string>(d, "route", w)) c.design.route = parse_route(*r);
        if (d.contains("overrides")) {
            const auto& o = d.at("overrides");
            const std::string ow = w + ".overrides";
            check_keys(o, {"sigma_nb", "frequencies", "omega_c"}, ow);
            c.design.overrides.sigma_nb = get_optional<double>(o, "sigma_nb", ow);
            c.design.overrides.frequencies = get_optional<std::vector<double>>(o, "frequencies", ow);
            c.design.overrides.omega_c = get_optional<double>(o, "omega_c", ow);
        }
    }
    if (doc.contains("response")) {
        const auto& r = doc.at("response");
        check_keys(r, {"grid"}, "config.response");
        if (r.contains("grid")) c.grid = io::get_count(r, "grid", "config.response");
    }
    if (doc.contains("detector")) {
        const auto& d = doc.at("detector");
        const std::string w = "config.detector";
        check_keys(d, {"gamma_db", "epsilon", "foreground", "background_zero", "collapse_runs"}, w);
        c.detector.threshold_db = get_optional<double>(d, "gamma_db", w).value_or(c.detector.threshold_db);
        c.detector.epsilon = get_optional<double>(d, "epsilon", w).value_or(c.detector.epsilon);
        c.detector.foreground = get_optional<std::vector<std::size_t>>(d, "foreground", w).value_or(c.detector.foreground);
        c.detector.background_zero =
            get_optional<std::vector<std::size_t>>(d, "background_zero", w).value_or(c.detector.background_zero);
        c.detector.collapse_runs = get_optional<bool>(d, "collapse_runs", w).value_or(false);
    }
    if (doc.contains("scenario")) {
        const auto& s = doc.at("scenario");
        const std::string w = "config.scenario";
        check_keys(s, {"tags", "first_seed", "seeds", "amplitude", "calibrate", "gap", "white_noise_in_colored",
                       "presets"},
                   w);
        if (auto tags = get_optional<std::vector<std::string>>(s, "tags", w)) {
            c.scenario.tags.clear();
            for (const auto& t : *tags) c.scenario.tags.push_back(parse_scenario(t));
        }
        if (s.contains("first_seed")) c.scenario.first_seed = io::get_count(s, "first_seed", w);
        if (s.contains("seeds")) c.scenario.seed_count = io::get_count(s, "seeds", w);
        c.scenario.amplitude = get_optional<double>(s, "amplitude", w).value_or(c.scenario.amplitude);
        c.scenario.calibrate = get_optional<bool>(s, "calibrate", w).value_or(false);
        if (s.contains("gap")) c.scenario.gap = io::get_count(s, "gap", w);
        c.scenario.white_noise_in_colored = get_optional<bool>(s, "white_noise_in_colored", w).value_or(false);
        if (auto ps = get_optional<std::vector<std::string>>(s, "presets", w)) {
            c.scenario.presets.clear();
            for (const auto& p : *ps) c.scenario.presets.push_back(parse_preset(p));
        }
    }
    if (doc.contains("output")) {
        const auto& o = doc.at("output");
        check_keys(o, {"dir", "format"}, "config.output");
        c.out_dir = get_optional<std::string>(o, "dir", "config.output").value_or(".");
        c.format = get_optional<std::string>(o, "format", "config.output").value_or("csv");
    }
    return c;
}

inline Config load_config(const std::filesystem::path& path) {
    const auto text = io::read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_config(doc);
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline std::string fmt(double v) { return io::format_number(v); }

inline DesignedFilter design_from_config(const Config& c) {
    const auto& d = c.design;
    if (!d.length) throw ValidationError("missing required field 'M' (filter length) in design configuration");
    if (!d.terms) throw ValidationError("missing required field 'L' (number of terms) in design configuration");
    if (d.noise) {
        DesignSpec spec{*d.length, *d.terms, d.derivative, *d.noise};
        return design(spec, d.preset ? std::string(1, to_char(*d.preset)) : "custom", d.route);
    }
    if (!d.preset) throw ValidationError("design needs either a preset (A-F) or an explicit noise model");
    return design_preset(*d.preset, *d.length, *d.terms, d.derivative, d.overrides, d.sample_period, d.route);
}

inline int cmd_design(const Config& c, std::ostream& out) {
    const auto filter = design_from_config(c);
    const auto path = std::filesystem::path(c.out_dir) / ("filter_" + filter.label() + ".json");
    io::save_filter(path, io::to_artifact(filter));
    const auto& diag = filter.diagnostics();
    out << "label=" << filter.label() << " M=" << filter.spec().length << " L=" << filter.spec().terms
        << " d=" << filter.spec().derivative << "\n";
    out << "WNG=" << fmt(diag.white_noise_gain) << "\n";
    out << "omega_delta=" << (diag.first_null ? fmt(*diag.first_null) : std::string("none")) << "\n";
    out << "condition=" << fmt(diag.condition) << " route=" << to_string(diag.route) << "\n";
    out << "wrote " << path.string() << "\n";
    return kOk;
}

/// Rows of (omega, |H|, |H|^2, dB) on the grid.
inline io::CsvTable response_table(const Vector& taps, std::size_t grid) {
    io::CsvTable t;
    t.header = {"omega", "mag", "mag2", "db"};
    for (const auto& p : frequency_response(taps, grid)) {
        const double mag = std::abs(p.value);
        t.rows.push_back({p.omega, mag, mag * mag, magnitude_db(mag)});
    }
    return t;
}

inline int cmd_response(const Config& c, const std::filesystem::path& filter_path, std::ostream& out) {
    const auto a = io::load_filter(filter_path);
    auto table = response_table(a.taps, c.grid);
    table.comments = {"filter=" + a.label, "grid=" + std::to_string(c.grid), "db=20*log10(mag), floor -300"};
    std::filesystem::path path;
    if (c.format == "csv") {
        path = std::filesystem::path(c.out_dir) / ("response_" + a.label + ".csv");
        io::write_file(path, io::to_csv(table));
    } else if (c.format == "json") {
        path = std::filesystem::path(c.out_dir) / ("response_" + a.label + ".json");
        json j;
        j["filter"] = a.label;
        for (std::size_t col = 0; col < table.header.size(); ++col) {
            std::vector<double> v;
            for (const auto& r : table.rows) v.push_back(r[col]);
            j[table.header[col]] = v;
        }
        io::write_file(path, j.dump(2) + "\n");
    } else {
        throw ValidationError("unknown format '" + c.format + "' (expected csv or json)");
    }
    out << "wrote " << table.rows.size() << " rows to " << path.string() << "\n";
    return kOk;
}

/// Taps for derivative order `order` from a filter file's analysis matrix.
inline Vector taps_for_order(const io::FilterArtifact& a, std::size_t order) {
    if (order == a.derivative) return a.taps;
    if (a.analysis.size() == 0) throw ValidationError("filter file has no analysis matrix H to re-derive taps from");
    detail::require(order < a.terms, "derivative order must be below L");
    const Vector h = extract_coefficients(a.analysis, derivative_operator(a.terms, order, a.sample_period),
                                          moment_vector(a.terms));
    return detail::enforce_parity(h, order);
}

inline io::CsvTable filter_table(const io::CsvTable& input, const io::FilterArtifact& a, std::size_t order,
                                 const std::string& source) {
    const auto x_col = input.find("x");
    if (!x_col) throw ValidationError(source + ": input CSV needs a column named 'x'");
    std::vector<double> x = input.column("x");
    for (std::size_t n = 0; n < x.size(); ++n)
        if (!std::isfinite(x[n]))
            throw ValidationError(source + ": missing or non-finite 'x' value in data row " + std::to_string(n + 1));
    const auto taps = taps_for_order(a, order);
    const auto y = convolve(SampleSequence(std::move(x), a.sample_period), taps);

    io::CsvTable out;
    const std::size_t k = y.first_index;
    out.comments = {"filter=" + a.label, "derivative=" + std::to_string(order), "group_delay=" + std::to_string(k),
                    "first_index=" + std::to_string(k),
                    "rows are window centers; y[n] = sum_m h[m] x[n-m], m = -K..K"};
    out.header = input.header;
    out.header.push_back("y");
    for (std::size_t j = 0; j < y.values.size(); ++j) {
        auto row = input.rows[k + j];
        row.push_back(y.values[j]);
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline int cmd_filter(const Config& c, const std::filesystem::path& filter_path,
                      const std::filesystem::path& input_path, std::optional<std::size_t> order, std::ostream& out) {
    const auto a = io::load_filter(filter_path);
    const auto input = io::read_csv(input_path);
    const auto table = filter_table(input, a, order.value_or(a.derivative), input_path.string());
    const auto path = std::filesystem::path(c.out_dir) / ("filtered_" + a.label + ".csv");
    io::write_file(path, io::to_csv(table));
    out << "wrote " << table.rows.size() << " rows to " << path.string() << "\n";
    return kOk;
}

inline io::CsvTable trace_table(const SeedRun& run) {
    const auto& t = run.trace;
    io::CsvTable table;
    table.comments = {"scenario=" + std::string(to_string(t.spec.tag)), "seed=" + std::to_string(run.seed),
                      "amplitude=" + fmt(t.spec.amplitude), "background_phase=" + fmt(t.background_phase)};
    table.header = {"n", "x", "pulses", "dc", "background", "white_noise", "interferers"};
    for (const auto& f : run.filters) {
        const std::string p(1, to_char(f.preset));
        for (const char* col : {"y_", "Z_", "Z_dB_", "detected_"}) table.header.push_back(col + p);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 0; n < t.size(); ++n) {
        std::vector<double> row{static_cast<double>(n), t.composite[n], t.pulses[n],      t.dc[n],
                                t.background[n],        t.white_noise[n], t.interferers[n]};
        for (const auto& f : run.filters) {
            const auto& s = f.report.statistic;
            const bool inside = n >= s.first_index && n <= s.last_index();
            const std::size_t j = inside ? n - s.first_index : 0;
            row.push_back(inside ? f.smoothed.values[j] : nan);
            row.push_back(inside ? s.z[j] : nan);
            row.push_back(inside ? power_db(s.z[j]) : nan);
            row.push_back(inside ? (f.report.detected_at(n) ? 1.0 : 0.0) : nan);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

inline json report_json(const SeedRun& run) {
    json j;
    j["scenario"] = to_string(run.trace.spec.tag);
    j["seed"] = run.seed;
    j["amplitude"] = run.trace.spec.amplitude;
    j["background_phase"] = run.trace.background_phase;
    j["interferer_phases"] = run.trace.interferer_phases;
    json truth = json::array();
    for (const auto& p : run.trace.truth)
        truth.push_back({{"kind", to_string(p.kind)},
                         {"duration", p.duration},
                         {"polarity", p.polarity},
                         {"first", p.extent.first},
                         {"last", p.extent.last}});
    j["pulses"] = truth;
    json filters = json::object();
    for (const auto& f : run.filters) {
        json fj;
        fj["threshold_db"] = f.report.threshold_db;
        fj["events"] = f.report.events;
        fj["peak_snr_db"] = f.report.peak_snr_db;
        fj["pulse_detected"] = f.pulse_detected;
        filters[std::string(1, to_char(f.preset))] = fj;
    }
    j["filters"] = filters;
    return j;
}

inline io::CsvTable table_csv(const PeakSnrTable& t) {
    io::CsvTable csv;
    csv.comments = {"median peak SNR (dB) of the medium quadratic pulse",
                    "scenario rows: 0 low-white, 1 high-white, 2 matched-colored, 3 mismatched-colored"};
    csv.header = {"scenario"};
    for (auto p : t.presets) csv.header.push_back(std::string(1, to_char(p)));
    for (std::size_t r = 0; r < t.scenarios.size(); ++r) {
        std::vector<double> row{static_cast<double>(static_cast<int>(t.scenarios[r]))};
        row.insert(row.end(), t.median_db[r].begin(), t.median_db[r].end());
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

inline json experiment_json(const std::vector<ExperimentResult>& results, double amplitude) {
    json j;
    j["amplitude"] = amplitude;
    json rows = json::array();
    for (const auto& r : results) {
        json row;
        row["scenario"] = to_string(r.config.tag);
        row["seeds"] = r.config.seeds;
        json cols = json::object();
        for (const auto& s : r.summaries) {
            cols[std::string(1, to_char(s.preset))] = {{"median_db", s.median_db},
                                                       {"q25_db", s.q25_db},
                                                       {"q75_db", s.q75_db},
                                                       {"medium_peak_db", s.medium_peak_db},
                                                       {"pulse_detection_rate", s.pulse_detection_rate},
                                                       {"any_detection_rate", s.any_detection_rate}};
        }
        row["filters"] = cols;
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

inline int cmd_simulate(const Config& c, std::ostream& out) {
    const auto& s = c.scenario;
    detail::require(s.seed_count >= 1, "simulate needs at least one seed");
    detail::require(!s.presets.empty(), "simulate needs at least one preset");
    ExperimentConfig base;
    base.presets = s.presets;
    base.length = c.design.length.value_or(17);
    base.terms = c.design.terms.value_or(5);
    base.detector = {c.detector.epsilon, c.detector.threshold_db, c.detector.collapse_runs};
    base.seeds = seed_range(s.first_seed, s.seed_count);
    base.amplitude = s.amplitude;
    base.gap = s.gap;
    base.white_noise_in_colored = s.white_noise_in_colored;

    auto banks = prepare_banks(base.presets, base.length, base.terms);
    const HypothesisMask mask(base.terms, c.detector.foreground, c.detector.background_zero);
    for (auto& b : banks) b.mask = mask;

    if (s.calibrate) {
        const auto cal = calibrate_amplitude(base);
        base.amplitude = cal.amplitude;
        out << "calibrated amplitude=" << fmt(cal.amplitude) << " mV (Filter A low-white median "
            << fmt(cal.median_db) << " dB)\n";
    }

    const std::filesystem::path dir(c.out_dir);
    std::vector<ExperimentResult> results;
    for (auto tag : s.tags) {
        base.tag = tag;
        auto r = run_experiment(base, banks);
        for (const auto& run : r.runs) {
            const std::string stem = std::string(to_string(tag)) + "_seed" + std::to_string(run.seed);
            io::write_file(dir / ("trace_" + stem + ".csv"), io::to_csv(trace_table(run)));
            io::write_file(dir / ("report_" + stem + ".json"), report_json(run).dump(2) + "\n");
        }
        results.push_back(std::move(r));
    }
    const auto table = make_table(results);
    io::write_file(dir / "table.csv", io::to_csv(table_csv(table)));
    io::write_file(dir / "table.json", experiment_json(results, base.amplitude).dump(2) + "\n");

    out << std::left << std::setw(20) << "scenario";
    for (auto p : table.presets) out << std::setw(8) << to_char(p);
    out << "\n";
    for (std::size_t r = 0; r < table.scenarios.size(); ++r) {
        out << std::setw(20) << to_string(table.scenarios[r]);
        for (double v : table.median_db[r]) {
            std::ostringstream cell;
            cell << std::fixed << std::setprecision(1) << v;
            out << std::setw(8) << cell.str();
        }
        out << "\n";
    }
    out << "wrote " << (dir / "table.csv").string() << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

struct Flags {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::string> preset;
    std::optional<std::size_t> length, terms, derivative;
    std::optional<double> gamma_db;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> seeds;
    std::optional<std::string> scenario;
    std::optional<std::size_t> grid;
    std::optional<std::string> format;
    std::string filter;
    std::string input;
    bool calibrate = false;
};

inline void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "JSON configuration file");
    cmd->add_option("--out", f.out, "output directory");
}

inline Config resolve_config(const Flags& f, const std::string& command) {
    Config c = f.config.empty() ? Config{} : load_config(f.config);
    if (f.out) c.out_dir = *f.out;
    if (f.preset) {
        c.design.preset = parse_preset(*f.preset);
        if (command == "simulate") c.scenario.presets = {*c.design.preset};
    }
    if (f.length) c.design.length = *f.length;
    if (f.terms) c.design.terms = *f.terms;
    if (f.derivative) c.design.derivative = *f.derivative;
    if (f.gamma_db) c.detector.threshold_db = *f.gamma_db;
    if (f.seed) c.scenario.first_seed = *f.seed;
    if (f.seeds) c.scenario.seed_count = *f.seeds;
    if (f.scenario) c.scenario.tags = {parse_scenario(*f.scenario)};
    if (f.grid) c.grid = *f.grid;
    if (f.format) c.format = *f.format;
    if (f.calibrate) c.scenario.calibrate = true;
    return c;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Whitened Savitzky-Golay filter design, filtering and pulse-detection experiments"};
    app.require_subcommand(1);
    Flags f;

    auto* design_cmd = app.add_subcommand("design", "design a filter and write its JSON artifact");
    add_common(design_cmd, f);
    design_cmd->add_option("--preset", f.preset, "preset label A-F");
    design_cmd->add_option("--M", f.length, "filter length (odd)");
    design_cmd->add_option("--L", f.terms, "number of monomial terms");
    design_cmd->add_option("--d", f.derivative, "derivative order");

    auto* response_cmd = app.add_subcommand("response", "evaluate the magnitude response of a filter file");
    add_common(response_cmd, f);
    response_cmd->add_option("--filter", f.filter, "filter JSON file")->required();
    response_cmd->add_option("--grid", f.grid, "number of frequencies over [0, pi]");
    response_cmd->add_option("--format", f.format, "csv or json");

    auto* filter_cmd = app.add_subcommand("filter", "apply a filter file to column 'x' of a CSV file");
    add_common(filter_cmd, f);
    filter_cmd->add_option("--filter", f.filter, "filter JSON file")->required();
    filter_cmd->add_option("--input", f.input, "input CSV with column x")->required();
    filter_cmd->add_option("--d", f.derivative, "derivative order (re-derived from H when it differs)");

    auto* sim_cmd = app.add_subcommand("simulate", "run the pulse-detection scenarios");
    add_common(sim_cmd, f);
    sim_cmd->add_option("--preset", f.preset, "restrict to one preset");
    sim_cmd->add_option("--M", f.length, "filter length (odd)");
    sim_cmd->add_option("--L", f.terms, "number of monomial terms");
    sim_cmd->add_option("--gamma-db", f.gamma_db, "detection threshold in dB");
    sim_cmd->add_option("--seed", f.seed, "first seed");
    sim_cmd->add_option("--seeds", f.seeds, "number of seeds");
    sim_cmd->add_option("--scenario", f.scenario, "low-white, high-white, matched-colored or mismatched-colored");
    sim_cmd->add_flag("--calibrate", f.calibrate, "calibrate the pulse amplitude against Filter A");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (design_cmd->parsed()) return cmd_design(resolve_config(f, "design"), out);
        if (response_cmd->parsed()) return cmd_response(resolve_config(f, "response"), f.filter, out);
        if (filter_cmd->parsed()) {
            auto c = resolve_config(f, "filter");
            return cmd_filter(c, f.filter, f.input, f.derivative, out);
        }
        return cmd_simulate(resolve_config(f, "simulate"), out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what();
        if (e.condition() > 0.0) err << " (condition " << fmt(e.condition()) << ")";
        err << "\n";
        return kNumericalError;
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIoError;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return kIoError;
    }
}

} // namespace csg::cli
