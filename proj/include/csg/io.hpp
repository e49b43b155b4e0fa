// SPDX-License-Identifier: Apache-2.0
//
// File formats: CSV tables, the JSON filter artifact, and the JSON
// noise-model schema. Numbers are written in shortest round-trip form.
#pragma once

#include "csg/error.hpp"
#include "csg/filter_design.hpp"
#include "csg/noise_models.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace csg::io {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Numbers and files
// ---------------------------------------------------------------------------

/// Shortest decimal form that parses back to the same double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_number(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
    return ss.str();
}

/// Writes through a sibling temporary file and renames it into place, so a
/// failed write never leaves a partial output.
inline void write_file(const std::filesystem::path& path, std::string_view content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw IoError("error while writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw IoError("cannot move output into place at '" + path.string() + "'");
    }
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Comma separated, one header row, '#'-prefixed comment lines, LF line
/// endings. Empty cells read as NaN.
struct CsvTable {
    std::vector<std::string> comments; ///< without the leading '#'
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    }

    std::vector<double> column(std::string_view name) const {
        const auto idx = find(name);
        if (!idx) throw ValidationError("CSV has no column named '" + std::string(name) + "'");
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[*idx]);
        return out;
    }
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cells;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace detail

inline CsvTable parse_csv(std::string_view text, std::string_view source = "<csv>") {
    CsvTable t;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const auto line = detail::trim(text.substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            t.comments.emplace_back(detail::trim(line.substr(1)));
            continue;
        }
        const auto cells = detail::split_commas(line);
        if (!have_header) {
            for (auto c : cells) t.header.emplace_back(detail::trim(c));
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ValidationError(std::string(source) + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(t.header.size()) + " fields, found " + std::to_string(cells.size()));
        std::vector<double> row;
        row.reserve(cells.size());
        for (auto c : cells) {
            const auto cell = detail::trim(c);
            if (cell.empty()) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                continue;
            }
            const auto v = parse_number(cell);
            if (!v)
                throw ValidationError(std::string(source) + ":" + std::to_string(line_no) + ": malformed number '" +
                                      std::string(cell) + "'");
            row.push_back(*v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw ValidationError(std::string(source) + ": missing CSV header row");
    return t;
}

inline CsvTable read_csv(const std::filesystem::path& path) { return parse_csv(read_file(path), path.string()); }

/// NaN cells are written empty.
inline std::string to_csv(const CsvTable& t) {
    std::string out;
    for (const auto& c : t.comments) out += "# " + c + "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += ',';
            if (!std::isnan(r[i])) out += format_number(r[i]);
        }
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON helpers
// ---------------------------------------------------------------------------

/// Rejects keys outside `allowed`; `where` names the object in messages.
inline void check_keys(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw ValidationError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_required(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ValidationError("missing required field '" + key + "' in " + where);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("field '" + key + "' in " + where + " has the wrong type");
    }
}

template <class T>
std::optional<T> get_optional(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return get_required<T>(j, key, where);
}

inline std::size_t get_count(const json& j, const std::string& key, const std::string& where) {
    const auto v = get_required<json>(j, key, where);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw ValidationError("field '" + key + "' in " + where + " must be a non-negative integer");
    return v.get<std::size_t>();
}

// ---------------------------------------------------------------------------
// Noise model schema
// ---------------------------------------------------------------------------

inline json to_json(const NoiseModelSpec& spec) {
    json j;
    j["model"] = model_name(spec);
    j["sample_period"] = spec.sample_period;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, noise::DiagonalGaussianKernel> ||
                          std::is_same_v<T, noise::GaussMarkovLowPass>) {
                j["lambda_n"] = m.lambda_n;
            } else if constexpr (std::is_same_v<T, noise::NyquistFirstOrder>) {
                j["sigma_nb"] = m.sigma_nb;
            } else if constexpr (std::is_same_v<T, noise::NarrowBand>) {
                j["poles"] = json::array();
                for (const auto& p : m.poles) j["poles"].push_back({{"sigma_nb", p.sigma_nb}, {"omega", p.omega}});
            } else if constexpr (std::is_same_v<T, noise::WideBand>) {
                j["omega_c"] = m.omega_c;
                j["omega_d"] = m.omega_d;
            }
        },
        spec.model);
    return j;
}

inline NoiseModelSpec noise_from_json(const json& j, const std::string& where = "noise") {
    if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
    const auto model = get_required<std::string>(j, "model", where);
    NoiseModelSpec spec;
    spec.sample_period = get_optional<double>(j, "sample_period", where).value_or(1.0);
    if (model == "white") {
        check_keys(j, {"model", "sample_period"}, where);
        spec.model = noise::White{};
    } else if (model == "gaussian_kernel") {
        check_keys(j, {"model", "sample_period", "lambda_n"}, where);
        spec.model = noise::DiagonalGaussianKernel{get_required<double>(j, "lambda_n", where)};
    } else if (model == "gauss_markov") {
        check_keys(j, {"model", "sample_period", "lambda_n"}, where);
        spec.model = noise::GaussMarkovLowPass{get_required<double>(j, "lambda_n", where)};
    } else if (model == "nyquist") {
        check_keys(j, {"model", "sample_period", "sigma_nb"}, where);
        spec.model = noise::NyquistFirstOrder{get_required<double>(j, "sigma_nb", where)};
    } else if (model == "narrow_band") {
        check_keys(j, {"model", "sample_period", "poles"}, where);
        noise::NarrowBand nb;
        const auto poles = get_required<json>(j, "poles", where);
        if (!poles.is_array()) throw ValidationError("field 'poles' in " + where + " must be an array");
        for (const auto& p : poles) {
            check_keys(p, {"sigma_nb", "omega"}, where + ".poles[]");
            nb.poles.push_back({get_required<double>(p, "sigma_nb", where + ".poles[]"),
                                get_required<double>(p, "omega", where + ".poles[]")});
        }
        spec.model = std::move(nb);
    } else if (model == "wide_band") {
        check_keys(j, {"model", "sample_period", "omega_c", "omega_d"}, where);
        spec.model = noise::WideBand{get_required<double>(j, "omega_c", where),
                                     get_optional<double>(j, "omega_d", where).value_or(std::numbers::pi)};
    } else {
        throw ValidationError("unknown noise model '" + model + "' in " + where);
    }
    validate(spec);
    return spec;
}

// ---------------------------------------------------------------------------
// Filter artifact
// ---------------------------------------------------------------------------

/// What a filter file carries; enough to filter, run the bank, or
/// re-derive taps for another derivative order.
struct FilterArtifact {
    std::string label;
    std::size_t length = 0;
    std::size_t terms = 0;
    std::size_t derivative = 0;
    double sample_period = 1.0;
    Vector taps;
    Matrix analysis; ///< L x M
    double white_noise_gain = 0.0;
    std::optional<double> first_null;
    double condition = 1.0;
    std::string route;
    std::optional<NoiseModelSpec> noise;
};

inline FilterArtifact to_artifact(const DesignedFilter& f) {
    FilterArtifact a;
    a.label = f.label();
    a.length = f.spec().length;
    a.terms = f.spec().terms;
    a.derivative = f.spec().derivative;
    a.sample_period = f.spec().sample_period();
    a.taps = f.taps();
    a.analysis = f.operators().analysis;
    a.white_noise_gain = f.diagnostics().white_noise_gain;
    a.first_null = f.diagnostics().first_null;
    a.condition = f.diagnostics().condition;
    a.route = to_string(f.diagnostics().route);
    a.noise = f.spec().noise;
    return a;
}

inline json to_json(const FilterArtifact& a) {
    json j;
    j["label"] = a.label;
    j["M"] = a.length;
    j["L"] = a.terms;
    j["d"] = a.derivative;
    j["sample_period"] = a.sample_period;
    j["h"] = std::vector<double>(a.taps.data(), a.taps.data() + a.taps.size());
    json rows = json::array();
    for (Eigen::Index l = 0; l < a.analysis.rows(); ++l) {
        std::vector<double> row(static_cast<std::size_t>(a.analysis.cols()));
        for (Eigen::Index m = 0; m < a.analysis.cols(); ++m) row[static_cast<std::size_t>(m)] = a.analysis(l, m);
        rows.push_back(row);
    }
    j["H"] = rows;
    j["wng"] = a.white_noise_gain;
    j["omega_delta"] = a.first_null ? json(*a.first_null) : json(nullptr);
    j["condition"] = a.condition;
    j["route"] = a.route;
    j["noise"] = a.noise ? to_json(*a.noise) : json(nullptr);
    return j;
}

inline FilterArtifact artifact_from_json(const json& j, const std::string& where = "filter file") {
    check_keys(j, {"label", "M", "L", "d", "sample_period", "h", "H", "wng", "omega_delta", "condition", "route",
                   "noise"},
               where);
    FilterArtifact a;
    a.label = get_optional<std::string>(j, "label", where).value_or("custom");
    a.length = get_count(j, "M", where);
    a.terms = get_count(j, "L", where);
    a.derivative = get_count(j, "d", where);
    a.sample_period = get_optional<double>(j, "sample_period", where).value_or(1.0);
    csg::detail::require(a.length >= 1 && a.length % 2 == 1, where + ": M must be odd");
    csg::detail::require(a.terms >= 1 && a.terms <= a.length, where + ": L must satisfy 1 <= L <= M");
    csg::detail::require(a.derivative < a.terms, where + ": d must be below L");
    const auto h = get_required<std::vector<double>>(j, "h", where);
    csg::detail::require(h.size() == a.length, where + ": h must have M entries");
    a.taps = Eigen::Map<const Vector>(h.data(), static_cast<Eigen::Index>(h.size()));
    if (j.contains("H") && !j.at("H").is_null()) {
        const auto rows = get_required<std::vector<std::vector<double>>>(j, "H", where);
        csg::detail::require(rows.size() == a.terms, where + ": H must have L rows");
        a.analysis.resize(static_cast<Eigen::Index>(a.terms), static_cast<Eigen::Index>(a.length));
        for (std::size_t l = 0; l < rows.size(); ++l) {
            csg::detail::require(rows[l].size() == a.length, where + ": each row of H must have M entries");
            for (std::size_t m = 0; m < a.length; ++m)
                a.analysis(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) = rows[l][m];
        }
    }
    for (Eigen::Index i = 0; i < a.taps.size(); ++i)
        csg::detail::require(std::isfinite(a.taps(i)), where + ": h contains a non-finite value");
    a.white_noise_gain = get_optional<double>(j, "wng", where).value_or(white_noise_gain(a.taps));
    a.first_null = get_optional<double>(j, "omega_delta", where);
    a.condition = get_optional<double>(j, "condition", where).value_or(1.0);
    a.route = get_optional<std::string>(j, "route", where).value_or("");
    if (j.contains("noise") && !j.at("noise").is_null()) a.noise = noise_from_json(j.at("noise"), where + ".noise");
    return a;
}

inline FilterArtifact load_filter(const std::filesystem::path& path) {
    const auto text = read_file(path);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
    return artifact_from_json(j, path.string());
}

inline void save_filter(const std::filesystem::path& path, const FilterArtifact& a) {
    write_file(path, to_json(a).dump(2) + "\n");
}

} // namespace csg::io
