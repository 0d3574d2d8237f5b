#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wvpanel/alias.hpp"
#include "wvpanel/errors.hpp"
#include "wvpanel/matrix.hpp"
#include "wvpanel/panel.hpp"
#include "wvpanel/rng.hpp"
#include "wvpanel/wvf.hpp"

namespace wvpanel {

inline std::string format_double(double v) { return detail::format_double(v); }

inline std::string to_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

// Plain grid CSV, no header, shortest round-trip cells.
inline std::string matrix_to_csv(const Matrix& m) {
    std::string out;
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

inline Matrix matrix_from_csv(std::string_view text) {
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw ParseError("empty matrix CSV", 1);
    Matrix out;
    out.rows = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto cells = detail::split_cells(lines[i]);
        if (i == 0) {
            out.cols = cells.size();
            out.data.reserve(out.rows * out.cols);
        } else if (cells.size() != out.cols) {
            throw ParseError("ragged matrix CSV row", i + 1);
        }
        for (const auto& cell : cells) out.data.push_back(detail::parse_cell(cell, i + 1));
    }
    return out;
}

// Generic date-indexed table (residual panels and the like).
struct SeriesTable {
    std::vector<std::string> dates;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns;  // one vector per label
};

inline std::string series_table_to_csv(const SeriesTable& table) {
    std::string out = "date";
    for (const auto& l : table.labels) {
        out += ',';
        out += l;
    }
    out += '\n';
    for (std::size_t i = 0; i < table.dates.size(); ++i) {
        out += table.dates[i];
        for (const auto& col : table.columns) {
            out += ',';
            out += format_double(col[i]);
        }
        out += '\n';
    }
    return out;
}

inline SeriesTable series_table_from_csv(std::string_view text) {
    const auto parsed = detail::parse_csv_table(text);
    SeriesTable table;
    table.dates = parsed.dates;
    table.labels.assign(parsed.header.begin() + 1, parsed.header.end());
    table.columns.assign(table.labels.size(), {});
    for (auto& col : table.columns) col.reserve(table.dates.size());
    for (std::size_t i = 0; i < parsed.rows.size(); ++i) {
        for (std::size_t j = 0; j < table.labels.size(); ++j) {
            if (!parsed.rows[i][j].has_value()) {
                throw ParseError("missing cell in column '" + table.labels[j] + "'", i + 2);
            }
            table.columns[j].push_back(*parsed.rows[i][j]);
        }
    }
    return table;
}

// P2 (ASCII) PGM, maxval 255.
inline std::string pgm_p2(const MatrixT<int>& image) {
    std::string out = "P2\n";
    out += std::to_string(image.cols) + " " + std::to_string(image.rows) + "\n255\n";
    for (std::size_t i = 0; i < image.rows; ++i) {
        for (std::size_t j = 0; j < image.cols; ++j) {
            if (j) out += ' ';
            out += std::to_string(image(i, j));
        }
        out += '\n';
    }
    return out;
}

// Grayscale rendering of an arbitrary real matrix, |value| scaled to 255.
inline MatrixT<int> grayscale(const Matrix& m) {
    MatrixT<int> img(m.rows, m.cols, 0);
    const double peak = max_abs(m);
    if (peak == 0.0) return img;
    for (std::size_t i = 0; i < m.size(); ++i) {
        img.data[i] = static_cast<int>(std::lround(std::abs(m.data[i]) / peak * 255.0));
    }
    return img;
}

// Aliased support as CSV triplets.
inline std::string aliased_map_to_csv(const AliasedMap& map) {
    std::string out = "row,col,value\n";
    for (std::size_t s = 0; s < map.support.size(); ++s) {
        out += std::to_string(map.support[s].first);
        out += ',';
        out += std::to_string(map.support[s].second);
        out += ',';
        out += format_double(map.values[s]);
        out += '\n';
    }
    return out;
}

inline std::string wvf_real_csv(const WvfArray& w) {
    Matrix re(w.values.rows, w.values.cols);
    for (std::size_t i = 0; i < w.values.size(); ++i) re.data[i] = w.values.data[i].real();
    return matrix_to_csv(re);
}

inline std::string wvf_imag_csv(const WvfArray& w) {
    Matrix im(w.values.rows, w.values.cols);
    for (std::size_t i = 0; i < w.values.size(); ++i) im.data[i] = w.values.data[i].imag();
    return matrix_to_csv(im);
}

// Grid metadata sidecar for an exported array.
inline std::string wvf_sidecar_json(const WvfArray& w, std::string_view source_label) {
    nlohmann::json j;
    j["n_time"] = w.n;
    j["n_freq"] = w.n;
    j["lag_convention"] = WvfArray::lag_convention;
    j["transform_sign"] = WvfArray::transform_sign;
    j["frequency_mapping"] = "bin m covers angular frequency 2*pi*m/N of the half-lag index";
    j["source"] = std::string(source_label);
    return j.dump(2) + "\n";
}

// Upper-triangular labeled layout: each row carries cells only from its
// own diagonal onward.
inline std::string correlation_table_csv(const std::vector<std::string>& labels,
                                         const Matrix& values) {
    std::string out;
    for (const auto& l : labels) {
        out += ',';
        out += l;
    }
    out += '\n';
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out += labels[i];
        for (std::size_t k = 0; k < labels.size(); ++k) {
            out += ',';
            if (k >= i) out += format_double(values(i, k));
        }
        out += '\n';
    }
    return out;
}

// Collects artifacts in memory and writes them plus the run manifest in
// one pass at the end of a stage. The manifest lists every artifact
// (name, byte count, FNV-1a content hash) together with the resolved
// config hash and the master seed; it never includes timestamps, so
// reruns with identical inputs are byte-identical.
class ArtifactWriter {
public:
    explicit ArtifactWriter(std::filesystem::path out_dir) : dir_(std::move(out_dir)) {}

    void add(std::string name, std::string content) {
        names_.push_back(std::move(name));
        contents_.push_back(std::move(content));
    }

    // Writes all artifacts plus manifest_<stage>.json; returns the
    // manifest path.
    std::filesystem::path commit(std::string_view stage, std::uint64_t config_hash,
                                 std::uint64_t seed) {
        std::filesystem::create_directories(dir_);
        nlohmann::json manifest;
        manifest["stage"] = std::string(stage);
        manifest["config_hash"] = to_hex(config_hash);
        manifest["seed"] = seed;
        manifest["outputs"] = nlohmann::json::array();
        for (std::size_t i = 0; i < names_.size(); ++i) {
            write_file(dir_ / names_[i], contents_[i]);
            nlohmann::json entry;
            entry["file"] = names_[i];
            entry["bytes"] = contents_[i].size();
            entry["fnv1a64"] = to_hex(fnv1a64(contents_[i]));
            manifest["outputs"].push_back(entry);
        }
        const auto manifest_path = dir_ / ("manifest_" + std::string(stage) + ".json");
        write_file(manifest_path, manifest.dump(2) + "\n");
        return manifest_path;
    }

    static void write_file(const std::filesystem::path& path, std::string_view content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw DataError("short write to '" + path.string() + "'");
    }

private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
    std::vector<std::string> contents_;
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

}  // namespace wvpanel
