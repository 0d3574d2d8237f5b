#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdio>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "wvpanel/errors.hpp"
#include "wvpanel/matrix.hpp"

namespace wvpanel {

struct Entity {
    std::string label;
    std::string domicile;  // optional tag, empty when unknown
};

// Date-aligned panel of daily rates, one column per entity plus the
// benchmark. Rates are stored in percent. Dates are ISO-8601 strings
// (YYYY-MM-DD), strictly increasing; lexicographic order equals
// chronological order for this format.
struct PanelSeries {
    std::vector<std::string> dates;
    std::vector<Entity> entities;
    Matrix values;  // [date x entity]
    std::string benchmark_label;

    std::size_t n_dates() const { return dates.size(); }
    std::size_t n_entities() const { return entities.size(); }

    std::size_t entity_index(std::string_view label) const {
        for (std::size_t j = 0; j < entities.size(); ++j) {
            if (entities[j].label == label) return j;
        }
        throw DataError("entity '" + std::string(label) + "' not present in panel");
    }

    std::size_t benchmark_index() const {
        for (std::size_t j = 0; j < entities.size(); ++j) {
            if (entities[j].label == benchmark_label) return j;
        }
        throw MissingBenchmark("benchmark '" + benchmark_label + "' not present in panel");
    }

    std::vector<double> column(std::size_t j) const {
        std::vector<double> out(n_dates());
        for (std::size_t i = 0; i < n_dates(); ++i) out[i] = values(i, j);
        return out;
    }

    std::vector<double> benchmark() const { return column(benchmark_index()); }
};

// Per-entity CDS panel: spread in basis points, domicile-matched national
// short rate in percent, both on the same dates.
struct CdsPanel {
    std::vector<std::string> dates;
    std::string entity;
    std::vector<double> cds_spread_bp;
    std::vector<double> short_rate_pct;
};

namespace detail {

inline bool all_digits(std::string_view s) {
    for (char c : s) {
        if (c < '0' || c > '9') return false;
    }
    return !s.empty();
}

inline bool is_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2))) {
        return false;
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline std::string civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    char buf[11];
    std::snprintf(buf, sizeof buf, "%04ld-%02u-%02u", y + (m <= 2), m, d);
    return std::string(buf);
}

inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        pos = nl + 1;
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

inline std::vector<std::string> split_cells(std::string_view line) {
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.emplace_back(line.substr(pos));
            break;
        }
        cells.emplace_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line_no) {
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw ParseError("cannot parse numeric cell '" + cell + "'", line_no);
    }
    return value;
}

// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

struct CsvTable {
    std::vector<std::string> header;         // first row, cells
    std::vector<std::string> dates;          // first column of each data row
    std::vector<std::vector<std::optional<double>>> rows;  // remaining cells per row
};

// Shared table reader: header row mandatory, first column named "date",
// dates ISO-8601 and strictly increasing, empty cell = missing.
inline CsvTable parse_csv_table(std::string_view text) {
    const auto lines = split_lines(text);
    if (lines.empty()) throw ParseError("empty input", 1);
    CsvTable table;
    table.header = split_cells(lines[0]);
    if (table.header.empty() || table.header[0] != "date") {
        throw ParseError("header must start with 'date'", 1);
    }
    for (std::size_t j = 1; j < table.header.size(); ++j) {
        if (table.header[j].empty()) throw ParseError("empty column label in header", 1);
    }
    const std::size_t n_cols = table.header.size();
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const auto cells = split_cells(lines[i]);
        if (cells.size() != n_cols) {
            throw ParseError("expected " + std::to_string(n_cols) + " cells, got " +
                                 std::to_string(cells.size()),
                             line_no);
        }
        if (!is_iso_date(cells[0])) {
            throw ParseError("malformed date '" + cells[0] + "' (expected YYYY-MM-DD)", line_no);
        }
        if (!table.dates.empty() && cells[0] <= table.dates.back()) {
            throw ParseError("dates must be strictly increasing ('" + cells[0] + "' after '" +
                                 table.dates.back() + "')",
                             line_no);
        }
        table.dates.push_back(cells[0]);
        std::vector<std::optional<double>> row;
        row.reserve(n_cols - 1);
        for (std::size_t j = 1; j < n_cols; ++j) {
            if (cells[j].empty()) {
                row.emplace_back(std::nullopt);
            } else {
                row.emplace_back(parse_cell(cells[j], line_no));
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (table.dates.empty()) throw ParseError("no data rows", 2);
    return table;
}

// Fill missing cells by carrying the previous day's value forward.
// A missing first cell has nothing to carry and is an error.
inline std::size_t fill_forward(std::vector<std::vector<std::optional<double>>>& rows,
                                const std::vector<std::string>& labels) {
    std::size_t filled = 0;
    const std::size_t n_cols = labels.size();
    for (std::size_t j = 0; j < n_cols; ++j) {
        bool any_value = false;
        for (const auto& row : rows) {
            if (row[j].has_value()) {
                any_value = true;
                break;
            }
        }
        if (!any_value) throw EmptyEntity("column '" + labels[j] + "' is entirely empty");
        if (!rows[0][j].has_value()) {
            throw ParseError("column '" + labels[j] + "' missing on the first date; nothing to carry forward", 2);
        }
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (!rows[i][j].has_value()) {
                rows[i][j] = rows[i - 1][j];
                ++filled;
            }
        }
    }
    return filled;
}

}  // namespace detail

struct ParsedPanel {
    PanelSeries series;
    std::size_t filled_cells = 0;
};

// Parse a rate-panel CSV: header "date,<entity>,...", one row per business
// date, cells are decimal rates in percent or empty (= missing, filled by
// previous-day carry-forward).
inline ParsedPanel parse_panel_csv(std::string_view text, std::string_view benchmark_label) {
    auto table = detail::parse_csv_table(text);
    std::vector<std::string> labels(table.header.begin() + 1, table.header.end());
    if (std::find(labels.begin(), labels.end(), benchmark_label) == labels.end()) {
        throw MissingBenchmark("benchmark label '" + std::string(benchmark_label) +
                               "' not found in header");
    }
    ParsedPanel out;
    out.filled_cells = detail::fill_forward(table.rows, labels);
    out.series.dates = std::move(table.dates);
    out.series.benchmark_label = std::string(benchmark_label);
    out.series.entities.reserve(labels.size());
    for (auto& l : labels) out.series.entities.push_back({std::move(l), ""});
    out.series.values = Matrix(out.series.dates.size(), out.series.entities.size());
    for (std::size_t i = 0; i < out.series.dates.size(); ++i) {
        for (std::size_t j = 0; j < out.series.entities.size(); ++j) {
            out.series.values(i, j) = *table.rows[i][j];
        }
    }
    return out;
}

struct ParsedCds {
    CdsPanel panel;
    std::size_t filled_cells = 0;
};

// CDS CSV: header "date,cds_bp,short_rate_pct"; spread in basis points,
// short rate in percent. Same missing-cell policy as the rate panel.
inline ParsedCds parse_cds_csv(std::string_view text, std::string_view entity_label) {
    auto table = detail::parse_csv_table(text);
    if (table.header.size() != 3 || table.header[1] != "cds_bp" ||
        table.header[2] != "short_rate_pct") {
        throw ParseError("CDS header must be 'date,cds_bp,short_rate_pct'", 1);
    }
    std::vector<std::string> labels{"cds_bp", "short_rate_pct"};
    ParsedCds out;
    out.filled_cells = detail::fill_forward(table.rows, labels);
    out.panel.entity = std::string(entity_label);
    out.panel.dates = std::move(table.dates);
    out.panel.cds_spread_bp.reserve(out.panel.dates.size());
    out.panel.short_rate_pct.reserve(out.panel.dates.size());
    for (std::size_t i = 0; i < out.panel.dates.size(); ++i) {
        const double spread = *table.rows[i][0];
        if (spread < 0.0) {
            throw ParseError("negative CDS spread " + detail::format_double(spread), i + 2);
        }
        out.panel.cds_spread_bp.push_back(spread);
        out.panel.short_rate_pct.push_back(*table.rows[i][1]);
    }
    return out;
}

// Serialize with shortest round-trip formatting so parse(to_csv(p)) is
// bit-exact.
inline std::string to_csv(const PanelSeries& panel) {
    std::string out = "date";
    for (const auto& e : panel.entities) {
        out += ',';
        out += e.label;
    }
    out += '\n';
    for (std::size_t i = 0; i < panel.n_dates(); ++i) {
        out += panel.dates[i];
        for (std::size_t j = 0; j < panel.n_entities(); ++j) {
            out += ',';
            out += detail::format_double(panel.values(i, j));
        }
        out += '\n';
    }
    return out;
}

inline std::string to_csv(const CdsPanel& cds) {
    std::string out = "date,cds_bp,short_rate_pct\n";
    for (std::size_t i = 0; i < cds.dates.size(); ++i) {
        out += cds.dates[i];
        out += ',';
        out += detail::format_double(cds.cds_spread_bp[i]);
        out += ',';
        out += detail::format_double(cds.short_rate_pct[i]);
        out += '\n';
    }
    return out;
}

struct AlignedPair {
    PanelSeries panel;
    CdsPanel cds;
};

// Restrict both inputs to the intersection of their date sets, in order.
inline AlignedPair align(const PanelSeries& panel, const CdsPanel& cds) {
    std::set<std::string> cds_dates(cds.dates.begin(), cds.dates.end());
    std::vector<std::size_t> panel_keep;
    std::set<std::string> common;
    for (std::size_t i = 0; i < panel.dates.size(); ++i) {
        if (cds_dates.count(panel.dates[i])) {
            panel_keep.push_back(i);
            common.insert(panel.dates[i]);
        }
    }
    if (panel_keep.empty()) throw NoOverlap("panel and CDS date ranges do not overlap");

    AlignedPair out;
    out.panel.entities = panel.entities;
    out.panel.benchmark_label = panel.benchmark_label;
    out.panel.values = Matrix(panel_keep.size(), panel.n_entities());
    out.panel.dates.reserve(panel_keep.size());
    for (std::size_t r = 0; r < panel_keep.size(); ++r) {
        out.panel.dates.push_back(panel.dates[panel_keep[r]]);
        for (std::size_t j = 0; j < panel.n_entities(); ++j) {
            out.panel.values(r, j) = panel.values(panel_keep[r], j);
        }
    }
    out.cds.entity = cds.entity;
    for (std::size_t i = 0; i < cds.dates.size(); ++i) {
        if (common.count(cds.dates[i])) {
            out.cds.dates.push_back(cds.dates[i]);
            out.cds.cds_spread_bp.push_back(cds.cds_spread_bp[i]);
            out.cds.short_rate_pct.push_back(cds.short_rate_pct[i]);
        }
    }
    return out;
}

}  // namespace wvpanel
