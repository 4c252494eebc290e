#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "psmkt/bds.hpp"
#include "psmkt/csv.hpp"
#include "psmkt/errors.hpp"
#include "psmkt/params.hpp"
#include "psmkt/stats.hpp"

namespace psmkt {

// ---------------------------------------------------------------------------
// Calibration table serialization
// ---------------------------------------------------------------------------

inline void write_calibration_csv(const CalibrationTable& table, std::ostream& os) {
    write_row(os,
              {"sector", "is_psf", "usable", "years_used", "window_start", "window_end",
               "exit_rate", "entry_rate", "net_growth"},
              ',');
    for (const auto& s : table.sectors) {
        auto cell = [](double v) { return std::isnan(v) ? std::string() : format_number(v); };
        write_row(os,
                  {s.sector, s.is_psf ? "1" : "0", s.usable ? "1" : "0",
                   std::to_string(s.years_used), std::to_string(table.window.start_year),
                   std::to_string(table.window.end_year), cell(s.exit_rate), cell(s.entry_rate),
                   cell(s.net_growth)},
                  ',');
    }
}

inline CalibrationTable read_calibration_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("calibration table: empty input");
    const auto header = split_delimited(line, ',');
    const std::vector<std::string> expected = {"sector",       "is_psf",     "usable",
                                               "years_used",   "window_start", "window_end",
                                               "exit_rate",    "entry_rate", "net_growth"};
    if (header != expected) throw DataError("calibration table: unexpected header");

    CalibrationTable table;
    bool window_set = false;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_delimited(line, ',');
        if (f.size() != expected.size()) throw DataError("calibration table: bad row width");
        CalibratedSector s;
        s.sector = f[0];
        s.is_psf = f[1] == "1";
        s.usable = f[2] == "1";
        s.years_used = static_cast<std::size_t>(std::stoull(f[3]));
        table.window.start_year = std::stoi(f[4]);
        table.window.end_year = std::stoi(f[5]);
        window_set = true;
        auto cell = [](const std::string& v) {
            return v.empty() ? std::numeric_limits<double>::quiet_NaN() : std::stod(v);
        };
        s.exit_rate = cell(f[6]);
        s.entry_rate = cell(f[7]);
        s.net_growth = cell(f[8]);
        table.sectors.push_back(std::move(s));
    }
    if (!window_set) table.window = CalibrationWindow{0, 4};
    return table;
}

inline void write_calibration_json(const CalibrationTable& table, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["window"] = {{"start_year", table.window.start_year},
                     {"end_year", table.window.end_year}};
    doc["sectors"] = nlohmann::ordered_json::array();
    for (const auto& s : table.sectors) {
        nlohmann::ordered_json row;
        row["sector"] = s.sector;
        row["is_psf"] = s.is_psf;
        row["usable"] = s.usable;
        row["years_used"] = s.years_used;
        if (s.usable) {
            row["exit_rate"] = s.exit_rate;
            row["entry_rate"] = s.entry_rate;
            row["net_growth"] = s.net_growth;
        }
        doc["sectors"].push_back(std::move(row));
    }
    os << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Ranking
// ---------------------------------------------------------------------------

struct RankedSectors {
    std::vector<CalibratedSector> rows; ///< descending net growth, ties by code
    std::string notice;                 ///< set when fewer than k rows were available
};

/// Top-k usable sectors by net growth, excluding the given codes.
inline RankedSectors rank_sectors(const CalibrationTable& table, std::size_t k,
                                  const std::set<std::string>& exclude = {}) {
    if (k == 0) throw ValidationError("rank_sectors: k must be >= 1");
    RankedSectors out;
    for (const auto& s : table.sectors)
        if (s.usable && !exclude.count(s.sector)) out.rows.push_back(s);
    std::sort(out.rows.begin(), out.rows.end(), [](const CalibratedSector& a, const CalibratedSector& b) {
        if (a.net_growth != b.net_growth) return a.net_growth > b.net_growth;
        return a.sector < b.sector;
    });
    if (out.rows.size() > k) {
        out.rows.resize(k);
    } else if (out.rows.size() < k) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "only %zu usable sectors available (k = %zu)",
                      out.rows.size(), k);
        out.notice = buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Opportunity matrix
// ---------------------------------------------------------------------------

/// Customer-sector rows against expertise columns; each cell holds the
/// regime verdict and the margin g_row - 2*phi_col.
struct OpportunityMatrix {
    struct Row {
        std::string sector;
        double net_growth = 0.0;
    };
    struct Col {
        std::string sector;
        double training_speed = 0.0;
    };
    std::vector<Row> rows; ///< descending net growth, ties by code
    std::vector<Col> cols; ///< ascending code
    std::vector<Regime> cells; ///< row-major
    std::string notice;

    const Regime& at(std::size_t i, std::size_t j) const { return cells[i * cols.size() + j]; }
};

inline OpportunityMatrix opportunity_matrix(const std::vector<CalibratedSector>& customers,
                                            const std::vector<CalibratedSector>& expertises) {
    if (customers.empty()) throw ValidationError("opportunity_matrix: no customer rows");
    OpportunityMatrix m;
    std::size_t skipped = 0;
    for (const auto& c : customers) {
        if (!c.usable) {
            ++skipped;
            continue;
        }
        m.rows.push_back({c.sector, c.net_growth});
    }
    for (const auto& e : expertises) {
        if (!e.is_psf)
            throw ValidationError("opportunity_matrix: expertise row " + e.sector +
                                  " is not flagged as professional services");
        if (!e.usable) {
            ++skipped;
            continue;
        }
        m.cols.push_back({e.sector, e.net_growth});
    }
    if (skipped > 0)
        m.notice = std::to_string(skipped) + " unusable calibration row(s) excluded";

    std::sort(m.rows.begin(), m.rows.end(), [](const auto& a, const auto& b) {
        if (a.net_growth != b.net_growth) return a.net_growth > b.net_growth;
        return a.sector < b.sector;
    });
    std::sort(m.cols.begin(), m.cols.end(),
              [](const auto& a, const auto& b) { return a.sector < b.sector; });

    m.cells.reserve(m.rows.size() * m.cols.size());
    for (const auto& row : m.rows)
        for (const auto& col : m.cols)
            m.cells.push_back(Regime::from_margin(row.net_growth - 2.0 * col.training_speed));
    return m;
}

inline void write_matrix_csv(const OpportunityMatrix& m, std::ostream& os) {
    write_row(os, {"customer_sector", "expertise_sector", "verdict", "margin"}, ',');
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols.size(); ++j) {
            const Regime& cell = m.at(i, j);
            write_row(os,
                      {m.rows[i].sector, m.cols[j].sector, to_string(cell.kind),
                       format_number(cell.margin)},
                      ',');
        }
}

inline void write_matrix_json(const OpportunityMatrix& m, std::ostream& os) {
    nlohmann::ordered_json doc;
    doc["customer_sectors"] = nlohmann::ordered_json::array();
    for (const auto& r : m.rows)
        doc["customer_sectors"].push_back({{"sector", r.sector}, {"net_growth", r.net_growth}});
    doc["expertise_sectors"] = nlohmann::ordered_json::array();
    for (const auto& c : m.cols)
        doc["expertise_sectors"].push_back({{"sector", c.sector}, {"training_speed", c.training_speed}});
    doc["cells"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.rows.size(); ++i)
        for (std::size_t j = 0; j < m.cols.size(); ++j) {
            const Regime& cell = m.at(i, j);
            doc["cells"].push_back({{"customer", m.rows[i].sector},
                                    {"expertise", m.cols[j].sector},
                                    {"verdict", to_string(cell.kind)},
                                    {"margin", cell.margin}});
        }
    os << doc.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Heatmap rendering
// ---------------------------------------------------------------------------

/// Static SVG heatmap: green cells mark growth opportunities, red cells
/// consolidation; each cell carries the margin as hover text. Output bytes
/// are a pure function of the matrix.
inline void render_heatmap(const OpportunityMatrix& m, std::ostream& os) {
    if (m.rows.empty() || m.cols.empty())
        throw ValidationError("render_heatmap: degenerate matrix (no rows or columns)");

    const int cell_w = 64, cell_h = 26, left = 150, top = 110, pad = 8;
    const int width = left + cell_w * static_cast<int>(m.cols.size()) + pad;
    const int height = top + cell_h * static_cast<int>(m.rows.size()) + pad;

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
       << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    os << "<style>\n"
          "text { font-family: monospace; font-size: 12px; fill: #222; }\n"
          ".growth { fill: #3a9a4e; stroke: #ffffff; }\n"
          ".consolidation { fill: #c0392b; stroke: #ffffff; }\n"
          "</style>\n";

    for (std::size_t j = 0; j < m.cols.size(); ++j) {
        const int x = left + static_cast<int>(j) * cell_w + cell_w / 2;
        os << "<text x=\"" << x << "\" y=\"" << top - 10 << "\" transform=\"rotate(-60 " << x << " "
           << top - 10 << ")\">" << m.cols[j].sector << "</text>\n";
    }
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        const int y = top + static_cast<int>(i) * cell_h + cell_h / 2 + 4;
        os << "<text x=\"" << pad << "\" y=\"" << y << "\">" << m.rows[i].sector << "</text>\n";
    }
    for (std::size_t i = 0; i < m.rows.size(); ++i) {
        for (std::size_t j = 0; j < m.cols.size(); ++j) {
            const Regime& cell = m.at(i, j);
            const int x = left + static_cast<int>(j) * cell_w;
            const int y = top + static_cast<int>(i) * cell_h;
            os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w - 2
               << "\" height=\"" << cell_h - 2 << "\" class=\""
               << (cell.is_growth() ? "growth" : "consolidation") << "\"><title>"
               << m.rows[i].sector << " x " << m.cols[j].sector << ": margin "
               << format_number(cell.margin) << " (" << to_string(cell.kind) << ")</title></rect>\n";
        }
    }
    os << "</svg>\n";
}

inline void render_heatmap_file(const OpportunityMatrix& m, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write heatmap: " + path);
    render_heatmap(m, os);
}

// ---------------------------------------------------------------------------
// Practice-count series
// ---------------------------------------------------------------------------

struct SeriesPoint {
    int year = 0;
    std::string sector;
    double firm_count = 0.0;
};

/// Per-year firm counts for each professional-services code, plus an
/// aggregate series under the code "PSF_TOTAL". Missing years are simply
/// absent. Points are ordered by (code, year) with the aggregate last.
inline std::vector<SeriesPoint> psf_count_series(const std::vector<BdsRecord>& records,
                                                 const std::set<std::string>& psf_codes = default_psf_codes()) {
    std::map<std::string, std::map<int, double>> per_code;
    std::map<int, double> total;
    for (const auto& r : records) {
        if (!psf_codes.count(r.sector)) continue;
        per_code[r.sector][r.year] += r.num_firms;
        total[r.year] += r.num_firms;
    }
    std::vector<SeriesPoint> out;
    for (const auto& [code, years] : per_code)
        for (const auto& [year, count] : years) out.push_back({year, code, count});
    for (const auto& [year, count] : total) out.push_back({year, "PSF_TOTAL", count});
    return out;
}

inline void write_series_csv(const std::vector<SeriesPoint>& points, std::ostream& os) {
    write_row(os, {"year", "sector", "firms"}, ',');
    for (const auto& p : points)
        write_row(os, {std::to_string(p.year), p.sector, format_number(p.firm_count)}, ',');
}

/// Per-year relative slope of one series (OLS of ln(count) on year) over
/// [year_from, year_to] inclusive.
inline SlopeFit series_log_slope(const std::vector<SeriesPoint>& points, const std::string& code,
                                 int year_from, int year_to) {
    std::vector<double> xs, ys;
    for (const auto& p : points) {
        if (p.sector != code || p.year < year_from || p.year > year_to) continue;
        if (!(p.firm_count > 0.0)) continue;
        xs.push_back(p.year);
        ys.push_back(std::log(p.firm_count));
    }
    if (xs.size() < 3) throw InsufficientDataError("series_log_slope: fewer than 3 usable years");
    return fit_slope(xs, ys);
}

// ---------------------------------------------------------------------------
// Ranked-sector export
// ---------------------------------------------------------------------------

inline void write_ranked_csv(const RankedSectors& ranked, std::ostream& os) {
    write_row(os, {"rank", "sector", "is_psf", "net_growth", "exit_rate", "entry_rate"}, ',');
    for (std::size_t i = 0; i < ranked.rows.size(); ++i) {
        const auto& s = ranked.rows[i];
        write_row(os,
                  {std::to_string(i + 1), s.sector, s.is_psf ? "1" : "0",
                   format_number(s.net_growth), format_number(s.exit_rate),
                   format_number(s.entry_rate)},
                  ',');
    }
}

} // namespace psmkt
