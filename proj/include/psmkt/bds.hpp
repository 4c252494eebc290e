#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "psmkt/csv.hpp"
#include "psmkt/errors.hpp"

namespace psmkt {

/// One sector-year row of firm demographics. Exits exceeding the firm count
/// are possible in the source tables; such rows are flagged, not rejected.
struct BdsRecord {
    int year = 0;
    std::string sector; ///< 4-digit classification code
    double num_firms = 0.0;
    double num_entrants = 0.0;
    double num_exits = 0.0;
    double employment = 0.0;
};

/// Column names of the six mapped fields. Defaults target the 4-digit
/// time-series release of the Business Dynamics Statistics tables
/// (firm counts, firm deaths, establishment entry, employment); releases
/// rename columns, so the map is configuration rather than a constant.
struct BdsColumnMap {
    std::string year = "year";
    std::string sector = "vcnaics4";
    std::string firms = "firms";
    std::string entrants = "estabs_entry";
    std::string exits = "firmdeath_firms";
    std::string employment = "emp";
};

struct BdsParseOptions {
    char delim = ',';
    /// Cell values treated as suppressed/missing; the row is dropped.
    std::vector<std::string> suppression = {"", "(D)", "(S)", "N", "(X)"};
};

struct BdsParseReport {
    std::size_t rows_read = 0;
    std::size_t rows_dropped = 0;  ///< suppressed or unparsable count cells
    std::size_t rows_flagged = 0;  ///< exits greater than the firm count
};

namespace detail {

inline bool parse_count(const std::string& text, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(text, &pos);
    } catch (const std::exception&) {
        return false;
    }
    return pos == text.size() && std::isfinite(out) && out >= 0.0;
}

} // namespace detail

/// Parses a delimited stream with a header row into records. Rows with a
/// suppressed or unparsable value in any mapped column are dropped and
/// counted. A missing mapped column, an unparseable year, or a duplicate
/// (sector, year) pair is an error.
inline std::pair<std::vector<BdsRecord>, BdsParseReport>
parse_bds(std::istream& in, const BdsColumnMap& map = {}, const BdsParseOptions& opts = {}) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("parse_bds: empty input, no header row");
    const std::vector<std::string> header = split_delimited(line, opts.delim);

    auto column = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw DataError("parse_bds: missing mapped column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_year = column(map.year);
    const std::size_t c_sector = column(map.sector);
    const std::size_t c_firms = column(map.firms);
    const std::size_t c_entrants = column(map.entrants);
    const std::size_t c_exits = column(map.exits);
    const std::size_t c_emp = column(map.employment);

    const auto suppressed = [&](const std::string& v) {
        return std::find(opts.suppression.begin(), opts.suppression.end(), v) !=
               opts.suppression.end();
    };

    std::vector<BdsRecord> records;
    BdsParseReport report;
    std::set<std::pair<std::string, int>> seen;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        ++report.rows_read;
        const std::vector<std::string> f = split_delimited(line, opts.delim);
        const std::size_t needed = std::max({c_year, c_sector, c_firms, c_entrants, c_exits, c_emp});
        if (f.size() <= needed)
            throw DataError("parse_bds: line " + std::to_string(lineno) + ": too few columns");

        BdsRecord rec;
        rec.sector = f[c_sector];
        std::size_t pos = 0;
        try {
            rec.year = std::stoi(f[c_year], &pos);
        } catch (const std::exception&) {
            pos = std::string::npos;
        }
        if (pos != f[c_year].size())
            throw DataError("parse_bds: line " + std::to_string(lineno) + ": unparseable year '" +
                            f[c_year] + "'");

        bool ok = true;
        const std::pair<const std::string*, double*> cells[] = {
            {&f[c_firms], &rec.num_firms},
            {&f[c_entrants], &rec.num_entrants},
            {&f[c_exits], &rec.num_exits},
            {&f[c_emp], &rec.employment},
        };
        for (const auto& [cell, field] : cells) {
            if (suppressed(*cell) || !detail::parse_count(*cell, *field)) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++report.rows_dropped;
            continue;
        }
        if (!seen.emplace(rec.sector, rec.year).second)
            throw DataError("parse_bds: duplicate (sector, year) pair " + rec.sector + "/" +
                            std::to_string(rec.year));
        if (rec.num_exits > rec.num_firms) ++report.rows_flagged;
        records.push_back(std::move(rec));
    }
    return {std::move(records), report};
}

// ---------------------------------------------------------------------------
// Estimation window and per-sector estimators
// ---------------------------------------------------------------------------

struct CalibrationWindow {
    int start_year = 2008;
    int end_year = 2018;

    int span() const { return end_year - start_year + 1; }

    /// A window below 4 years cannot hold the 3 year-pairs every estimator
    /// needs, so it is an insufficient-data condition (sectors come out
    /// flagged unusable), not a hard configuration error.
    CalibrationWindow validated() const {
        if (end_year < start_year)
            throw ValidationError("calibration window end before start");
        if (span() < 4)
            throw InsufficientDataError(
                "calibration window spans fewer than 4 years (needs 3 year-pairs)");
        return *this;
    }

    bool contains(int year) const { return year >= start_year && year <= end_year; }
};

struct RateEstimate {
    double value = 0.0;
    std::size_t observations = 0; ///< usable years (or year-pairs) averaged
};

namespace detail {

/// In-window records with positive firm counts, sorted by year.
inline std::vector<BdsRecord> usable_years(const std::vector<BdsRecord>& recs,
                                           const CalibrationWindow& win) {
    std::vector<BdsRecord> out;
    for (const auto& r : recs)
        if (win.contains(r.year) && r.num_firms > 0.0) out.push_back(r);
    std::sort(out.begin(), out.end(),
              [](const BdsRecord& a, const BdsRecord& b) { return a.year < b.year; });
    return out;
}

inline RateEstimate mean_of_yearly_ratio(const std::vector<BdsRecord>& recs,
                                         const CalibrationWindow& win, double BdsRecord::*num,
                                         const char* what) {
    const auto rows = usable_years(recs, win.validated());
    if (rows.size() < 3)
        throw InsufficientDataError(std::string(what) + ": fewer than 3 usable years in window");
    double acc = 0.0;
    for (const auto& r : rows) acc += r.*num / r.num_firms;
    return RateEstimate{acc / static_cast<double>(rows.size()), rows.size()};
}

} // namespace detail

/// Mean yearly exit ratio N_exit(t)/N(t) over usable years in the window.
inline RateEstimate estimate_exit_rate(const std::vector<BdsRecord>& recs,
                                       const CalibrationWindow& win) {
    return detail::mean_of_yearly_ratio(recs, win, &BdsRecord::num_exits, "exit rate");
}

/// Mean yearly entry ratio N_entry(t)/N(t) over usable years in the window.
inline RateEstimate estimate_entry_rate(const std::vector<BdsRecord>& recs,
                                        const CalibrationWindow& win) {
    return detail::mean_of_yearly_ratio(recs, win, &BdsRecord::num_entrants, "entry rate");
}

/// Mean employment growth (E(t+1) - E(t))/E(t) over consecutive usable
/// year-pairs. Proxies the client-pool growth rate for customer sectors
/// and the training speed for professional-services sectors. Pairs with a
/// zero employment denominator are skipped.
inline RateEstimate estimate_net_growth(const std::vector<BdsRecord>& recs,
                                        const CalibrationWindow& win) {
    const auto rows = detail::usable_years(recs, win.validated());
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i + 1].year != rows[i].year + 1) continue;
        if (!(rows[i].employment > 0.0)) continue;
        acc += (rows[i + 1].employment - rows[i].employment) / rows[i].employment;
        ++pairs;
    }
    if (pairs < 3)
        throw InsufficientDataError("net growth: fewer than 3 consecutive usable year-pairs");
    return RateEstimate{acc / static_cast<double>(pairs), pairs};
}

/// The dimensionally suspect training-speed formula
///   (E(t+1)-E(t))/E(t) * N_entry(t)/N(t) + N_exit(t)/N_entry(t)
/// averaged over year-pairs, kept verbatim for comparison only. Its second
/// term is order one while realistic training speeds are below a few
/// percent; estimate_net_growth is the estimator actually used.
inline RateEstimate estimate_training_speed_literal(const std::vector<BdsRecord>& recs,
                                                    const CalibrationWindow& win) {
    const auto rows = detail::usable_years(recs, win.validated());
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        if (rows[i + 1].year != rows[i].year + 1) continue;
        if (!(rows[i].employment > 0.0)) continue;
        if (!(rows[i].num_entrants > 0.0))
            throw InsufficientDataError("literal training speed: zero entrants in usable year " +
                                        std::to_string(rows[i].year));
        const double growth = (rows[i + 1].employment - rows[i].employment) / rows[i].employment;
        acc += growth * rows[i].num_entrants / rows[i].num_firms +
               rows[i].num_exits / rows[i].num_entrants;
        ++pairs;
    }
    if (pairs < 3)
        throw InsufficientDataError("literal training speed: fewer than 3 usable year-pairs");
    return RateEstimate{acc / static_cast<double>(pairs), pairs};
}

// ---------------------------------------------------------------------------
// Whole-table calibration
// ---------------------------------------------------------------------------

/// Calibrated rates of one sector. net_growth carries the employment-growth
/// proxy: the client-pool rate for customer sectors, the training speed for
/// professional-services sectors (is_psf).
struct CalibratedSector {
    std::string sector;
    bool is_psf = false;
    bool usable = false;
    std::size_t years_used = 0;
    double exit_rate = std::numeric_limits<double>::quiet_NaN();
    double entry_rate = std::numeric_limits<double>::quiet_NaN();
    double net_growth = std::numeric_limits<double>::quiet_NaN();
};

struct CalibrationTable {
    CalibrationWindow window;
    std::vector<CalibratedSector> sectors; ///< sorted by sector code
};

/// 4-digit codes treated as professional-services sectors by default.
inline const std::set<std::string>& default_psf_codes() {
    static const std::set<std::string> codes = {"5411", "5412", "5413", "5414", "5415",
                                                "5416", "5417", "5418", "5419"};
    return codes;
}

/// Runs the three estimators per sector. Sectors with too little data stay
/// in the table flagged unusable; row order is deterministic (code
/// ascending) and independent of input order.
inline CalibrationTable calibrate_all(const std::vector<BdsRecord>& records,
                                      const CalibrationWindow& win,
                                      const std::set<std::string>& psf_codes = default_psf_codes()) {
    if (win.end_year < win.start_year)
        throw ValidationError("calibration window end before start");
    std::map<std::string, std::vector<BdsRecord>> by_sector;
    for (const auto& r : records) by_sector[r.sector].push_back(r);

    CalibrationTable table;
    table.window = win;
    for (auto& [code, recs] : by_sector) {
        CalibratedSector row;
        row.sector = code;
        row.is_psf = psf_codes.count(code) != 0;
        try {
            const RateEstimate exit = estimate_exit_rate(recs, win);
            const RateEstimate entry = estimate_entry_rate(recs, win);
            const RateEstimate growth = estimate_net_growth(recs, win);
            row.exit_rate = exit.value;
            row.entry_rate = entry.value;
            row.net_growth = growth.value;
            row.years_used = exit.observations;
            row.usable = true;
        } catch (const InsufficientDataError&) {
            row.usable = false;
            row.years_used = detail::usable_years(recs, win).size();
        }
        table.sectors.push_back(std::move(row));
    }
    return table;
}

/// Sums counts across all sectors per year into a synthetic aggregate
/// (sector code "ALL" by default) for economy-wide rates.
inline std::vector<BdsRecord> aggregate_sectors(const std::vector<BdsRecord>& records,
                                                const std::string& code = "ALL") {
    std::map<int, BdsRecord> by_year;
    for (const auto& r : records) {
        BdsRecord& agg = by_year[r.year];
        agg.year = r.year;
        agg.sector = code;
        agg.num_firms += r.num_firms;
        agg.num_entrants += r.num_entrants;
        agg.num_exits += r.num_exits;
        agg.employment += r.employment;
    }
    std::vector<BdsRecord> out;
    out.reserve(by_year.size());
    for (auto& [year, rec] : by_year) {
        (void)year;
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace psmkt
