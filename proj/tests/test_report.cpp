#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <sstream>

#include "psmkt/report.hpp"

using namespace psmkt;

namespace {

CalibratedSector row(const std::string& code, double growth, bool is_psf = false,
                     bool usable = true) {
    CalibratedSector s;
    s.sector = code;
    s.is_psf = is_psf;
    s.usable = usable;
    s.years_used = usable ? 11 : 1;
    s.exit_rate = 0.05;
    s.entry_rate = 0.08;
    s.net_growth = growth;
    return s;
}

CalibrationTable table_of(std::vector<CalibratedSector> rows) {
    CalibrationTable t;
    t.window = CalibrationWindow{2008, 2018};
    t.sectors = std::move(rows);
    return t;
}

} // namespace

// ---------------------------------------------------------------------------
// ranking
// ---------------------------------------------------------------------------

TEST_CASE("rank: top-k by net growth") {
    const auto t = table_of({row("1111", 0.05), row("2222", 0.01), row("3333", -0.02)});
    const RankedSectors top = rank_sectors(t, 2);
    REQUIRE(top.rows.size() == 2);
    REQUIRE(top.rows[0].sector == "1111");
    REQUIRE(top.rows[1].sector == "2222");
    REQUIRE(top.notice.empty());
}

TEST_CASE("rank: ties break on the lower sector code") {
    const auto t = table_of({row("4444", 0.03), row("1111", 0.03), row("2222", 0.03)});
    const RankedSectors top = rank_sectors(t, 3);
    REQUIRE(top.rows[0].sector == "1111");
    REQUIRE(top.rows[1].sector == "2222");
    REQUIRE(top.rows[2].sector == "4444");
}

TEST_CASE("rank: k above the usable count returns everything with a notice") {
    const auto t = table_of({row("1111", 0.05), row("2222", 0.01, false, false)});
    const RankedSectors top = rank_sectors(t, 5);
    REQUIRE(top.rows.size() == 1);
    REQUIRE_FALSE(top.notice.empty());
}

TEST_CASE("rank: exclusions and permutation stability") {
    std::vector<CalibratedSector> rows = {row("1111", 0.05), row("2222", 0.04), row("3333", 0.03),
                                          row("4444", 0.02), row("5555", 0.01)};
    const RankedSectors base = rank_sectors(table_of(rows), 3, {"2222"});
    REQUIRE(base.rows[0].sector == "1111");
    REQUIRE(base.rows[1].sector == "3333");
    REQUIRE(base.rows[2].sector == "4444");

    std::mt19937 shuffler(5);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(rows.begin(), rows.end(), shuffler);
        const RankedSectors again = rank_sectors(table_of(rows), 3, {"2222"});
        for (std::size_t j = 0; j < 3; ++j) REQUIRE(again.rows[j].sector == base.rows[j].sector);
    }
}

// ---------------------------------------------------------------------------
// opportunity matrix
// ---------------------------------------------------------------------------

TEST_CASE("matrix: margins decide the verdict") {
    // Economy-wide growth 0.76% against an expertise trained at 0.45%:
    // margin 0.0076 - 0.0090 < 0, consolidation.
    const auto m = opportunity_matrix({row("ALL", 0.0076)}, {row("5412", 0.0045, true)});
    REQUIRE(m.rows.size() == 1);
    REQUIRE(m.cols.size() == 1);
    REQUIRE_FALSE(m.at(0, 0).is_growth());
    REQUIRE(m.at(0, 0).margin == Catch::Approx(0.0076 - 0.0090));

    // A 10%-growth sector clears even the fastest-trained expertise.
    const auto fast = opportunity_matrix({row("3121", 0.10)}, {row("5416", 0.0302, true)});
    REQUIRE(fast.at(0, 0).is_growth());
    REQUIRE(fast.at(0, 0).margin == Catch::Approx(0.10 - 0.0604));
}

TEST_CASE("matrix: empty expertise list gives a zero-column matrix") {
    const auto m = opportunity_matrix({row("1111", 0.05)}, {});
    REQUIRE(m.rows.size() == 1);
    REQUIRE(m.cols.empty());
    REQUIRE(m.cells.empty());
}

TEST_CASE("matrix: preconditions and exclusions") {
    REQUIRE_THROWS_AS(opportunity_matrix({}, {}), ValidationError);
    REQUIRE_THROWS_AS(opportunity_matrix({row("1111", 0.05)}, {row("2222", 0.01, false)}),
                      ValidationError);

    const auto m = opportunity_matrix({row("1111", 0.05), row("9999", 0.2, false, false)},
                                      {row("5411", 0.0079, true)});
    REQUIRE(m.rows.size() == 1);
    REQUIRE_FALSE(m.notice.empty());
}

TEST_CASE("matrix: rows ordered by descending growth, columns by code") {
    const auto m = opportunity_matrix({row("2222", 0.01), row("1111", 0.07), row("3333", 0.04)},
                                      {row("5416", 0.03, true), row("5411", 0.008, true)});
    REQUIRE(m.rows[0].sector == "1111");
    REQUIRE(m.rows[1].sector == "3333");
    REQUIRE(m.rows[2].sector == "2222");
    REQUIRE(m.cols[0].sector == "5411");
    REQUIRE(m.cols[1].sector == "5416");
}

TEST_CASE("matrix export: one row per cell, verdicts coherent with margins") {
    const auto m = opportunity_matrix({row("1111", 0.07), row("2222", 0.01)},
                                      {row("5411", 0.008, true), row("5416", 0.03, true)});
    std::ostringstream os;
    write_matrix_csv(m, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "customer_sector,expertise_sector,verdict,margin");
    std::size_t cells = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_delimited(line, ',');
        REQUIRE(f.size() == 4);
        const double margin = std::stod(f[3]);
        REQUIRE((f[2] == "Growth") == (margin > 0.0));
        ++cells;
    }
    REQUIRE(cells == 4);
}

// ---------------------------------------------------------------------------
// heatmap
// ---------------------------------------------------------------------------

TEST_CASE("heatmap: single growth cell renders green") {
    const auto m = opportunity_matrix({row("3121", 0.10)}, {row("5411", 0.008, true)});
    std::ostringstream os;
    render_heatmap(m, os);
    const std::string svg = os.str();
    REQUIRE(svg.find("class=\"growth\"") != std::string::npos);
    REQUIRE(svg.find("class=\"consolidation\"") == std::string::npos);
    REQUIRE(svg.find("<title>3121 x 5411: margin") != std::string::npos);
    REQUIRE(svg.back() == '\n');
}

TEST_CASE("heatmap: full grid carries every cell and label") {
    std::vector<CalibratedSector> customers, expertises;
    for (int i = 0; i < 11; ++i) customers.push_back(row("1" + std::to_string(100 + i), 0.01 * i));
    for (int j = 0; j < 9; ++j) expertises.push_back(row("54" + std::to_string(11 + j), 0.01, true));
    const auto m = opportunity_matrix(customers, expertises);
    REQUIRE(m.cells.size() == 99);

    std::ostringstream os;
    render_heatmap(m, os);
    const std::string svg = os.str();
    std::size_t rects = 0;
    for (std::size_t pos = svg.find("<rect"); pos != std::string::npos;
         pos = svg.find("<rect", pos + 1))
        ++rects;
    REQUIRE(rects == 99);
    for (const auto& c : customers) REQUIRE(svg.find(">" + c.sector + "<") != std::string::npos);
    for (const auto& e : expertises) REQUIRE(svg.find(">" + e.sector + "<") != std::string::npos);
}

TEST_CASE("heatmap: byte-deterministic and strict on degenerate input") {
    const auto m = opportunity_matrix({row("1111", 0.05), row("2222", -0.01)},
                                      {row("5411", 0.008, true)});
    std::ostringstream a, b;
    render_heatmap(m, a);
    render_heatmap(m, b);
    REQUIRE(a.str() == b.str());

    const auto degenerate = opportunity_matrix({row("1111", 0.05)}, {});
    std::ostringstream os;
    REQUIRE_THROWS_AS(render_heatmap(degenerate, os), ValidationError);
}

// ---------------------------------------------------------------------------
// practice-count series
// ---------------------------------------------------------------------------

TEST_CASE("series: per-code points plus aggregate") {
    std::vector<BdsRecord> records;
    for (int y = 2000; y < 2003; ++y) {
        records.push_back({y, "5411", 100.0 + y - 2000, 1, 1, 10});
        records.push_back({y, "5412", 200.0, 1, 1, 10});
        records.push_back({y, "2111", 999.0, 1, 1, 10}); // not professional services
    }
    const auto points = psf_count_series(records);
    REQUIRE(points.size() == 9); // 2 codes x 3 years + 3 aggregate points

    double agg2001 = 0.0, sum2001 = 0.0;
    for (const auto& p : points) {
        if (p.year != 2001) continue;
        if (p.sector == "PSF_TOTAL")
            agg2001 = p.firm_count;
        else
            sum2001 += p.firm_count;
    }
    REQUIRE(agg2001 == Catch::Approx(sum2001));
}

TEST_CASE("series export and slope fit") {
    std::vector<SeriesPoint> points;
    for (int y = 2000; y <= 2010; ++y)
        points.push_back({y, "PSF_TOTAL", 1000.0 * std::exp(0.02 * (y - 2000))});
    const SlopeFit fit = series_log_slope(points, "PSF_TOTAL", 2000, 2010);
    REQUIRE(fit.slope == Catch::Approx(0.02).margin(1e-12));
    REQUIRE_THROWS_AS(series_log_slope(points, "none", 2000, 2010), InsufficientDataError);

    std::ostringstream os;
    write_series_csv(points, os);
    REQUIRE(os.str().rfind("year,sector,firms\n", 0) == 0);
    REQUIRE(os.str().back() == '\n');
}

// ---------------------------------------------------------------------------
// generic table export
// ---------------------------------------------------------------------------

TEST_CASE("empty calibration table exports as a header-only file") {
    CalibrationTable empty;
    empty.window = CalibrationWindow{2008, 2018};
    std::ostringstream os;
    write_calibration_csv(empty, os);
    REQUIRE(os.str() ==
            "sector,is_psf,usable,years_used,window_start,window_end,exit_rate,entry_rate,"
            "net_growth\n");
}

TEST_CASE("ranked export schema") {
    const auto t = table_of({row("1111", 0.05), row("2222", 0.01)});
    const RankedSectors top = rank_sectors(t, 2);
    std::ostringstream os;
    write_ranked_csv(top, os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "rank,sector,is_psf,net_growth,exit_rate,entry_rate");
    std::getline(in, line);
    REQUIRE(line.rfind("1,1111,0,", 0) == 0);
}
