#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "psmkt/bds.hpp"
#include "psmkt/report.hpp"
#include "psmkt/simulate.hpp"

using namespace psmkt;

namespace {

BdsRecord rec(int year, const std::string& sector, double firms, double entrants, double exits,
              double emp) {
    return BdsRecord{year, sector, firms, entrants, exits, emp};
}

std::vector<BdsRecord> fixture_records() {
    std::ifstream in(std::string(PSMKT_TEST_DATA_DIR) + "/bds_fixture.csv");
    REQUIRE(in.good());
    return parse_bds(in).first;
}

const CalibrationWindow kWindow{2008, 2018};

} // namespace

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

TEST_CASE("parse: minimal two-row table") {
    std::istringstream in("year,vcnaics4,firms,estabs_entry,firmdeath_firms,emp\n"
                          "2010,5411,100,5,4,2000\n"
                          "2011,5411,101,6,3,2050\n");
    const auto [records, report] = parse_bds(in);
    REQUIRE(records.size() == 2);
    REQUIRE(report.rows_dropped == 0);
    REQUIRE(records[0].year == 2010);
    REQUIRE(records[0].sector == "5411");
    REQUIRE(records[1].num_exits == 3.0);
    REQUIRE(records[1].employment == 2050.0);
}

TEST_CASE("parse: suppressed cells drop the row with a warning count") {
    std::istringstream in("year,vcnaics4,firms,estabs_entry,firmdeath_firms,emp\n"
                          "2010,5411,100,5,4,\n"
                          "2011,5411,101,6,3,(D)\n"
                          "2012,5411,103,6,3,2100\n");
    const auto [records, report] = parse_bds(in);
    REQUIRE(records.size() == 1);
    REQUIRE(report.rows_dropped == 2);
}

TEST_CASE("parse: bundled fixture has exactly 44 records with checked values") {
    const auto records = fixture_records();
    REQUIRE(records.size() == 44);
    // Spot checks against the authored table.
    const auto find = [&](const std::string& code, int year) {
        for (const auto& r : records)
            if (r.sector == code && r.year == year) return r;
        FAIL("record not found");
        return BdsRecord{};
    };
    REQUIRE(find("5411", 2008).num_firms == 2000.0);
    REQUIRE(find("5411", 2018).num_exits == 83.0);
    REQUIRE(find("2111", 2008).employment == 500000.0);
    REQUIRE(find("2111", 2018).num_firms == 1150.0);
    REQUIRE(find("3121", 2010).num_entrants == 88.0);
}

TEST_CASE("parse: structural errors") {
    std::istringstream dup("year,vcnaics4,firms,estabs_entry,firmdeath_firms,emp\n"
                           "2010,5411,100,5,4,2000\n"
                           "2010,5411,90,5,4,2000\n");
    REQUIRE_THROWS_MATCHES(parse_bds(dup), DataError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("duplicate (sector, year)")));

    std::istringstream missing("year,naics,firms,estabs_entry,firmdeath_firms,emp\n");
    REQUIRE_THROWS_MATCHES(parse_bds(missing), DataError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("missing mapped column")));

    std::istringstream bad_year("year,vcnaics4,firms,estabs_entry,firmdeath_firms,emp\n"
                                "20x0,5411,100,5,4,2000\n");
    REQUIRE_THROWS_MATCHES(parse_bds(bad_year), DataError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("unparseable year")));
}

TEST_CASE("parse: exits above the firm count are flagged, not rejected") {
    std::istringstream in("year,vcnaics4,firms,estabs_entry,firmdeath_firms,emp\n"
                          "2010,5411,100,5,120,2000\n");
    const auto [records, report] = parse_bds(in);
    REQUIRE(records.size() == 1);
    REQUIRE(report.rows_flagged == 1);
}

TEST_CASE("parse: custom column map and delimiter") {
    BdsColumnMap map;
    map.sector = "naics";
    map.exits = "deaths";
    BdsParseOptions opts;
    opts.delim = ';';
    std::istringstream in("year;naics;firms;estabs_entry;deaths;emp\n"
                          "2010;5411;100;5;4;2000\n");
    const auto [records, report] = parse_bds(in, map, opts);
    REQUIRE(records.size() == 1);
    REQUIRE(records[0].num_exits == 4.0);
}

// ---------------------------------------------------------------------------
// estimators
// ---------------------------------------------------------------------------

TEST_CASE("exit rate: mean of yearly ratios") {
    std::vector<BdsRecord> recs = {
        rec(2008, "x", 1000, 10, 40, 100), // 0.04
        rec(2009, "x", 1000, 10, 50, 100), // 0.05
        rec(2010, "x", 1000, 10, 60, 100), // 0.06
    };
    REQUIRE(estimate_exit_rate(recs, kWindow).value == Catch::Approx(0.05));

    std::vector<BdsRecord> quiet = {
        rec(2008, "x", 1000, 10, 0, 100),
        rec(2009, "x", 1000, 10, 0, 100),
        rec(2010, "x", 1000, 10, 0, 100),
    };
    REQUIRE(estimate_exit_rate(quiet, kWindow).value == 0.0);

    std::vector<BdsRecord> thin = {rec(2008, "x", 1000, 10, 40, 100),
                                   rec(2009, "x", 1000, 10, 50, 100)};
    REQUIRE_THROWS_AS(estimate_exit_rate(thin, kWindow), InsufficientDataError);
}

TEST_CASE("entry rate: mean of yearly ratios with data guards") {
    std::vector<BdsRecord> recs = {
        rec(2008, "x", 1000, 80, 1, 100),  // 0.08
        rec(2009, "x", 1000, 100, 1, 100), // 0.10
        rec(2010, "x", 1000, 120, 1, 100), // 0.12
    };
    REQUIRE(estimate_entry_rate(recs, kWindow).value == Catch::Approx(0.10));

    std::vector<BdsRecord> two = {rec(2008, "x", 1000, 100, 1, 100),
                                  rec(2009, "x", 1000, 120, 1, 100)};
    REQUIRE_THROWS_AS(estimate_entry_rate(two, kWindow), InsufficientDataError);
}

TEST_CASE("window shorter than four years never yields estimates") {
    std::vector<BdsRecord> recs = {
        rec(2008, "x", 1000, 10, 40, 100),
        rec(2009, "x", 1000, 10, 50, 100),
        rec(2010, "x", 1000, 10, 60, 100),
    };
    REQUIRE_THROWS_AS(estimate_exit_rate(recs, CalibrationWindow{2008, 2009}),
                      InsufficientDataError);
}

TEST_CASE("net growth: mean of employment year-pairs") {
    std::vector<BdsRecord> flat = {
        rec(2008, "x", 10, 1, 1, 5000), rec(2009, "x", 10, 1, 1, 5000),
        rec(2010, "x", 10, 1, 1, 5000), rec(2011, "x", 10, 1, 1, 5000),
    };
    REQUIRE(estimate_net_growth(flat, kWindow).value == 0.0);

    std::vector<BdsRecord> doubling = {
        rec(2008, "x", 10, 1, 1, 1000), rec(2009, "x", 10, 1, 1, 2000),
        rec(2010, "x", 10, 1, 1, 4000), rec(2011, "x", 10, 1, 1, 8000),
    };
    REQUIRE(estimate_net_growth(doubling, kWindow).value == Catch::Approx(1.0));

    // A zero employment denominator skips the pair; two usable pairs left
    // is not enough.
    std::vector<BdsRecord> holed = {
        rec(2008, "x", 10, 1, 1, 1000), rec(2009, "x", 10, 1, 1, 0),
        rec(2010, "x", 10, 1, 1, 4000), rec(2011, "x", 10, 1, 1, 8000),
    };
    REQUIRE_THROWS_AS(estimate_net_growth(holed, kWindow), InsufficientDataError);
}

TEST_CASE("literal training-speed formula is kept but quarantined") {
    // dE/E = 0.02, entrants/firms = 0.1, exits/entrants = 0.5 each year.
    std::vector<BdsRecord> recs;
    double emp = 100000;
    for (int y = 2008; y <= 2011; ++y) {
        recs.push_back(rec(y, "x", 1000, 100, 50, emp));
        emp *= 1.02;
    }
    const RateEstimate lit = estimate_training_speed_literal(recs, kWindow);
    REQUIRE(lit.value == Catch::Approx(0.502).epsilon(1e-9));

    // No exits and flat employment: the formula collapses to zero.
    std::vector<BdsRecord> zero;
    for (int y = 2008; y <= 2011; ++y) zero.push_back(rec(y, "x", 1000, 100, 0, 5000));
    REQUIRE(estimate_training_speed_literal(zero, kWindow).value == 0.0);

    std::vector<BdsRecord> no_entry;
    for (int y = 2008; y <= 2011; ++y) no_entry.push_back(rec(y, "x", 1000, 0, 10, 5000));
    REQUIRE_THROWS_AS(estimate_training_speed_literal(no_entry, kWindow), InsufficientDataError);

    // On realistic counts the order-one exits/entrants term dwarfs the
    // employment-growth proxy by far more than a factor of ten.
    const auto records = fixture_records();
    std::vector<BdsRecord> psf;
    for (const auto& r : records)
        if (r.sector == "5411") psf.push_back(r);
    const double literal = estimate_training_speed_literal(psf, kWindow).value;
    const double proxy = estimate_net_growth(psf, kWindow).value;
    REQUIRE(std::abs(literal / proxy) > 10.0);
}

TEST_CASE("estimators ignore input row order") {
    auto records = fixture_records();
    std::vector<BdsRecord> psf;
    for (const auto& r : records)
        if (r.sector == "5411") psf.push_back(r);
    const double base = estimate_exit_rate(psf, kWindow).value;
    std::mt19937 shuffler(99);
    for (int i = 0; i < 5; ++i) {
        std::shuffle(psf.begin(), psf.end(), shuffler);
        REQUIRE(estimate_exit_rate(psf, kWindow).value == base);
    }
}

TEST_CASE("dropping one year moves the observation count by exactly one") {
    auto records = fixture_records();
    std::vector<BdsRecord> psf;
    for (const auto& r : records)
        if (r.sector == "5411") psf.push_back(r);
    const RateEstimate full = estimate_exit_rate(psf, kWindow);
    psf.erase(std::remove_if(psf.begin(), psf.end(),
                             [](const BdsRecord& r) { return r.year == 2012; }),
              psf.end());
    const RateEstimate dropped = estimate_exit_rate(psf, kWindow);
    REQUIRE(full.observations == dropped.observations + 1);
}

// ---------------------------------------------------------------------------
// whole-table calibration
// ---------------------------------------------------------------------------

TEST_CASE("calibrate_all over the bundled fixture") {
    const auto records = fixture_records();
    const CalibrationTable table = calibrate_all(records, kWindow);
    REQUIRE(table.sectors.size() == 4);
    std::size_t psf_rows = 0;
    for (const auto& s : table.sectors) {
        REQUIRE(s.usable);
        REQUIRE(s.years_used == 11);
        psf_rows += s.is_psf ? 1 : 0;
    }
    REQUIRE(psf_rows == 1);
    // Deterministic code-ascending order.
    REQUIRE(table.sectors.front().sector == "2111");
    REQUIRE(table.sectors.back().sector == "5411");
    REQUIRE(table.sectors.back().exit_rate == Catch::Approx(0.0415));
}

TEST_CASE("calibrate_all: empty input and unusable sectors") {
    REQUIRE(calibrate_all({}, kWindow).sectors.empty());

    std::vector<BdsRecord> thin = {rec(2008, "9999", 10, 1, 1, 100),
                                   rec(2009, "9999", 10, 1, 1, 100)};
    const CalibrationTable table = calibrate_all(thin, kWindow);
    REQUIRE(table.sectors.size() == 1);
    REQUIRE_FALSE(table.sectors[0].usable);
    REQUIRE(std::isnan(table.sectors[0].exit_rate));
}

TEST_CASE("economy aggregate sums counts per year") {
    const auto records = fixture_records();
    const auto agg = aggregate_sectors(records);
    REQUIRE(agg.size() == 11);
    REQUIRE(agg.front().sector == "ALL");
    REQUIRE(agg.front().num_firms == Catch::Approx(2000 + 1000 + 800 + 1500));
    REQUIRE(agg.front().employment == Catch::Approx(1000000 + 500000 + 200000 + 800000));
}

TEST_CASE("net growth recovers the simulated population rate") {
    // Synthetic sector: employment is the simulated total firm size.
    std::vector<double> estimates;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MarketScenario sc;
        sc.customer = {1.2, 0.1, 0.07, 1.0, 0.1, 100.0}; // g = 0.05
        sc.kind = ScenarioKind::Customer;
        sc.horizon = 12.0;
        sc.dt = 0.05;
        sc.seed = 800 + seed;
        sc.initial_firms = 5000;
        const SimResult res = simulate_customer_population(sc.customer, sc);

        std::vector<BdsRecord> synthetic;
        for (int year = 0; year <= 12; ++year) {
            const auto idx = static_cast<std::size_t>(std::llround(year / sc.dt));
            const auto& step = res.trajectory.steps[idx];
            synthetic.push_back(rec(2000 + year, "sim", static_cast<double>(step.count), 0, 0,
                                    step.total_size));
        }
        estimates.push_back(estimate_net_growth(synthetic, CalibrationWindow{2000, 2012}).value);
    }
    const double m = mean(estimates);
    REQUIRE(std::abs(m - 0.05) <= 0.20 * 0.05);
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

TEST_CASE("calibration table round-trips through csv") {
    const CalibrationTable table = calibrate_all(fixture_records(), kWindow);
    std::ostringstream os;
    write_calibration_csv(table, os);
    REQUIRE(os.str().back() == '\n');

    std::istringstream in(os.str());
    const CalibrationTable back = read_calibration_csv(in);
    REQUIRE(back.sectors.size() == table.sectors.size());
    REQUIRE(back.window.start_year == table.window.start_year);
    for (std::size_t i = 0; i < table.sectors.size(); ++i) {
        REQUIRE(back.sectors[i].sector == table.sectors[i].sector);
        REQUIRE(back.sectors[i].is_psf == table.sectors[i].is_psf);
        REQUIRE(back.sectors[i].exit_rate == Catch::Approx(table.sectors[i].exit_rate));
        REQUIRE(back.sectors[i].net_growth == Catch::Approx(table.sectors[i].net_growth));
    }
}

TEST_CASE("calibration table matches the independently authored golden file") {
    const CalibrationTable table = calibrate_all(fixture_records(), kWindow);
    std::ostringstream os;
    write_calibration_csv(table, os);
    const std::string golden = slurp_file(std::string(PSMKT_TEST_DATA_DIR) +
                                          "/calibration_golden.csv");
    REQUIRE(os.str() == golden);
}

TEST_CASE("calibration json export carries the same rates") {
    const CalibrationTable table = calibrate_all(fixture_records(), kWindow);
    std::ostringstream os;
    write_calibration_json(table, os);
    const auto doc = nlohmann::json::parse(os.str());
    REQUIRE(doc["window"]["start_year"] == 2008);
    REQUIRE(doc["sectors"].size() == 4);
    REQUIRE(doc["sectors"][3]["sector"] == "5411");
    REQUIRE(doc["sectors"][3]["exit_rate"].get<double>() == Catch::Approx(0.0415));
}
