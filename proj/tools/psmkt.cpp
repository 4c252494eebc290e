// psmkt: command-line front end for the professional-services market toolkit.
// Subcommands: simulate, calibrate, report, validate.
// Exit codes: 0 success, 2 configuration error, 3 simulation failure,
// 4 data error, 5 validation failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "psmkt/analytic.hpp"
#include "psmkt/bds.hpp"
#include "psmkt/config.hpp"
#include "psmkt/report.hpp"
#include "psmkt/scenario_io.hpp"
#include "psmkt/simulate.hpp"
#include "psmkt/stats.hpp"
#include "psmkt/validation.hpp"

#ifndef PSMKT_DEFAULT_PRESET_DIR
#define PSMKT_DEFAULT_PRESET_DIR "presets"
#endif

namespace {

namespace fs = std::filesystem;
using namespace psmkt;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitData = 4;
constexpr int kExitValidation = 5;

struct CommonFlags {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<long long> seed;
    std::string data_path;
    std::string window;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path,
                    "key-value config file (defaults to $PSMKT_CONFIG when set)");
    cmd->add_option("--out", flags.out_dir, "output directory (created if missing)");
    cmd->add_option("--seed", flags.seed, "override the scenario seed");
    cmd->add_option("--data", flags.data_path, "input data file");
    cmd->add_option("--window", flags.window, "calibration window START:END (e.g. 2008:2018)");
    cmd->add_option("--format", flags.format, "structured export format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

/// defaults <- config file <- command-line flags, in that order.
KeyValueConfig resolve_config(const CommonFlags& flags) {
    std::string path = flags.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("PSMKT_CONFIG")) path = env;
    }
    if (path.empty()) return KeyValueConfig::parse_string("");
    return KeyValueConfig::parse_file(path);
}

std::string preset_dir() {
    if (const char* env = std::getenv("PSMKT_PRESET_DIR")) return env;
    return PSMKT_DEFAULT_PRESET_DIR;
}

CalibrationWindow parse_window(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw DataError("--window expects START:END, got '" + text + "'");
    CalibrationWindow win;
    try {
        win.start_year = std::stoi(text.substr(0, colon));
        win.end_year = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw DataError("--window expects START:END, got '" + text + "'");
    }
    if (win.end_year < win.start_year)
        throw DataError("--window end before start: '" + text + "'");
    return win;
}

std::ofstream open_output(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw DataError("cannot write output file: " + (dir / name).string());
    return os;
}

std::set<std::string> calibration_config_keys() {
    return {"calibration.window_start", "calibration.window_end", "calibration.psf_codes",
            "calibration.data",         "bds.delimiter",          "bds.column.year",
            "bds.column.sector",        "bds.column.firms",       "bds.column.entrants",
            "bds.column.exits",         "bds.column.employment"};
}

// -------------------------------------------------------------------------
// simulate
// -------------------------------------------------------------------------

int cmd_simulate(const CommonFlags& flags, const std::string& preset) {
    MarketScenario sc;
    try {
        KeyValueConfig cfg = [&] {
            if (!preset.empty()) {
                const fs::path path = fs::path(preset_dir()) / (preset + ".conf");
                return KeyValueConfig::parse_file(path.string());
            }
            return resolve_config(flags);
        }();
        sc = scenario_from_config(cfg);
        if (flags.seed) sc.seed = static_cast<std::uint64_t>(*flags.seed);
    } catch (const std::exception& e) {
        std::cerr << "psmkt simulate: configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        SimResult res;
        switch (sc.kind) {
        case ScenarioKind::Customer:
            res = simulate_customer_population(sc.customer, sc);
            break;
        case ScenarioKind::Psf: {
            const std::size_t steps = static_cast<std::size_t>(std::llround(sc.horizon / sc.dt));
            const std::vector<std::uint64_t> entries(steps, sc.psf_entry_per_step);
            FirmPopulation initial;
            initial.entry_size = sc.expertise.s_m;
            Rng rng(sc.seed, 7);
            for (std::uint64_t i = 0; i < sc.psf_initial_firms; ++i)
                initial.sizes.push_back(rng.truncated_pareto(sc.psf_initial_tail, sc.expertise.s_m,
                                                             sc.expertise.s_m * sc.psf_initial_s_max_factor));
            res = simulate_psf_population(sc.expertise, entries, sc.horizon, sc.dt, sc.seed,
                                          std::move(initial));
            break;
        }
        case ScenarioKind::Coupled:
            res = simulate_coupled_market(sc);
            break;
        }

        std::ostringstream summary;
        summary << "scenario: kind="
                << (sc.kind == ScenarioKind::Customer
                        ? "customer"
                        : sc.kind == ScenarioKind::Psf ? "psf" : "coupled")
                << " seed=" << sc.seed << " horizon=" << format_number(sc.horizon)
                << " dt=" << format_number(sc.dt) << "\n";
        const auto& last = res.trajectory.steps.back();
        summary << "final: t=" << format_number(last.t) << " count=" << last.count
                << " total_size=" << format_number(last.total_size) << "\n";
        summary << "cumulative: entries=" << res.population.cum_entries
                << " exits=" << res.population.cum_exits << "\n";
        if (res.trajectory.extinct)
            summary << "population extinct at t=" << format_number(res.trajectory.extinction_time)
                    << "\n";

        try {
            const SlopeFit fit = fit_growth_rate(res.trajectory, sc.burn_in);
            summary << "fitted count growth rate: " << format_number(fit.slope) << " (se "
                    << format_number(fit.std_error) << ")\n";
        } catch (const SampleError&) {
            summary << "fitted count growth rate: n/a\n";
        }
        try {
            const TailFit tail = hill_tail_exponent(res.population.sizes);
            summary << "fitted tail exponent (CCDF): " << format_number(tail.exponent) << " (se "
                    << format_number(tail.std_error) << ")\n";
        } catch (const SampleError&) {
            summary << "fitted tail exponent (CCDF): n/a\n";
        }
        if (sc.kind == ScenarioKind::Coupled) {
            const Regime regime = scenario_regime(sc);
            summary << "regime margin: " << format_number(regime.margin) << " ("
                    << to_string(regime.kind) << ")\n";
            try {
                const SlopeFit price = fit_price_slope(res.trajectory, sc.burn_in);
                summary << "fitted price slope: " << format_number(price.slope) << " (se "
                        << format_number(price.std_error) << ")\n";
            } catch (const SampleError&) {
                summary << "fitted price slope: n/a\n";
            }
            if (!regime.is_growth() && 2.0 / sc.expertise.theta < sc.customer.alpha) {
                const ConsolidationPath path =
                    consolidation_path(sc.customer, sc.expertise, sc.horizon, sc.dt);
                summary << "closed-form price slope: " << format_number(path.price_rate) << "\n";
            }
        }

        auto traj_os = open_output(flags.out_dir, "trajectory.csv");
        res.trajectory.write_delimited(traj_os);
        auto sum_os = open_output(flags.out_dir, "summary.txt");
        sum_os << summary.str();
        std::cout << summary.str();
        return kExitOk;
    } catch (const SimulationError& e) {
        std::cerr << "psmkt simulate: simulation failure: " << e.what() << "\n";
        return kExitSimulation;
    } catch (const std::exception& e) {
        std::cerr << "psmkt simulate: " << e.what() << "\n";
        return kExitSimulation;
    }
}

// -------------------------------------------------------------------------
// calibrate
// -------------------------------------------------------------------------

struct CalibrationInputs {
    std::string data_path;
    CalibrationWindow window;
    std::set<std::string> psf_codes = default_psf_codes();
    BdsColumnMap columns;
    BdsParseOptions parse_opts;
};

CalibrationInputs resolve_calibration(const CommonFlags& flags) {
    const KeyValueConfig cfg = resolve_config(flags);
    std::set<std::string> allowed = calibration_config_keys();
    for (const auto& k : scenario_config_keys()) allowed.insert(k);
    cfg.require_known(allowed);

    CalibrationInputs in;
    in.window.start_year = static_cast<int>(cfg.get_int("calibration.window_start", 2008));
    in.window.end_year = static_cast<int>(cfg.get_int("calibration.window_end", 2018));
    if (!flags.window.empty()) in.window = parse_window(flags.window);
    if (in.window.end_year < in.window.start_year)
        throw DataError("calibration window end before start");

    if (cfg.has("calibration.psf_codes")) {
        in.psf_codes.clear();
        std::istringstream list(cfg.get_string("calibration.psf_codes"));
        std::string code;
        while (std::getline(list, code, ',')) {
            code = psmkt::detail::trim(code);
            if (!code.empty()) in.psf_codes.insert(code);
        }
    }
    in.columns.year = cfg.get_string("bds.column.year", in.columns.year);
    in.columns.sector = cfg.get_string("bds.column.sector", in.columns.sector);
    in.columns.firms = cfg.get_string("bds.column.firms", in.columns.firms);
    in.columns.entrants = cfg.get_string("bds.column.entrants", in.columns.entrants);
    in.columns.exits = cfg.get_string("bds.column.exits", in.columns.exits);
    in.columns.employment = cfg.get_string("bds.column.employment", in.columns.employment);
    const std::string delim = cfg.get_string("bds.delimiter", ",");
    if (delim.size() != 1) throw DataError("bds.delimiter must be a single character");
    in.parse_opts.delim = delim[0];

    in.data_path = cfg.get_string("calibration.data", "");
    if (!flags.data_path.empty()) in.data_path = flags.data_path;
    if (in.data_path.empty()) throw DataError("calibrate needs --data (or calibration.data)");
    return in;
}

int cmd_calibrate(const CommonFlags& flags) {
    CalibrationInputs in;
    try {
        in = resolve_calibration(flags);
    } catch (const std::exception& e) {
        std::cerr << "psmkt calibrate: configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        std::ifstream data(in.data_path);
        if (!data) {
            std::cerr << "psmkt calibrate: cannot read data file: " << in.data_path << "\n";
            return kExitData;
        }
        const auto [records, report] = parse_bds(data, in.columns, in.parse_opts);
        const CalibrationTable table = calibrate_all(records, in.window, in.psf_codes);

        auto csv_os = open_output(flags.out_dir, "calibration.csv");
        write_calibration_csv(table, csv_os);
        auto json_os = open_output(flags.out_dir, "calibration.json");
        write_calibration_json(table, json_os);

        std::size_t unusable = 0;
        for (const auto& s : table.sectors)
            if (!s.usable) ++unusable;
        std::cout << "calibrated " << table.sectors.size() << " sectors over "
                  << in.window.start_year << ":" << in.window.end_year << " (" << unusable
                  << " unusable)\n"
                  << "rows read " << report.rows_read << ", dropped " << report.rows_dropped
                  << " (suppressed/missing), flagged " << report.rows_flagged
                  << " (exits above firm count)\n";
        return kExitOk;
    } catch (const DataError& e) {
        std::cerr << "psmkt calibrate: data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "psmkt calibrate: " << e.what() << "\n";
        return kExitData;
    }
}

// -------------------------------------------------------------------------
// report
// -------------------------------------------------------------------------

int cmd_report(const CommonFlags& flags, const std::string& calibration_path, int top_k,
               bool exclude_psf_rows) {
    CalibrationInputs in;
    bool have_raw = false;
    try {
        if (!flags.data_path.empty() || !flags.config_path.empty() || std::getenv("PSMKT_CONFIG")) {
            try {
                in = resolve_calibration(flags);
                have_raw = !in.data_path.empty();
            } catch (const DataError&) {
                if (calibration_path.empty()) throw;
            }
        }
        if (!have_raw && calibration_path.empty())
            throw DataError("report needs --data (raw table) or --calibration (calibrated table)");
    } catch (const std::exception& e) {
        std::cerr << "psmkt report: configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        CalibrationTable table;
        std::vector<BdsRecord> records;
        std::set<std::string> psf_codes = default_psf_codes();
        if (have_raw) {
            std::ifstream data(in.data_path);
            if (!data) {
                std::cerr << "psmkt report: cannot read data file: " << in.data_path << "\n";
                return kExitData;
            }
            auto parsed = parse_bds(data, in.columns, in.parse_opts);
            records = std::move(parsed.first);
            table = calibrate_all(records, in.window, in.psf_codes);
            psf_codes = in.psf_codes;
        } else {
            std::ifstream tab(calibration_path);
            if (!tab) {
                std::cerr << "psmkt report: cannot read calibration table: " << calibration_path
                          << "\n";
                return kExitData;
            }
            table = read_calibration_csv(tab);
        }

        std::set<std::string> exclude;
        if (exclude_psf_rows)
            for (const auto& s : table.sectors)
                if (s.is_psf) exclude.insert(s.sector);
        const RankedSectors ranked = rank_sectors(table, static_cast<std::size_t>(top_k), exclude);
        if (!ranked.notice.empty()) std::cout << "notice: " << ranked.notice << "\n";

        std::vector<CalibratedSector> expertises;
        for (const auto& s : table.sectors)
            if (s.is_psf && s.usable) expertises.push_back(s);

        const OpportunityMatrix matrix = opportunity_matrix(ranked.rows, expertises);
        if (!matrix.notice.empty()) std::cout << "notice: " << matrix.notice << "\n";

        auto ranked_os = open_output(flags.out_dir, "ranked_sectors.csv");
        write_ranked_csv(ranked, ranked_os);
        if (flags.format == "json") {
            auto m_os = open_output(flags.out_dir, "opportunity_matrix.json");
            write_matrix_json(matrix, m_os);
        } else {
            auto m_os = open_output(flags.out_dir, "opportunity_matrix.csv");
            write_matrix_csv(matrix, m_os);
        }
        render_heatmap_file(matrix, (fs::path(flags.out_dir) / "heatmap.svg").string());
        auto series_os = open_output(flags.out_dir, "psf_series.csv");
        write_series_csv(psf_count_series(records, psf_codes), series_os);

        std::cout << "report written: ranked_sectors, opportunity_matrix (" << matrix.rows.size()
                  << "x" << matrix.cols.size() << "), heatmap.svg, psf_series\n";
        return kExitOk;
    } catch (const DataError& e) {
        std::cerr << "psmkt report: data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "psmkt report: " << e.what() << "\n";
        return kExitData;
    }
}

// -------------------------------------------------------------------------
// validate
// -------------------------------------------------------------------------

int cmd_validate(const CommonFlags& flags, bool quick) {
    try {
        if (!flags.config_path.empty() || std::getenv("PSMKT_CONFIG")) {
            // The checks run pinned parameter sets; a config file passed here
            // is still parsed and key-checked so typos fail loudly.
            const KeyValueConfig cfg = resolve_config(flags);
            std::set<std::string> allowed = calibration_config_keys();
            for (const auto& k : scenario_config_keys()) allowed.insert(k);
            cfg.require_known(allowed);
        }
    } catch (const std::exception& e) {
        std::cerr << "psmkt validate: configuration error: " << e.what() << "\n";
        return kExitConfig;
    }

    const std::vector<checks::CheckResult> results = checks::run_all(quick);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "validate: all checks passed\n" : "validate: checks failed\n");
    return all_pass ? kExitOk : kExitValidation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"psmkt: professional-services market dynamics toolkit"};
    app.require_subcommand(1);

    CommonFlags sim_flags, cal_flags, rep_flags, val_flags;
    std::string preset, calibration_path;
    int top_k = 10;
    bool quick = false, exclude_psf_rows = false;

    CLI::App* sim = app.add_subcommand("simulate", "run a seeded market simulation");
    add_common(sim, sim_flags);
    sim->add_option("--preset", preset, "named preset from the preset directory");

    CLI::App* cal = app.add_subcommand("calibrate", "estimate sector rates from a BDS-style table");
    add_common(cal, cal_flags);

    CLI::App* rep = app.add_subcommand("report", "rank sectors and render the opportunity heatmap");
    add_common(rep, rep_flags);
    rep->add_option("--calibration", calibration_path, "calibration table from a previous run");
    rep->add_option("--top-k", top_k, "number of customer sectors to rank")->check(CLI::PositiveNumber);
    rep->add_flag("--exclude-psf-rows", exclude_psf_rows,
                  "drop professional-services sectors from the customer rows");

    CLI::App* val = app.add_subcommand("validate", "run the closed-form vs simulation cross-checks");
    add_common(val, val_flags);
    val->add_flag("--quick", quick, "reduced-scale checks (seconds instead of minutes)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    if (sim->parsed()) return cmd_simulate(sim_flags, preset);
    if (cal->parsed()) return cmd_calibrate(cal_flags);
    if (rep->parsed()) return cmd_report(rep_flags, calibration_path, top_k, exclude_psf_rows);
    if (val->parsed()) return cmd_validate(val_flags, quick);
    return kExitConfig;
}
