#include <catch2/catch_amalgamated.hpp>

#include "psmkt/config.hpp"
#include "psmkt/flow.hpp"
#include "psmkt/params.hpp"
#include "psmkt/scenario_io.hpp"

using namespace psmkt;

namespace {
CustomerSectorParams good_customer() { return {0.08, 0.05, 0.06, 1.0, 0.1, 100.0}; }
ExpertiseParams good_expertise() { return {0.02, 0.05, 1.5, 1.0, 2.0, 3.0}; }
} // namespace

TEST_CASE("customer params validate within bounds") {
    REQUIRE_NOTHROW(validate(good_customer()));

    auto bad = good_customer();
    bad.mu = 1.2;
    REQUIRE_THROWS_MATCHES(validate(bad), ValidationError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("customer.mu out of [0,1]")));
}

TEST_CASE("expertise params validate within bounds") {
    REQUIRE_NOTHROW(validate(good_expertise()));

    auto bad = good_expertise();
    bad.theta = 0.0;
    REQUIRE_THROWS_MATCHES(validate(bad), ValidationError,
                           Catch::Matchers::MessageMatches(
                               Catch::Matchers::ContainsSubstring("theta must be > 0")));
}

TEST_CASE("validation reports every offending field") {
    auto bad = good_customer();
    bad.mu = -0.5;
    bad.f0 = 0.0;
    try {
        validate(bad);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("customer.mu") != std::string::npos);
        REQUIRE(msg.find("customer.f0") != std::string::npos);
    }
}

TEST_CASE("validation is idempotent") {
    const auto once = validate(good_customer());
    const auto twice = validate(once);
    REQUIRE(once.alpha == twice.alpha);
    REQUIRE(once.f0 == twice.f0);
}

TEST_CASE("net growth arithmetic") {
    CustomerSectorParams p{1e-9, 0.3, 0.0, 1.0, 0.1, 1.0};
    p.alpha = 1e-9;
    REQUIRE(net_growth(CustomerSectorParams{1e-9, 0.3, 0.0, 1.0, 0.1, 1.0}) ==
            Catch::Approx(0.0).margin(1e-9));
    REQUIRE(net_growth(CustomerSectorParams{0.5, 0.1, 0.04, 1.0, 0.1, 1.0}) == Catch::Approx(0.01));
    // Economy-wide calibrated magnitude.
    REQUIRE(net_growth(CustomerSectorParams{1.0, 0.0176, 0.01, 1.0, 0.1, 1.0}) ==
            Catch::Approx(0.0076));
}

TEST_CASE("net growth is linear in the failure rate") {
    auto p = good_customer();
    const double base = net_growth(p);
    for (double delta : {0.01, 0.1, 0.3}) {
        auto q = p;
        q.mu = p.mu + delta;
        REQUIRE(net_growth(q) == Catch::Approx(base - delta).epsilon(1e-12));
    }
}

TEST_CASE("regime verdict survives common time-unit rescaling") {
    auto c = good_customer();
    auto e = good_expertise();
    c.psi = 0.35;
    c.alpha = 0.9;
    const Regime base = Regime::from_margin(net_growth(c) - 2.0 * e.phi);
    for (double k : {0.1, 0.5, 2.0, 10.0}) {
        auto ck = c;
        auto ek = e;
        ck.psi *= k;
        ck.mu *= k;
        ek.phi *= k;
        const Regime scaled = Regime::from_margin(net_growth(ck) - 2.0 * ek.phi);
        REQUIRE(scaled.kind == base.kind);
    }
}

TEST_CASE("zero margin classifies as consolidation") {
    REQUIRE_FALSE(Regime::from_margin(0.0).is_growth());
    REQUIRE(Regime::from_margin(1e-15).is_growth());
}

TEST_CASE("entry flow series basics") {
    const auto flow = EntryFlowSeries::constant(2.5, 10.0, 0.5);
    REQUIRE(flow.covers(10.0));
    REQUIRE_FALSE(flow.covers(10.6));
    REQUIRE(flow.value_at(3.21) == Catch::Approx(2.5));
    REQUIRE_THROWS_AS(flow.value_at(11.0), FlowCoverageError);

    const auto ramp = EntryFlowSeries::from_function([](double t) { return t; }, 4.0, 1.0);
    REQUIRE(ramp.value_at(2.5) == Catch::Approx(2.5));

    REQUIRE_THROWS_AS(EntryFlowSeries(0.5, {1.0, -0.25}), ValidationError);
}

TEST_CASE("config parsing: comments, trimming, errors") {
    const auto cfg = KeyValueConfig::parse_string("# header\n a.b = 3.5 # trailing\n\nc.d=x\n");
    REQUIRE(cfg.get_double("a.b") == Catch::Approx(3.5));
    REQUIRE(cfg.get_string("c.d") == "x");
    REQUIRE(cfg.get_double("missing", 7.0) == 7.0);

    REQUIRE_THROWS_AS(KeyValueConfig::parse_string("a.b = 1\na.b = 2\n"), DataError);
    REQUIRE_THROWS_AS(KeyValueConfig::parse_string("just a line\n"), DataError);
    REQUIRE_THROWS_AS(cfg.get_double("c.d"), DataError);
}

TEST_CASE("scenario loading rejects unknown keys and bad enums") {
    const std::string base = "customer.alpha = 0.5\ncustomer.psi = 0.1\ncustomer.mu = 0.03\n"
                             "customer.nu = 0.1\ncustomer.f0 = 100\n"
                             "expertise.phi = 0.02\n"
                             "scenario.kind = customer\nscenario.horizon = 5\nscenario.dt = 0.05\n";
    REQUIRE_NOTHROW(scenario_from_config(KeyValueConfig::parse_string(base)));

    REQUIRE_THROWS_MATCHES(
        scenario_from_config(KeyValueConfig::parse_string(base + "scenario.tempo = 3\n")),
        DataError,
        Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("unknown config key")));
    REQUIRE_THROWS_AS(
        scenario_from_config(KeyValueConfig::parse_string(base + "scenario.entry_mode = fast\n")),
        DataError);
}

TEST_CASE("scenario bounds") {
    MarketScenario sc;
    sc.customer = good_customer();
    sc.expertise = good_expertise();
    sc.kind = ScenarioKind::Customer;
    sc.dt = 0.3;
    REQUIRE_THROWS_AS(validate(sc), ValidationError);
    sc.dt = 0.25;
    REQUIRE_NOTHROW(validate(sc));
}
