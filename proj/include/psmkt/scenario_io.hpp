#pragma once

#include <set>
#include <string>

#include "psmkt/config.hpp"
#include "psmkt/scenario.hpp"

namespace psmkt {

inline const std::set<std::string>& scenario_config_keys() {
    static const std::set<std::string> keys = {
        "customer.alpha", "customer.psi", "customer.mu", "customer.r_m", "customer.nu",
        "customer.f0",
        "expertise.phi", "expertise.rho", "expertise.theta", "expertise.s_m", "expertise.c_m",
        "expertise.n",
        "scenario.kind", "scenario.horizon", "scenario.dt", "scenario.seed",
        "scenario.entry_mode", "scenario.initial_firms", "scenario.initial_r_max_factor",
        "scenario.psf_initial_firms", "scenario.psf_initial_tail",
        "scenario.psf_initial_s_max_factor", "scenario.psf_entry_per_step", "scenario.burn_in",
    };
    return keys;
}

/// Builds a validated scenario from a config block. Every key is listed in
/// scenario_config_keys(); anything else in the file is an error. The kind,
/// horizon and dt keys are always required, the customer block whenever the
/// run has a demand side and the expertise block whenever it has practices.
inline MarketScenario scenario_from_config(const KeyValueConfig& cfg) {
    cfg.require_known(scenario_config_keys());
    MarketScenario sc;

    const std::string kind = cfg.get_string("scenario.kind");
    if (kind == "customer")
        sc.kind = ScenarioKind::Customer;
    else if (kind == "psf")
        sc.kind = ScenarioKind::Psf;
    else if (kind == "coupled")
        sc.kind = ScenarioKind::Coupled;
    else
        throw DataError("scenario.kind must be customer, psf or coupled (got '" + kind + "')");

    if (sc.kind != ScenarioKind::Psf) {
        sc.customer.alpha = cfg.get_double("customer.alpha");
        sc.customer.psi = cfg.get_double("customer.psi");
        sc.customer.mu = cfg.get_double("customer.mu");
        sc.customer.r_m = cfg.get_double("customer.r_m", sc.customer.r_m);
        sc.customer.nu = cfg.get_double("customer.nu");
        sc.customer.f0 = cfg.get_double("customer.f0");
    }
    if (sc.kind != ScenarioKind::Customer) {
        sc.expertise.phi = cfg.get_double("expertise.phi");
        sc.expertise.rho = cfg.get_double("expertise.rho");
        sc.expertise.theta = cfg.get_double("expertise.theta");
        sc.expertise.s_m = cfg.get_double("expertise.s_m");
        sc.expertise.c_m = cfg.get_double("expertise.c_m");
        sc.expertise.n = cfg.get_double("expertise.n");
    }

    const std::string mode = cfg.get_string("scenario.entry_mode", "flux");
    if (mode == "flux")
        sc.entry_rule = EntryRule::Flux;
    else if (mode == "prose")
        sc.entry_rule = EntryRule::Prose;
    else
        throw DataError("scenario.entry_mode must be flux or prose (got '" + mode + "')");

    sc.horizon = cfg.get_double("scenario.horizon");
    sc.dt = cfg.get_double("scenario.dt");
    sc.seed = static_cast<std::uint64_t>(cfg.get_int("scenario.seed", static_cast<long long>(sc.seed)));
    sc.initial_firms =
        static_cast<std::uint64_t>(cfg.get_int("scenario.initial_firms", static_cast<long long>(sc.initial_firms)));
    sc.initial_r_max_factor = cfg.get_double("scenario.initial_r_max_factor", sc.initial_r_max_factor);
    sc.psf_initial_firms = static_cast<std::uint64_t>(
        cfg.get_int("scenario.psf_initial_firms", static_cast<long long>(sc.psf_initial_firms)));
    sc.psf_initial_tail = cfg.get_double("scenario.psf_initial_tail", sc.psf_initial_tail);
    sc.psf_initial_s_max_factor =
        cfg.get_double("scenario.psf_initial_s_max_factor", sc.psf_initial_s_max_factor);
    sc.psf_entry_per_step = static_cast<std::uint64_t>(
        cfg.get_int("scenario.psf_entry_per_step", static_cast<long long>(sc.psf_entry_per_step)));
    sc.burn_in = cfg.get_double("scenario.burn_in", sc.burn_in);

    return validate(sc);
}

} // namespace psmkt
