#pragma once

#include <cstdint>

#include "psmkt/errors.hpp"
#include "psmkt/params.hpp"

namespace psmkt {

/// How simulated entrants are drawn for customer populations.
/// Flux: Poisson mean alpha*psi*r_m*F(t)*dt, the boundary inflow implied by
/// the density boundary condition; reproduces the closed-form tail (CCDF
/// exponent alpha) and longitudinal rate alpha*psi - mu.
/// Prose: Poisson mean alpha*F(t)*dt, a per-firm entry count; yields rate
/// alpha - mu and CCDF tail alpha/psi instead.
enum class EntryRule { Flux, Prose };

enum class ScenarioKind { Customer, Psf, Coupled };

/// Everything a seeded run needs. Initial populations are drawn from the
/// self-similar size profile of the chosen entry rule, truncated at
/// entry_size * initial_r_max_factor.
struct MarketScenario {
    CustomerSectorParams customer;
    ExpertiseParams expertise;
    double horizon = 10.0; ///< years
    double dt = 0.05;      ///< years per step, at most 0.25
    std::uint64_t seed = 1;
    ScenarioKind kind = ScenarioKind::Coupled;
    EntryRule entry_rule = EntryRule::Flux;

    std::uint64_t initial_firms = 10000;  ///< customer-side starting count
    double initial_r_max_factor = 1e4;    ///< truncation of the initial size profile

    std::uint64_t psf_initial_firms = 0;  ///< practice-side starting count (coupled runs)
    double psf_initial_tail = 8.0;        ///< CCDF exponent of the initial practice profile
    double psf_initial_s_max_factor = 10.0;
    std::uint64_t psf_entry_per_step = 0; ///< constant entrant count for pure practice runs

    double burn_in = 0.0; ///< years excluded from fitted slopes
};

inline Regime scenario_regime(const MarketScenario& sc) {
    return Regime::from_margin(net_growth(sc.customer) - 2.0 * sc.expertise.phi);
}

/// Bounds checks plus parameter validation. A scenario with f0 == 0 is the
/// documented empty-demand case: the customer block is then not required to
/// validate and coupled runs record no-demand steps instead of prices.
inline MarketScenario validate(const MarketScenario& sc) {
    if (!(sc.horizon > 0.0)) throw ValidationError("scenario.horizon must be > 0");
    if (!(sc.dt > 0.0) || sc.dt > 0.25) throw ValidationError("scenario.dt out of (0, 0.25]");
    if (!(sc.burn_in >= 0.0) || sc.burn_in >= sc.horizon)
        throw ValidationError("scenario.burn_in out of [0, horizon)");
    if (sc.customer.f0 > 0.0) validate(sc.customer);
    if (sc.kind != ScenarioKind::Customer) {
        validate(sc.expertise);
        if (!(sc.psf_initial_tail > 1.0))
            throw ValidationError("scenario.psf_initial_tail must be > 1");
    }
    if (sc.kind == ScenarioKind::Coupled && sc.customer.f0 > 0.0) {
        const Regime regime = scenario_regime(sc);
        if (regime.margin < 0.0 && !(2.0 / sc.expertise.theta < sc.customer.alpha))
            throw RegimeError("scenario: consolidation reachable but 2/theta < alpha violated");
    }
    return sc;
}

} // namespace psmkt
