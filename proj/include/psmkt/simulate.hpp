#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "psmkt/analytic.hpp"
#include "psmkt/population.hpp"
#include "psmkt/rng.hpp"
#include "psmkt/scenario.hpp"

namespace psmkt {

struct SimResult {
    SimTrajectory trajectory;
    FirmPopulation population;
};

namespace detail {

inline std::size_t step_count(double horizon, double dt) {
    return static_cast<std::size_t>(std::llround(horizon / dt));
}

inline StepRecord snapshot(const FirmPopulation& pop) {
    StepRecord rec;
    rec.t = pop.t;
    rec.count = pop.count();
    rec.total_size = pop.total_size();
    if (!pop.sizes.empty())
        rec.min_size = *std::min_element(pop.sizes.begin(), pop.sizes.end());
    return rec;
}

/// Removes each firm with probability 1 - exp(-rate*dt) and multiplies the
/// survivors by the growth factor. Returns the number removed. One uniform
/// draw per firm, in storage order, so runs are seed-reproducible.
inline std::uint64_t survive_and_grow(std::vector<double>& sizes, double survive_p,
                                      double growth_factor, Rng& rng) {
    std::size_t w = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (rng.uniform() < survive_p) sizes[w++] = sizes[i] * growth_factor;
    }
    const auto removed = static_cast<std::uint64_t>(sizes.size() - w);
    sizes.resize(w);
    return removed;
}

inline FirmPopulation draw_initial_population(std::uint64_t n, double entry_size, double tail,
                                              double max_factor, Rng& rng) {
    FirmPopulation pop;
    pop.entry_size = entry_size;
    pop.sizes.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i)
        pop.sizes.push_back(tail > 0.0
                                ? rng.truncated_pareto(tail, entry_size, entry_size * max_factor)
                                : entry_size);
    return pop;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Customer firms
// ---------------------------------------------------------------------------

/// Seeded birth–growth–death run of a customer-firm population.
/// Per step, in order: the entrant count is drawn from the entry rule using
/// the start-of-step count, each firm survives with probability exp(-mu*dt),
/// survivors grow by exp(psi*dt), entrants are appended at r_m. The initial
/// population is drawn from the entry rule's self-similar profile.
/// Extinction is a terminal event: the trajectory simply ends there.
inline SimResult simulate_customer_population(const CustomerSectorParams& customer,
                                              const MarketScenario& sc) {
    validate(customer);
    if (!(sc.dt > 0.0) || sc.dt > 0.25) throw ValidationError("scenario.dt out of (0, 0.25]");

    Rng rng(sc.seed);
    const double tail = sc.entry_rule == EntryRule::Flux
                            ? customer.alpha
                            : (customer.psi > 0.0 ? customer.alpha / customer.psi : 0.0);
    FirmPopulation pop = detail::draw_initial_population(sc.initial_firms, customer.r_m, tail,
                                                         sc.initial_r_max_factor, rng);

    const double survive_p = std::exp(-customer.mu * sc.dt);
    const double growth = std::exp(customer.psi * sc.dt);
    const double entry_scale = sc.entry_rule == EntryRule::Flux
                                   ? customer.alpha * customer.psi * customer.r_m
                                   : customer.alpha;

    SimTrajectory traj;
    traj.dt = sc.dt;
    const std::size_t steps = detail::step_count(sc.horizon, sc.dt);
    traj.steps.reserve(steps + 1);
    traj.steps.push_back(detail::snapshot(pop));

    for (std::size_t k = 0; k < steps; ++k) {
        const auto entrants =
            static_cast<std::uint64_t>(rng.poisson(entry_scale * static_cast<double>(pop.count()) * sc.dt));
        const std::uint64_t exits = detail::survive_and_grow(pop.sizes, survive_p, growth, rng);
        pop.sizes.insert(pop.sizes.end(), entrants, customer.r_m);
        pop.cum_entries += entrants;
        pop.cum_exits += exits;
        pop.t = static_cast<double>(k + 1) * sc.dt;

        StepRecord rec = detail::snapshot(pop);
        rec.entries = entrants;
        rec.exits = exits;
        traj.steps.push_back(rec);

        if (pop.count() == 0) {
            traj.extinct = true;
            traj.extinction_time = pop.t;
            break;
        }
    }
    return SimResult{std::move(traj), std::move(pop)};
}

// ---------------------------------------------------------------------------
// Practices
// ---------------------------------------------------------------------------

/// Seeded practice-population run with externally supplied entrant counts
/// (one entry per step; missing trailing entries count as zero). Survival
/// exp(-rho*dt), growth exp(phi*dt), entrants at s_m.
inline SimResult simulate_psf_population(const ExpertiseParams& expertise,
                                         const std::vector<std::uint64_t>& entry_counts,
                                         double horizon, double dt, std::uint64_t seed,
                                         FirmPopulation initial = {}) {
    validate(expertise);
    if (!(dt > 0.0) || dt > 0.25) throw ValidationError("dt out of (0, 0.25]");
    if (!(horizon > 0.0)) throw ValidationError("horizon must be > 0");

    Rng rng(seed);
    FirmPopulation pop = std::move(initial);
    pop.entry_size = expertise.s_m;
    pop.t = 0.0;

    const double survive_p = std::exp(-expertise.rho * dt);
    const double growth = std::exp(expertise.phi * dt);

    SimTrajectory traj;
    traj.dt = dt;
    const std::size_t steps = detail::step_count(horizon, dt);
    traj.steps.reserve(steps + 1);
    traj.steps.push_back(detail::snapshot(pop));

    for (std::size_t k = 0; k < steps; ++k) {
        const std::uint64_t entrants = k < entry_counts.size() ? entry_counts[k] : 0;
        const std::uint64_t exits = detail::survive_and_grow(pop.sizes, survive_p, growth, rng);
        pop.sizes.insert(pop.sizes.end(), entrants, expertise.s_m);
        pop.cum_entries += entrants;
        pop.cum_exits += exits;
        pop.t = static_cast<double>(k + 1) * dt;

        StepRecord rec = detail::snapshot(pop);
        rec.entries = entrants;
        rec.exits = exits;
        traj.steps.push_back(rec);
    }
    return SimResult{std::move(traj), std::move(pop)};
}

// ---------------------------------------------------------------------------
// Coupled market
// ---------------------------------------------------------------------------

/// Coupled run: the demand side follows the closed-form density, the
/// practice side is simulated. Per step:
///   1. capacity K = total experts / n; the clearing price solves
///      demand(t, p) = K by bisection (recorded with the step);
///   2. while the margin is positive and p >= n*c_m, entrants arrive with
///      Poisson mean phi*s_m*h(t)*dt from the growth entry flow;
///   3. random exits at rho, then competitive culls of every practice below
///      min_viable_size(p) whenever p < n*c_m (in that order), then growth.
/// Steps where capacity exceeds the served firm count record regime 'X'
/// with no price. A scenario with f0 == 0 has no demand side at all: the
/// population just decays at rho. A positive-demand step whose capacity
/// exceeds the total firm count is a hard error naming the step.
inline SimResult simulate_coupled_market(const MarketScenario& scenario) {
    const MarketScenario sc = validate(scenario);
    const ExpertiseParams& e = sc.expertise;
    const CustomerSectorParams& c = sc.customer;
    const bool has_demand = c.f0 > 0.0;
    const Regime regime = scenario_regime(sc);
    const double entry_price = growth_price(e);

    Rng rng(sc.seed);
    FirmPopulation pop = detail::draw_initial_population(sc.psf_initial_firms, e.s_m,
                                                         sc.psf_initial_tail,
                                                         sc.psf_initial_s_max_factor, rng);

    const double survive_p = std::exp(-e.rho * sc.dt);
    const double growth = std::exp(e.phi * sc.dt);

    SimTrajectory traj;
    traj.dt = sc.dt;
    const std::size_t steps = detail::step_count(sc.horizon, sc.dt);
    traj.steps.reserve(steps + 1);

    auto clear_step = [&](double t, StepRecord& rec) -> double {
        // Returns the clearing price, or NaN when there is none this step.
        rec.price = std::numeric_limits<double>::quiet_NaN();
        rec.regime = 'X';
        if (!has_demand) return rec.price;
        const double capacity = rec.total_size / e.n;
        if (capacity <= 0.0) return rec.price; // empty supply side: price unbounded
        const double total = total_firm_count(c, t);
        if (capacity > total) {
            char buf[96];
            std::snprintf(buf, sizeof(buf),
                          "coupled market step %zu: capacity exceeds total demand at p -> 0",
                          traj.steps.size());
            throw SimulationError(buf);
        }
        rec.price = find_clearing_price(c, t, capacity);
        rec.regime = rec.price >= entry_price ? 'G' : 'C';
        return rec.price;
    };

    StepRecord first = detail::snapshot(pop);
    clear_step(0.0, first);
    traj.steps.push_back(first);

    for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        const StepRecord& cur = traj.steps.back();

        // Entry responds to the price standing at the start of the step; an
        // empty supply side with live demand admits entrants as well.
        std::uint64_t entrants = 0;
        if (has_demand && regime.is_growth() &&
            (std::isnan(cur.price) || cur.price >= entry_price)) {
            const double flux = e.phi * e.s_m * growth_entry_flow(c, e, t);
            entrants = static_cast<std::uint64_t>(rng.poisson(flux * sc.dt));
        }

        const std::uint64_t random_exits = detail::survive_and_grow(pop.sizes, survive_p, 1.0, rng);

        std::uint64_t culled = 0;
        if (!std::isnan(cur.price) && cur.price < entry_price) {
            const double s_min = min_viable_size(e, cur.price);
            const std::size_t before = pop.sizes.size();
            pop.sizes.erase(std::remove_if(pop.sizes.begin(), pop.sizes.end(),
                                           [s_min](double s) { return s < s_min; }),
                            pop.sizes.end());
            culled = static_cast<std::uint64_t>(before - pop.sizes.size());
        }

        for (double& s : pop.sizes) s *= growth;
        pop.sizes.insert(pop.sizes.end(), entrants, e.s_m);
        pop.cum_entries += entrants;
        pop.cum_exits += random_exits + culled;
        pop.t = static_cast<double>(k + 1) * sc.dt;

        StepRecord rec = detail::snapshot(pop);
        rec.entries = entrants;
        rec.exits = random_exits;
        rec.competitive_exits = culled;
        clear_step(pop.t, rec);
        traj.steps.push_back(rec);
    }
    return SimResult{std::move(traj), std::move(pop)};
}

} // namespace psmkt
