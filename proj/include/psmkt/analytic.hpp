#pragma once

#include <cmath>
#include <cstdio>
#include <vector>

#include "psmkt/errors.hpp"
#include "psmkt/flow.hpp"
#include "psmkt/params.hpp"
#include "psmkt/quadrature.hpp"

namespace psmkt {

/// One sample of a size density: x is revenue for customer firms and
/// experts for practices; value is firms per size unit.
struct DensityPoint {
    double t = 0.0;
    double x = 0.0;
    double value = 0.0;
};

// ---------------------------------------------------------------------------
// Customer side
// ---------------------------------------------------------------------------

/// Firm-size density f(t, r) = f0 * exp((alpha*psi - mu) t) * (r/r_m)^-(1+alpha)
/// for r >= r_m, zero below the entry size.
inline double firm_density(const CustomerSectorParams& c, double t, double r) {
    if (r < c.r_m) return 0.0;
    const double g = net_growth(c);
    return c.f0 * std::exp(g * t) * std::pow(r / c.r_m, -(1.0 + c.alpha));
}

/// Total firm count F(t) = integral of f(t, r) over r >= r_m.
inline double total_firm_count(const CustomerSectorParams& c, double t) {
    return c.f0 * std::exp(net_growth(c) * t) * c.r_m / c.alpha;
}

/// Number of firms for which buying at price p is profitable:
/// D(t, p) = integral of f(t, r) over r >= p/nu. Below the p = nu*r_m
/// threshold every firm is a buyer and demand saturates at the firm count.
inline double demand(const CustomerSectorParams& c, double t, double p) {
    const double threshold = p / c.nu;
    if (threshold < c.r_m) return total_firm_count(c, t);
    return total_firm_count(c, t) * std::pow(p / (c.nu * c.r_m), -c.alpha);
}

/// Price at which demand(t, p) equals the given capacity (closed form).
/// Requires 0 < capacity <= total_firm_count(t); the result then lies on
/// the power-law branch (p >= nu*r_m).
inline double invert_demand(const CustomerSectorParams& c, double t, double capacity) {
    const double total = total_firm_count(c, t);
    if (!(capacity > 0.0) || capacity > total)
        throw SimulationError("invert_demand: capacity outside (0, total firm count]");
    return c.nu * c.r_m * std::pow(capacity / total, -1.0 / c.alpha);
}

/// Bisection solve of demand(t, p) = capacity on the monotone branch.
/// Throws SimulationError when no price clears (capacity exceeds the
/// total firm count, i.e. demand saturates below the capacity).
inline double find_clearing_price(const CustomerSectorParams& c, double t, double capacity,
                                  double rel_tol = 1e-12) {
    const double total = total_firm_count(c, t);
    if (!(capacity > 0.0))
        throw SimulationError("find_clearing_price: capacity must be > 0");
    if (capacity > total)
        throw SimulationError("find_clearing_price: capacity exceeds total demand at p -> 0");

    double lo = c.nu * c.r_m; // demand(lo) = total >= capacity
    double hi = 2.0 * lo;
    while (demand(c, t, hi) > capacity) {
        hi *= 2.0;
        if (hi > 1e300) throw SimulationError("find_clearing_price: bracket expansion failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (demand(c, t, mid) > capacity)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= rel_tol * hi) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Provider side
// ---------------------------------------------------------------------------

/// How the practice density decays along a characteristic. The model's
/// closed forms (and the supply integral below) use EntryTimeDecay:
/// g(t, s) = h(x) * exp(-rho * x) with x the cohort's entry time. AgeDecay
/// applies the failure rate to the cohort's age instead,
/// g(t, s) = h(x) * exp(-rho * (t - x)), which keeps the stated boundary
/// value g(t, s_m) = h(t); the two coincide when rho = 0. Only the entry-time
/// form integrates to supply() below.
enum class PsfDensityConvention { EntryTimeDecay, AgeDecay };

namespace detail {
inline void require_positive_phi(const ExpertiseParams& e, const char* what) {
    if (!(e.phi > 0.0))
        throw ValidationError(std::string(what) +
                              ": phi must be > 0 (practices never grow, size map is singular)");
}
} // namespace detail

/// Practice-size density at (t, s). Zero when the implied entry time
/// x = t - ln(s/s_m)/phi falls outside [0, t] (no practice predates the
/// market opening, none sits below the entry size).
inline double psf_density(const ExpertiseParams& e, const EntryFlowSeries& flow, double t, double s,
                          PsfDensityConvention conv = PsfDensityConvention::EntryTimeDecay) {
    detail::require_positive_phi(e, "psf_density");
    flow.require_coverage(t, "psf_density");
    if (s < e.s_m) return 0.0;
    const double x = t - std::log(s / e.s_m) / e.phi;
    if (x < 0.0 || x > t) return 0.0;
    const double h = flow.value_at(x);
    const double decay = conv == PsfDensityConvention::EntryTimeDecay ? x : t - x;
    return h * std::exp(-e.rho * decay);
}

/// Engagements the practice population can serve:
/// S(t) = (s_m^2 phi / n) e^{2 phi t} * integral_0^t e^{-(2 phi + rho) x} h(x) dx.
inline double supply(const ExpertiseParams& e, const EntryFlowSeries& flow, double t) {
    detail::require_positive_phi(e, "supply");
    flow.require_coverage(t, "supply");
    if (t <= 0.0) return 0.0;
    const double integral = exp_weighted_flow_integral(flow, 2.0 * e.phi + e.rho, t);
    return e.s_m * e.s_m * e.phi / e.n * std::exp(2.0 * e.phi * t) * integral;
}

// ---------------------------------------------------------------------------
// Regimes and equilibrium
// ---------------------------------------------------------------------------

/// Growth iff the client pool grows strictly faster than experts can be
/// trained: alpha*psi - mu > 2*phi. Ties go to Consolidation.
inline Regime classify_regime(const CustomerSectorParams& c, const ExpertiseParams& e) {
    return Regime::from_margin(net_growth(c) - 2.0 * e.phi);
}

/// Entry price in a growing market (welfare-maximizing equilibrium price).
inline double growth_price(const ExpertiseParams& e) {
    return e.n * e.c_m;
}

/// Boundary density of new practices sustaining the growth equilibrium:
/// h(t) = e^{(g + rho) t} * n * (g - 2 phi) * f0 / (s_m^2 phi) * (1/alpha)
///        * (n c_m / (nu r_m))^-alpha,   g = alpha*psi - mu.
inline double growth_entry_flow(const CustomerSectorParams& c, const ExpertiseParams& e, double t) {
    detail::require_positive_phi(e, "growth_entry_flow");
    const Regime regime = classify_regime(c, e);
    if (!regime.is_growth()) throw RegimeError("growth_entry_flow: not in growth regime");
    const double g = net_growth(c);
    const double level = e.n * regime.margin * c.f0 / (e.s_m * e.s_m * e.phi) / c.alpha *
                         std::pow(growth_price(e) / (c.nu * c.r_m), -c.alpha);
    return level * std::exp((g + e.rho) * t);
}

/// Samples growth_entry_flow on [0, t_end] into a flow series.
inline EntryFlowSeries make_growth_flow(const CustomerSectorParams& c, const ExpertiseParams& e,
                                        double t_end, double dt) {
    return EntryFlowSeries::from_function(
        [&](double t) { return growth_entry_flow(c, e, t); }, t_end, dt);
}

// ---------------------------------------------------------------------------
// Costs, viability, profitability
// ---------------------------------------------------------------------------

/// Unit production cost c(s) = c_m * (s/s_m)^-theta, defined for s >= s_m.
inline double unit_cost(const ExpertiseParams& e, double s) {
    if (s < e.s_m) throw ValidationError("unit_cost: s below entry size s_m");
    return e.c_m * std::pow(s / e.s_m, -e.theta);
}

/// Smallest practice size that breaks even at price p:
/// s_min = s_m * (n c_m / p)^(1/theta).
inline double min_viable_size(const ExpertiseParams& e, double p) {
    if (!(p > 0.0)) throw ValidationError("min_viable_size: price must be > 0");
    return e.s_m * std::pow(growth_price(e) / p, 1.0 / e.theta);
}

/// Profit flow of a practice of size s at price p: clients served (s/n)
/// times the per-engagement margin (p - n * c(s)).
inline double profitability(const ExpertiseParams& e, double p, double s) {
    if (s < e.s_m) throw ValidationError("profitability: s below entry size s_m");
    return s / e.n * (p - e.n * unit_cost(e, s));
}

/// Alternative profitability normalization Pi(s) = s * n * c_m * (1 - (s_m/s)^theta),
/// i.e. n times the per-client-margin form evaluated at the entry price.
/// Kept for comparison; not used by the equilibrium machinery.
inline double profitability_scaled(const ExpertiseParams& e, double s) {
    if (s < e.s_m) throw ValidationError("profitability_scaled: s below entry size s_m");
    return s * e.n * e.c_m * (1.0 - std::pow(e.s_m / s, e.theta));
}

// ---------------------------------------------------------------------------
// Consolidation trajectory
// ---------------------------------------------------------------------------

/// Price and minimal-viable-size paths of a consolidating market, on a
/// uniform grid. Price falls and the viable size rises exponentially.
struct ConsolidationPath {
    std::vector<double> times;
    std::vector<double> prices;
    std::vector<double> min_sizes;
    double price_rate = 0.0;    ///< d ln p / dt (negative)
    double min_size_rate = 0.0; ///< d ln s_min / dt (positive)
};

/// Closed-form consolidation trajectory:
///   p(t)    = n c_m * exp( theta/(2 - alpha*theta) * (2 phi - g) * t )
///   s_min(t)= s_m  * exp( -1/(2 - alpha*theta) * (2 phi - g) * t )
/// Requires a strictly negative growth margin and 2/theta < alpha
/// (scale economies strong enough for the declining-price solution).
inline ConsolidationPath consolidation_path(const CustomerSectorParams& c, const ExpertiseParams& e,
                                            double horizon, double dt) {
    if (!(horizon > 0.0) || !(dt > 0.0))
        throw ValidationError("consolidation_path: horizon and dt must be > 0");
    const Regime regime = classify_regime(c, e);
    if (regime.margin >= 0.0) throw RegimeError("consolidation_path: not in consolidation regime");
    if (!(2.0 / e.theta < c.alpha))
        throw RegimeError("consolidation_path: condition 2/theta < alpha violated");

    const double pressure = -regime.margin; // 2 phi - (alpha psi - mu) > 0
    ConsolidationPath path;
    path.price_rate = e.theta / (2.0 - c.alpha * e.theta) * pressure;
    path.min_size_rate = -1.0 / (2.0 - c.alpha * e.theta) * pressure;

    const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
    path.times.reserve(steps + 1);
    path.prices.reserve(steps + 1);
    path.min_sizes.reserve(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        const double p = growth_price(e) * std::exp(path.price_rate * t);
        path.times.push_back(t);
        path.prices.push_back(p);
        path.min_sizes.push_back(min_viable_size(e, p));
    }
    return path;
}

} // namespace psmkt
