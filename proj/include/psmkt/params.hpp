#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "psmkt/errors.hpp"

namespace psmkt {

// ---------------------------------------------------------------------------
// Parameter blocks
//
// All rates are per year. dt values elsewhere are fractions of a year.
// Revenue is normalized so that r_m = 1 by default; the closed forms keep
// explicit r/r_m ratios so other scales behave, but the demand/supply
// matching identities are exact only under r_m = 1.
// ---------------------------------------------------------------------------

/// Demand side of one industrial sector: firm entry, revenue growth and
/// failure rates, plus the scales of the firm-size density.
struct CustomerSectorParams {
    double alpha = 0.0; ///< entry intensity (dimensionless, > 0)
    double psi = 0.0;   ///< revenue growth rate (per year, >= 0)
    double mu = 0.0;    ///< failure rate (per year, in [0,1])
    double r_m = 1.0;   ///< minimal entrant revenue (normalized revenue units, > 0)
    double nu = 0.0;    ///< benefit factor, fraction of revenue (in (0,1])
    double f0 = 0.0;    ///< density scale at (t = 0, r = r_m) (firms per revenue unit, > 0)
};

/// Supply side of one professional expertise: practice growth and failure
/// rates plus the production-cost structure.
struct ExpertiseParams {
    double phi = 0.0;   ///< expert training speed (per year, >= 0)
    double rho = 0.0;   ///< practice failure rate (per year, in [0,1])
    double theta = 1.0; ///< scale-economy exponent (> 0)
    double s_m = 1.0;   ///< entrant practice size (experts, > 0)
    double c_m = 1.0;   ///< unit production cost at entry size (cost units per engagement per year, > 0)
    double n = 1.0;     ///< experts required per engagement (>= 1)
};

/// Net growth rate of the client pool: alpha*psi - mu.
inline double net_growth(const CustomerSectorParams& p) {
    return p.alpha * p.psi - p.mu;
}

namespace detail {

inline std::string bound_msg(const char* field, const char* bound, double got) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s %s (got %.17g)", field, bound, got);
    return buf;
}

inline void check(std::vector<std::string>& out, bool ok, const char* field,
                  const char* bound, double got) {
    if (!ok) out.push_back(bound_msg(field, bound, got));
}

inline void throw_if_any(const std::vector<std::string>& violations) {
    if (violations.empty()) return;
    std::string msg;
    for (const auto& v : violations) {
        if (!msg.empty()) msg += "; ";
        msg += v;
    }
    throw ValidationError(msg);
}

} // namespace detail

/// Returns the params unchanged if every bound holds; otherwise throws
/// ValidationError naming each offending field. Idempotent.
inline CustomerSectorParams validate(const CustomerSectorParams& p) {
    std::vector<std::string> bad;
    detail::check(bad, std::isfinite(p.alpha) && p.alpha > 0.0, "customer.alpha", "must be > 0", p.alpha);
    detail::check(bad, std::isfinite(p.psi) && p.psi >= 0.0, "customer.psi", "must be >= 0", p.psi);
    detail::check(bad, std::isfinite(p.mu) && p.mu >= 0.0 && p.mu <= 1.0, "customer.mu", "out of [0,1]", p.mu);
    detail::check(bad, std::isfinite(p.r_m) && p.r_m > 0.0, "customer.r_m", "must be > 0", p.r_m);
    detail::check(bad, std::isfinite(p.nu) && p.nu > 0.0 && p.nu <= 1.0, "customer.nu", "out of (0,1]", p.nu);
    detail::check(bad, std::isfinite(p.f0) && p.f0 > 0.0, "customer.f0", "must be > 0", p.f0);
    detail::throw_if_any(bad);
    return p;
}

inline ExpertiseParams validate(const ExpertiseParams& p) {
    std::vector<std::string> bad;
    detail::check(bad, std::isfinite(p.phi) && p.phi >= 0.0, "expertise.phi", "must be >= 0", p.phi);
    detail::check(bad, std::isfinite(p.rho) && p.rho >= 0.0 && p.rho <= 1.0, "expertise.rho", "out of [0,1]", p.rho);
    detail::check(bad, std::isfinite(p.theta) && p.theta > 0.0, "expertise.theta", "must be > 0", p.theta);
    detail::check(bad, std::isfinite(p.s_m) && p.s_m > 0.0, "expertise.s_m", "must be > 0", p.s_m);
    detail::check(bad, std::isfinite(p.c_m) && p.c_m > 0.0, "expertise.c_m", "must be > 0", p.c_m);
    detail::check(bad, std::isfinite(p.n) && p.n >= 1.0, "expertise.n", "must be >= 1", p.n);
    detail::throw_if_any(bad);
    return p;
}

// ---------------------------------------------------------------------------
// Market regime
// ---------------------------------------------------------------------------

/// Verdict of the entry-sustainability comparison. Growth requires the
/// client pool to outpace expert training strictly: alpha*psi - mu > 2*phi.
/// A zero margin classifies as Consolidation.
struct Regime {
    enum class Kind { Growth, Consolidation };

    Kind kind = Kind::Consolidation;
    double margin = 0.0; ///< alpha*psi - mu - 2*phi (per year)

    bool is_growth() const { return kind == Kind::Growth; }

    static Regime from_margin(double margin) {
        return Regime{margin > 0.0 ? Kind::Growth : Kind::Consolidation, margin};
    }
};

inline const char* to_string(Regime::Kind k) {
    return k == Regime::Kind::Growth ? "Growth" : "Consolidation";
}

} // namespace psmkt
