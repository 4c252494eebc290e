#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "psmkt/errors.hpp"

namespace psmkt {

/// Cross-section of firm sizes at one instant (revenue for customer firms,
/// experts for practices), with cumulative entry/exit bookkeeping.
struct FirmPopulation {
    std::vector<double> sizes;
    double t = 0.0;
    double entry_size = 1.0;
    std::uint64_t cum_entries = 0;
    std::uint64_t cum_exits = 0;

    std::size_t count() const { return sizes.size(); }

    double total_size() const {
        double acc = 0.0;
        for (double s : sizes) acc += s;
        return acc;
    }
};

/// One simulation step snapshot. price/regime are populated by coupled
/// runs only ('G' entry-sustaining, 'C' consolidating, '-' not applicable,
/// 'X' no clearing price this step).
struct StepRecord {
    double t = 0.0;
    std::uint64_t count = 0;
    double total_size = 0.0;
    double min_size = std::numeric_limits<double>::quiet_NaN(); ///< smallest surviving firm
    std::uint64_t entries = 0;
    std::uint64_t exits = 0;            ///< random failures this step
    std::uint64_t competitive_exits = 0; ///< culled below the viable size
    double price = std::numeric_limits<double>::quiet_NaN();
    char regime = '-';
};

/// Uniform-grid trajectory of step records. The bookkeeping identity
/// count(t) = count(t-dt) + entries - exits holds at every step.
struct SimTrajectory {
    double dt = 0.0;
    std::vector<StepRecord> steps;
    bool extinct = false;
    double extinction_time = std::numeric_limits<double>::quiet_NaN();

    std::size_t size() const { return steps.size(); }

    /// Column order:
    /// t count total_size min_size entries exits competitive_exits price regime
    void write_delimited(std::ostream& os, char delim = ',') const {
        os << "t" << delim << "count" << delim << "total_size" << delim << "min_size" << delim
           << "entries" << delim << "exits" << delim << "competitive_exits" << delim << "price"
           << delim << "regime\n";
        char buf[64];
        auto put = [&](double v) {
            if (std::isnan(v)) return;
            std::snprintf(buf, sizeof(buf), "%.10g", v);
            os << buf;
        };
        for (const auto& s : steps) {
            put(s.t);
            os << delim << s.count << delim;
            put(s.total_size);
            os << delim;
            put(s.min_size);
            os << delim << s.entries << delim << s.exits << delim << s.competitive_exits << delim;
            put(s.price);
            os << delim << s.regime << "\n";
        }
    }
};

/// Checks the per-step count identity; used by tests and `validate`.
inline bool bookkeeping_holds(const SimTrajectory& traj) {
    for (std::size_t i = 1; i < traj.steps.size(); ++i) {
        const auto& prev = traj.steps[i - 1];
        const auto& cur = traj.steps[i];
        const std::uint64_t removed = cur.exits + cur.competitive_exits;
        if (prev.count + cur.entries < removed) return false;
        if (cur.count != prev.count + cur.entries - removed) return false;
    }
    return true;
}

} // namespace psmkt
