#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "psmkt/errors.hpp"

namespace psmkt {

/// Boundary density of entering practices, sampled on a uniform time grid
/// starting at t = 0. Values are per-size-unit densities at the entry size,
/// not entrant counts; the conversion to a count flux is phi * s_m * h(t).
class EntryFlowSeries {
public:
    EntryFlowSeries(double dt, std::vector<double> values) : dt_(dt), values_(std::move(values)) {
        if (!(dt_ > 0.0) || !std::isfinite(dt_))
            throw ValidationError("flow.dt must be > 0");
        if (values_.size() < 2)
            throw ValidationError("flow needs at least 2 grid points");
        for (double v : values_)
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ValidationError("flow values must be finite and >= 0");
    }

    /// Samples fn on [0, t_end] with step dt (t_end rounded up to the grid).
    template <class Fn>
    static EntryFlowSeries from_function(Fn&& fn, double t_end, double dt) {
        const std::size_t n = static_cast<std::size_t>(std::ceil(t_end / dt)) + 1;
        std::vector<double> v(n < 2 ? 2 : n);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(static_cast<double>(i) * dt);
        return EntryFlowSeries(dt, std::move(v));
    }

    static EntryFlowSeries constant(double h0, double t_end, double dt) {
        return from_function([h0](double) { return h0; }, t_end, dt);
    }

    double dt() const { return dt_; }
    std::size_t size() const { return values_.size(); }
    double time(std::size_t i) const { return static_cast<double>(i) * dt_; }
    double t_end() const { return time(values_.size() - 1); }
    const std::vector<double>& values() const { return values_; }

    bool covers(double t) const { return t >= 0.0 && t <= t_end() + 1e-12 * dt_; }

    void require_coverage(double t, const char* what) const {
        if (!covers(t))
            throw FlowCoverageError(std::string(what) + ": flow grid does not cover requested time");
    }

    /// Linear interpolation between grid points.
    double value_at(double t) const {
        require_coverage(t, "flow.value_at");
        const double x = t / dt_;
        const auto i = static_cast<std::size_t>(x);
        if (i + 1 >= values_.size()) return values_.back();
        const double w = x - static_cast<double>(i);
        return values_[i] * (1.0 - w) + values_[i + 1] * w;
    }

private:
    double dt_;
    std::vector<double> values_;
};

} // namespace psmkt
