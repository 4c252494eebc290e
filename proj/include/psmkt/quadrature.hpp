#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <vector>

#include "psmkt/errors.hpp"
#include "psmkt/flow.hpp"

namespace psmkt {

/// Composite trapezoid over uniformly spaced samples.
inline double trapezoid(const std::vector<double>& y, double dx) {
    if (y.size() < 2) return 0.0;
    double acc = 0.5 * (y.front() + y.back());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) acc += y[i];
    return acc * dx;
}

/// Integral of exp(-c*x) * h(x) over [0, t], with h read from a flow grid
/// (linear interpolation between samples) and the exponential evaluated
/// exactly. Composite trapezoid at the grid step, then one halved-step
/// refinement; if the refinement still moves the result by 1e-6 relative
/// or more, the grid is too coarse and an AccuracyError is raised.
inline double exp_weighted_flow_integral(const EntryFlowSeries& flow, double c, double t) {
    flow.require_coverage(t, "flow integral");
    if (t <= 0.0) return 0.0;

    auto integrate = [&](double step) {
        const auto n = static_cast<std::size_t>(std::ceil(t / step - 1e-9));
        const double dx = t / static_cast<double>(n);
        double acc = 0.5 * (flow.value_at(0.0) + std::exp(-c * t) * flow.value_at(t));
        for (std::size_t i = 1; i < n; ++i) {
            const double x = static_cast<double>(i) * dx;
            acc += std::exp(-c * x) * flow.value_at(x);
        }
        return acc * dx;
    };

    const double coarse = integrate(flow.dt());
    const double fine = integrate(0.5 * flow.dt());
    const double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) >= 1e-6 * scale) {
        char buf[128];
        std::snprintf(buf, sizeof(buf),
                      "flow integral did not converge (rel change %.3g at dt=%.3g); use a finer grid",
                      std::abs(fine - coarse) / scale, flow.dt());
        throw AccuracyError(buf);
    }
    return fine;
}

} // namespace psmkt
