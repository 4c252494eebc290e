#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "psmkt/errors.hpp"
#include "psmkt/population.hpp"

namespace psmkt {

struct SlopeFit {
    double slope = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

/// Least-squares slope of y against x.
inline SlopeFit fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw SampleError("fit_slope: need >= 2 paired points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0) throw SampleError("fit_slope: degenerate x values");
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = ys[i] - my - slope * (xs[i] - mx);
        rss += r * r;
    }
    const double se = n > 2 ? std::sqrt(rss / static_cast<double>(n - 2) / sxx) : 0.0;
    return SlopeFit{slope, se, n};
}

/// Slope of ln(count) vs t over the steps after burn_in. Requires at least
/// 20 usable steps; a population that dies out before the burn-in ends has
/// no usable window.
inline SlopeFit fit_growth_rate(const SimTrajectory& traj, double burn_in = 0.0) {
    if (traj.extinct && traj.extinction_time <= burn_in)
        throw SampleError("fit_growth_rate: extinction before burn-in end");
    std::vector<double> ts, ys;
    for (const auto& s : traj.steps) {
        if (s.t < burn_in || s.count == 0) continue;
        ts.push_back(s.t);
        ys.push_back(std::log(static_cast<double>(s.count)));
    }
    if (ts.size() < 20) throw SampleError("fit_growth_rate: fewer than 20 steps after burn-in");
    return fit_slope(ts, ys);
}

/// Slope of ln(price) vs t over priced steps after burn_in (coupled runs).
inline SlopeFit fit_price_slope(const SimTrajectory& traj, double burn_in = 0.0) {
    std::vector<double> ts, ys;
    for (const auto& s : traj.steps) {
        if (s.t < burn_in || std::isnan(s.price) || !(s.price > 0.0)) continue;
        ts.push_back(s.t);
        ys.push_back(std::log(s.price));
    }
    if (ts.size() < 20) throw SampleError("fit_price_slope: fewer than 20 priced steps after burn-in");
    return fit_slope(ts, ys);
}

struct TailFit {
    double exponent = 0.0;  ///< CCDF exponent estimate
    double std_error = 0.0;
    std::size_t order_stats = 0; ///< number of upper order statistics used
};

/// Hill estimator of the CCDF tail exponent over the top fraction of the
/// sample (top decile by default).
inline TailFit hill_tail_exponent(const std::vector<double>& sizes, double top_fraction = 0.1) {
    if (sizes.size() < 1000) throw SampleError("hill_tail_exponent: need at least 1000 observations");
    if (!(top_fraction > 0.0) || top_fraction >= 1.0)
        throw SampleError("hill_tail_exponent: top_fraction out of (0,1)");
    std::vector<double> sorted(sizes);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto k = static_cast<std::size_t>(static_cast<double>(sorted.size()) * top_fraction);
    if (k < 2 || k >= sorted.size()) throw SampleError("hill_tail_exponent: top fraction too small");
    const double x_ref = sorted[k];
    if (!(x_ref > 0.0)) throw SampleError("hill_tail_exponent: nonpositive sizes");
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(sorted[i] / x_ref);
    if (!(acc > 0.0)) throw SampleError("hill_tail_exponent: degenerate sample, no tail variation");
    const double est = static_cast<double>(k) / acc;
    return TailFit{est, est / std::sqrt(static_cast<double>(k)), k};
}

struct Histogram {
    std::vector<double> edges;     ///< nbins + 1 ascending edges
    std::vector<double> counts;    ///< firms per bin
    std::vector<double> densities; ///< counts / bin width
};

/// Histogram density on log-spaced bins covering [lo, hi]. Every size must
/// fall inside the range, so sum(density * width) equals the population
/// count exactly.
inline Histogram empirical_density(const FirmPopulation& pop, double lo, double hi,
                                   std::size_t nbins) {
    if (pop.sizes.empty()) throw SampleError("empirical_density: empty population");
    if (!(lo > 0.0) || !(hi > lo) || nbins == 0)
        throw ValidationError("empirical_density: bad bin spec");
    Histogram h;
    h.edges.resize(nbins + 1);
    const double step = std::log(hi / lo) / static_cast<double>(nbins);
    for (std::size_t i = 0; i <= nbins; ++i) h.edges[i] = lo * std::exp(step * static_cast<double>(i));
    h.edges.front() = lo;
    h.edges.back() = hi;
    h.counts.assign(nbins, 0.0);
    for (double s : pop.sizes) {
        if (s < lo || s > hi) throw ValidationError("empirical_density: size outside bin range");
        auto idx = static_cast<std::size_t>(std::log(s / lo) / step);
        if (idx >= nbins) idx = nbins - 1;
        // Guard against edge rounding.
        while (idx > 0 && s < h.edges[idx]) --idx;
        while (idx + 1 < nbins && s >= h.edges[idx + 1]) ++idx;
        h.counts[idx] += 1.0;
    }
    h.densities.resize(nbins);
    for (std::size_t i = 0; i < nbins; ++i)
        h.densities[i] = h.counts[i] / (h.edges[i + 1] - h.edges[i]);
    return h;
}

inline double mean(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

inline double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

} // namespace psmkt
