#pragma once

// Confidence-set constructors (dilated CLT, empirical Bernstein, KL/Chernoff)
// and axis-aligned box algebra.

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthcal/core_stats.hpp"

namespace synthcal {

// Axis-aligned box, possibly unbounded. All-infinite bounds represent the
// universe set.
struct ConfidenceSet {
    std::vector<double> lower;
    std::vector<double> upper;

    std::size_t dims() const { return lower.size(); }

    static ConfidenceSet interval(double lo, double hi) {
        return box({lo}, {hi});
    }

    static ConfidenceSet box(std::vector<double> lo, std::vector<double> hi) {
        if (lo.empty() || lo.size() != hi.size())
            throw std::invalid_argument("ConfidenceSet: bounds must be nonempty and equal-sized");
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (std::isnan(lo[i]) || std::isnan(hi[i]) || lo[i] > hi[i])
                throw std::invalid_argument("ConfidenceSet: need lower <= upper per coordinate");
        }
        ConfidenceSet s;
        s.lower = std::move(lo);
        s.upper = std::move(hi);
        return s;
    }

    double halfwidth(std::size_t i = 0) const {
        if (i >= dims()) throw std::invalid_argument("ConfidenceSet::halfwidth: bad coordinate");
        return (upper[i] - lower[i]) / 2.0;
    }

    // Mean of per-coordinate halfwidths; +inf for unbounded boxes.
    double mean_halfwidth() const {
        double acc = 0.0;
        for (std::size_t i = 0; i < dims(); ++i) acc += halfwidth(i);
        return acc / static_cast<double>(dims());
    }
};

// Universe set: [lo,hi]^dims when a range is given, the all-infinite box
// otherwise.
inline ConfidenceSet universe_set(std::size_t dims,
                                  std::optional<ResponseRange> range = std::nullopt) {
    if (dims == 0) throw std::invalid_argument("universe_set: dims must be positive");
    double lo = range ? range->lo : -kInf;
    double hi = range ? range->hi : kInf;
    if (range) range->validate();
    return ConfidenceSet::box(std::vector<double>(dims, lo), std::vector<double>(dims, hi));
}

inline bool contains_point(const ConfidenceSet& set, std::span<const double> point) {
    if (point.size() != set.dims())
        throw std::invalid_argument("contains_point: dimension mismatch");
    for (std::size_t i = 0; i < point.size(); ++i) {
        if (point[i] < set.lower[i] || point[i] > set.upper[i]) return false;
    }
    return true;
}

inline bool contains_point(const ConfidenceSet& set, double point) {
    return contains_point(set, std::span<const double>(&point, 1));
}

// True iff inner is contained in outer, coordinate-wise.
inline bool contains_set(const ConfidenceSet& outer, const ConfidenceSet& inner) {
    if (outer.dims() != inner.dims())
        throw std::invalid_argument("contains_set: dimension mismatch");
    for (std::size_t i = 0; i < outer.dims(); ++i) {
        if (inner.lower[i] < outer.lower[i] || inner.upper[i] > outer.upper[i]) return false;
    }
    return true;
}

// Target miscoverage, dilation factor and response range shared by the
// constructors. The range width M = hi - lo feeds the Bernstein remainder.
struct IntervalConfig {
    double alpha = 0.05;
    double dilation = 1.0;
    ResponseRange range{0.0, 1.0};

    double range_width() const { return range.width(); }

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("IntervalConfig: alpha must lie in (0,1), got " +
                                        std::to_string(alpha));
        if (!(dilation >= 1.0))
            throw std::invalid_argument("IntervalConfig: dilation must be >= 1, got " +
                                        std::to_string(dilation));
        range.validate();
    }
};

// Dilated CLT interval [mean +- z_{alpha/2} * std * sqrt(C/k)]. Not clipped
// to the response range.
inline ConfidenceSet clt_interval(const SampleStats& stats, const IntervalConfig& cfg) {
    cfg.validate();
    if (stats.count < 1)
        throw std::invalid_argument("clt_interval: needs count >= 1 (use universe_set at k=0)");
    double z = normal_quantile(1.0 - cfg.alpha / 2.0);
    double hw = z * stats.std * std::sqrt(cfg.dilation / static_cast<double>(stats.count));
    return ConfidenceSet::interval(stats.mean - hw, stats.mean + hw);
}

// Dilated empirical-Bernstein interval with remainder
// r = std * sqrt(2 C log(4/alpha) / k) + 7 C M log(4/alpha) / (3 (k-1)).
inline ConfidenceSet bernstein_interval(const SampleStats& stats, const IntervalConfig& cfg) {
    cfg.validate();
    if (stats.count < 2)
        throw std::invalid_argument("bernstein_interval: needs count >= 2");
    double log_term = std::log(4.0 / cfg.alpha);
    double k = static_cast<double>(stats.count);
    double r = stats.std * std::sqrt(2.0 * cfg.dilation * log_term / k) +
               7.0 * cfg.dilation * cfg.range_width() * log_term / (3.0 * (k - 1.0));
    return ConfidenceSet::interval(stats.mean - r, stats.mean + r);
}

namespace detail {

// Solves KL(ybar || p) = thr on the side of ybar indicated by `lower_side`,
// using that p -> KL(ybar||p) is decreasing on (0,ybar) and increasing on
// (ybar,1). Returns the endpoint inside the sub-level set.
inline double kl_level_endpoint(double ybar, double thr, bool lower_side) {
    double in = ybar;                       // KL = 0 <= thr
    double out = lower_side ? 0.0 : 1.0;    // KL = +inf > thr
    for (int iter = 0; iter < 200 && std::abs(in - out) > 1e-10; ++iter) {
        double mid = 0.5 * (in + out);
        if (kl_bernoulli(ybar, mid) <= thr)
            in = mid;
        else
            out = mid;
    }
    return in;
}

}  // namespace detail

// Chernoff/KL interval {p in (0,1) : KL(mean || p) <= C log(2/alpha) / k},
// closed interval via bisection; one-sided limit form when mean is 0 or 1.
inline ConfidenceSet kl_interval(const SampleStats& stats, const IntervalConfig& cfg) {
    cfg.validate();
    if (stats.count < 1)
        throw std::invalid_argument("kl_interval: needs count >= 1 (use universe_set at k=0)");
    double ybar = stats.mean;
    if (!(ybar >= 0.0 && ybar <= 1.0))
        throw std::invalid_argument("kl_interval: mean must lie in [0,1] (binary responses)");
    double thr = cfg.dilation * std::log(2.0 / cfg.alpha) / static_cast<double>(stats.count);
    if (ybar == 0.0) return ConfidenceSet::interval(0.0, 1.0 - std::exp(-thr));
    if (ybar == 1.0) return ConfidenceSet::interval(std::exp(-thr), 1.0);
    double lo = detail::kl_level_endpoint(ybar, thr, /*lower_side=*/true);
    double hi = detail::kl_level_endpoint(ybar, thr, /*lower_side=*/false);
    return ConfidenceSet::interval(lo, hi);
}

// d-dimensional box from per-coordinate CLT intervals with a Bonferroni
// split: each coordinate runs at level 1 - (1-level)/d. With d = 1 this is
// exactly clt_interval at the given level.
inline ConfidenceSet box_from_coordinates(std::span<const SampleStats> per_coordinate_stats,
                                          const IntervalConfig& cfg, double level) {
    if (per_coordinate_stats.empty())
        throw std::invalid_argument("box_from_coordinates: empty coordinate list");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("box_from_coordinates: level must lie in (0,1)");
    const double d = static_cast<double>(per_coordinate_stats.size());
    IntervalConfig per_coord = cfg;
    per_coord.alpha = (1.0 - level) / d;
    std::vector<double> lo, hi;
    lo.reserve(per_coordinate_stats.size());
    hi.reserve(per_coordinate_stats.size());
    for (const SampleStats& s : per_coordinate_stats) {
        ConfidenceSet c = clt_interval(s, per_coord);
        lo.push_back(c.lower[0]);
        hi.push_back(c.upper[0]);
    }
    return ConfidenceSet::box(std::move(lo), std::move(hi));
}

inline ConfidenceSet box_from_coordinates(const std::vector<SampleStats>& stats,
                                          const IntervalConfig& cfg, double level) {
    return box_from_coordinates(std::span<const SampleStats>(stats), cfg, level);
}

}  // namespace synthcal
