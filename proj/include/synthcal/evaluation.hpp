#pragma once

// Test-set evaluation: proxies G_te / L_te, the oracle test sample size,
// interval half-width reporting and repeated train/test splitting.

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthcal/calibration.hpp"
#include "synthcal/core_stats.hpp"
#include "synthcal/parallel.hpp"

namespace synthcal {

struct SplitPlan {
    std::uint64_t seed = 0;
    std::size_t n_splits = 100;
    double train_fraction = 0.6;  // the 3:2 convention

    void validate() const {
        if (n_splits < 1) throw std::invalid_argument("SplitPlan: n_splits must be >= 1");
        if (!(train_fraction > 0.0 && train_fraction < 1.0))
            throw std::invalid_argument("SplitPlan: train_fraction must lie in (0,1)");
    }
};

namespace detail {

// Miss indicators for k = 0..K over a set of records, simple (point) or
// general (set-containment) style.
inline std::vector<double> miss_curve(std::span<const CalibrationRecord> records,
                                      const CalibrationConfig& cfg, unsigned threads) {
    const std::size_t K = cfg.budget;
    std::vector<std::vector<bool>> flags(records.size());
    parallel_for(records.size(), threads, [&](std::size_t j) {
        const CalibrationRecord& rec = records[j];
        validate_record(rec, cfg);
        SyntheticPrefix prefix(rec, cfg);
        std::vector<bool> miss(K + 1, false);
        if (cfg.method == Method::simple) {
            double point = real_point(rec, cfg)[0];
            for (std::size_t k = 1; k <= K; ++k) miss[k] = prefix.misses_point(k, point);
        } else {
            ConfidenceSet real_set = real_confidence_set(rec, cfg.gamma, cfg.range);
            for (std::size_t k = 1; k <= K; ++k)
                miss[k] = !contains_set(prefix.set_at(k), real_set);
        }
        flags[j] = std::move(miss);
    });
    std::vector<double> curve(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        std::size_t misses = 0;
        for (const auto& f : flags) misses += f[k] ? 1 : 0;
        curve[k] = static_cast<double>(misses) / static_cast<double>(records.size());
    }
    return curve;
}

}  // namespace detail

// Simple-method test proxy with its leading factor 2; may exceed 1.
inline double g_te(std::span<const CalibrationRecord> test_records, std::size_t k,
                   const CalibrationConfig& cfg) {
    cfg.validate();
    if (test_records.empty()) throw std::invalid_argument("g_te: empty test set");
    CalibrationConfig simple_cfg = cfg;
    simple_cfg.method = Method::simple;
    return 2.0 * miscoverage_simple(test_records, k, simple_cfg);
}

// General-method test proxy scaled by 1/gamma.
inline double l_te(std::span<const CalibrationRecord> test_records, std::size_t k,
                   const CalibrationConfig& cfg) {
    cfg.validate();
    if (test_records.empty()) throw std::invalid_argument("l_te: empty test set");
    CalibrationConfig general_cfg = cfg;
    general_cfg.method = Method::general;
    return miscoverage_general(test_records, k, general_cfg) / cfg.gamma;
}

namespace detail {

// Test proxy curve for k = 0..K using the method's own proxy.
inline std::vector<double> proxy_curve(std::span<const CalibrationRecord> test_records,
                                       const CalibrationConfig& cfg, unsigned threads) {
    std::vector<double> curve = miss_curve(test_records, cfg, threads);
    double factor = cfg.method == Method::simple ? 2.0 : 1.0 / cfg.gamma;
    for (double& v : curve) v *= factor;
    return curve;
}

}  // namespace detail

// Oracle test sample size: the largest k in [0, K] whose proxy stays at or
// below alpha. Pointwise maximum, deliberately not the prefix rule of
// select_k.
inline std::size_t oracle_k_te(std::span<const CalibrationRecord> test_records,
                               const CalibrationConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    if (test_records.empty()) throw std::invalid_argument("oracle_k_te: empty test set");
    std::vector<double> curve = detail::proxy_curve(test_records, cfg, threads);
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
        if (curve[k] <= cfg.alpha) best = k;
    return best;
}

struct SplitResult {
    std::size_t split = 0;
    std::size_t k_hat = 0;
    double proxy_at_k_hat = 0.0;  // G_te or L_te at k_hat
    std::size_t k_star_te = 0;
    std::optional<double> relative_error;  // absent when k_star_te = 0
    double mean_halfwidth = 0.0;           // +inf when the selected set is unbounded
    double kappa_hat = 0.0;
};

struct AggregateStat {
    double mean = 0.0;
    double std_error = 0.0;      // stdev / sqrt(n)
    double ci95_halfwidth = 0.0;  // 1.96 * std_error
    std::size_t n = 0;
};

struct EvaluationReport {
    std::vector<SplitResult> per_split;
    std::map<std::string, AggregateStat> aggregate;
};

namespace detail {

inline AggregateStat aggregate_values(const std::vector<double>& values) {
    AggregateStat agg;
    agg.n = values.size();
    if (values.empty()) return agg;
    double acc = 0.0;
    for (double v : values) acc += v;
    agg.mean = acc / static_cast<double>(values.size());
    if (values.size() > 1 && std::isfinite(agg.mean)) {
        double ss = 0.0;
        for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
        double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        agg.std_error = sd / std::sqrt(static_cast<double>(values.size()));
    }
    agg.ci95_halfwidth = 1.96 * agg.std_error;
    return agg;
}

}  // namespace detail

// Repeated train/test evaluation: per split, calibrate on the train side,
// score the selected k on the test side, and compare with the oracle test
// sample size. Splits partition question ids disjointly and exhaustively.
inline EvaluationReport run_splits(std::span<const CalibrationRecord> all_records,
                                   const CalibrationConfig& cfg, const SplitPlan& plan,
                                   unsigned threads = 1) {
    cfg.validate();
    plan.validate();
    if (all_records.size() < 2)
        throw std::invalid_argument("run_splits: need at least 2 questions");
    const std::size_t m = all_records.size();
    const auto train_size = static_cast<std::size_t>(
        std::llround(plan.train_fraction * static_cast<double>(m)));
    if (train_size == 0 || train_size >= m)
        throw std::invalid_argument("run_splits: degenerate split (empty train or test side)");

    EvaluationReport report;
    report.per_split.resize(plan.n_splits);
    parallel_for(plan.n_splits, threads, [&](std::size_t s) {
        RngStream rng(plan.seed, s);
        std::vector<std::size_t> order(m);
        for (std::size_t i = 0; i < m; ++i) order[i] = i;
        rng.shuffle(order);

        std::vector<CalibrationRecord> train, test;
        train.reserve(train_size);
        test.reserve(m - train_size);
        for (std::size_t i = 0; i < m; ++i)
            (i < train_size ? train : test).push_back(all_records[order[i]]);

        CalibrationResult cal = calibrate(train, cfg);
        std::vector<double> test_curve = detail::proxy_curve(test, cfg, 1);

        SplitResult r;
        r.split = s;
        r.k_hat = cal.k_hat;
        r.proxy_at_k_hat = test_curve[cal.k_hat];
        std::size_t k_star = 0;
        for (std::size_t k = 1; k < test_curve.size(); ++k)
            if (test_curve[k] <= cfg.alpha) k_star = k;
        r.k_star_te = k_star;
        if (k_star > 0) {
            double num = std::abs(static_cast<double>(cal.k_hat) - static_cast<double>(k_star));
            r.relative_error = num / static_cast<double>(k_star);
        }
        double hw_acc = 0.0;
        for (const CalibrationRecord& rec : test)
            hw_acc += synthetic_set(rec, cal.k_hat, cfg).mean_halfwidth();
        r.mean_halfwidth = hw_acc / static_cast<double>(test.size());
        r.kappa_hat = cal.kappa_hat;
        report.per_split[s] = std::move(r);
    });

    auto collect = [&](auto&& get) {
        std::vector<double> vals;
        for (const SplitResult& r : report.per_split) {
            std::optional<double> v = get(r);
            if (v) vals.push_back(*v);
        }
        return vals;
    };
    using R = const SplitResult&;
    report.aggregate["k_hat"] = detail::aggregate_values(
        collect([](R r) { return std::optional<double>(static_cast<double>(r.k_hat)); }));
    report.aggregate["proxy_at_k_hat"] = detail::aggregate_values(
        collect([](R r) { return std::optional<double>(r.proxy_at_k_hat); }));
    report.aggregate["k_star_te"] = detail::aggregate_values(
        collect([](R r) { return std::optional<double>(static_cast<double>(r.k_star_te)); }));
    report.aggregate["relative_error"] =
        detail::aggregate_values(collect([](R r) { return r.relative_error; }));
    report.aggregate["mean_halfwidth"] = detail::aggregate_values(
        collect([](R r) { return std::optional<double>(r.mean_halfwidth); }));
    report.aggregate["kappa_hat"] = detail::aggregate_values(
        collect([](R r) { return std::optional<double>(r.kappa_hat); }));
    return report;
}

inline EvaluationReport run_splits(const std::vector<CalibrationRecord>& records,
                                   const CalibrationConfig& cfg, const SplitPlan& plan,
                                   unsigned threads = 1) {
    return run_splits(std::span<const CalibrationRecord>(records), cfg, plan, threads);
}

}  // namespace synthcal
