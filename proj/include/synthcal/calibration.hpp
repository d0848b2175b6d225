#pragma once

// Miscoverage curves G(k) / L(k) over calibration questions and selection of
// the simulation sample size k-hat (simple and general methods).

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "synthcal/core_stats.hpp"
#include "synthcal/intervals.hpp"
#include "synthcal/parallel.hpp"

namespace synthcal {

// One survey question with its real responses and ordered synthetic
// responses. The synthetic order is meaningful: the prefix of length k
// defines the candidate set at sample size k. For dims > 1 responses are
// category indices in {0, ..., dims-1} and the target is the proportion
// vector.
struct CalibrationRecord {
    std::string question_id;
    std::vector<double> real_responses;
    std::vector<double> synthetic_responses;
    std::size_t dims = 1;
};

enum class Constructor { clt, bernstein, kl, box };
enum class Method { simple, general };

inline std::string to_string(Constructor c) {
    switch (c) {
        case Constructor::clt: return "clt";
        case Constructor::bernstein: return "bernstein";
        case Constructor::kl: return "kl";
        case Constructor::box: return "box";
    }
    return "?";
}

inline std::string to_string(Method m) {
    return m == Method::simple ? "simple" : "general";
}

inline Constructor constructor_from_string(const std::string& s) {
    if (s == "clt") return Constructor::clt;
    if (s == "bernstein") return Constructor::bernstein;
    if (s == "kl") return Constructor::kl;
    if (s == "box") return Constructor::box;
    throw std::invalid_argument("unknown constructor '" + s + "'");
}

inline Method method_from_string(const std::string& s) {
    if (s == "simple") return Method::simple;
    if (s == "general") return Method::general;
    throw std::invalid_argument("unknown method '" + s + "'");
}

struct CalibrationConfig {
    double alpha = 0.05;
    double gamma = 0.5;
    double dilation = 2.0;
    std::size_t budget = 0;  // K
    Constructor constructor = Constructor::bernstein;
    ResponseRange range{0.0, 1.0};
    Method method = Method::general;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw std::invalid_argument("CalibrationConfig: alpha must lie in (0,1)");
        if (!(gamma > 0.0 && gamma < 1.0))
            throw std::invalid_argument("CalibrationConfig: gamma must lie in (0,1)");
        if (!(dilation >= 1.0))
            throw std::invalid_argument("CalibrationConfig: dilation must be >= 1");
        if (budget < 1) throw std::invalid_argument("CalibrationConfig: budget K must be >= 1");
        range.validate();
    }

    // Simple method thresholds at alpha/2; the general method at gamma*alpha.
    double threshold() const {
        return method == Method::simple ? alpha / 2.0 : gamma * alpha;
    }

    IntervalConfig interval_config() const { return IntervalConfig{alpha, dilation, range}; }
};

struct CalibrationResult {
    std::size_t k_hat = 0;
    std::vector<double> curve;  // indexed by k = 0..K
    double kappa_hat = 0.0;     // k_hat / C
    double threshold = 0.0;
    Method method = Method::general;
    std::map<std::string, std::vector<bool>> per_question_flags;  // miss indicator per k
};

namespace detail {

inline std::size_t min_count_for(Constructor c) {
    return c == Constructor::bernstein ? 2 : 1;
}

inline void validate_record(const CalibrationRecord& rec, const CalibrationConfig& cfg) {
    if (rec.dims < 1)
        throw std::invalid_argument("record '" + rec.question_id + "': dims must be >= 1");
    if (rec.real_responses.empty())
        throw std::invalid_argument("record '" + rec.question_id + "': no real responses");
    if (rec.synthetic_responses.size() < cfg.budget)
        throw std::invalid_argument("record '" + rec.question_id + "': needs >= K = " +
                                    std::to_string(cfg.budget) + " synthetic responses, has " +
                                    std::to_string(rec.synthetic_responses.size()));
    if (rec.dims > 1) {
        for (double v : rec.real_responses)
            if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(rec.dims))
                throw std::invalid_argument("record '" + rec.question_id +
                                            "': category responses must be integers in [0, dims)");
        for (double v : rec.synthetic_responses)
            if (v != std::floor(v) || v < 0.0 || v >= static_cast<double>(rec.dims))
                throw std::invalid_argument("record '" + rec.question_id +
                                            "': category responses must be integers in [0, dims)");
        if (cfg.method == Method::simple)
            throw std::invalid_argument("record '" + rec.question_id +
                                        "': the simple method handles only dims = 1");
        if (cfg.constructor != Constructor::box)
            throw std::invalid_argument("record '" + rec.question_id +
                                        "': dims > 1 requires the box constructor");
    } else {
        for (double v : rec.real_responses)
            if (!cfg.range.contains(v))
                throw std::invalid_argument("record '" + rec.question_id +
                                            "': real response outside configured range");
        for (double v : rec.synthetic_responses)
            if (!cfg.range.contains(v))
                throw std::invalid_argument("record '" + rec.question_id +
                                            "': synthetic response outside configured range");
    }
}

// Per-coordinate prefix statistics over the first K synthetic responses of
// one record, giving O(1) set construction at every k.
class SyntheticPrefix {
public:
    SyntheticPrefix(const CalibrationRecord& rec, const CalibrationConfig& cfg)
        : cfg_(cfg), dims_(rec.dims) {
        const std::size_t K = cfg.budget;
        stats_.assign(dims_, std::vector<SampleStats>(K + 1));
        std::vector<PrefixStats> acc(dims_);
        ResponseRange coord_range = coordinate_range();
        for (std::size_t k = 1; k <= K; ++k) {
            double v = rec.synthetic_responses[k - 1];
            for (std::size_t c = 0; c < dims_; ++c) {
                double coord = dims_ == 1 ? v : (v == static_cast<double>(c) ? 1.0 : 0.0);
                acc[c].push(coord);
                stats_[c][k] = acc[c].stats(coord_range);
            }
        }
    }

    // Point-miss test for the simple method. For the KL constructor this is
    // the exact sub-level-set membership KL(ybar || point) <= threshold,
    // skipping endpoint bisection; other constructors test against the
    // materialized set.
    bool misses_point(std::size_t k, double point) const {
        if (k < min_count_for(cfg_.constructor)) return false;  // universe covers
        if (cfg_.constructor == Constructor::kl && dims_ == 1) {
            const SampleStats& s = stats_[0][k];
            double thr = cfg_.dilation * std::log(2.0 / cfg_.alpha) /
                         static_cast<double>(s.count);
            return kl_bernoulli(s.mean, point) > thr;
        }
        return !contains_point(set_at(k), point);
    }

    // Synthetic confidence set from the first k responses. k = 0 and sample
    // sizes below the constructor's minimum map to the method's universe
    // convention ([lo,hi]^d for the simple method, R^d for the general one).
    ConfidenceSet set_at(std::size_t k) const {
        if (k > cfg_.budget) throw std::invalid_argument("set_at: k exceeds budget");
        if (k < min_count_for(cfg_.constructor)) return universe();
        IntervalConfig icfg = cfg_.interval_config();
        if (dims_ == 1) {
            const SampleStats& s = stats_[0][k];
            switch (cfg_.constructor) {
                case Constructor::clt: return clt_interval(s, icfg);
                case Constructor::bernstein: return bernstein_interval(s, icfg);
                case Constructor::kl: return kl_interval(s, icfg);
                case Constructor::box: return clt_interval(s, icfg);
            }
        }
        std::vector<SampleStats> coord(dims_);
        for (std::size_t c = 0; c < dims_; ++c) coord[c] = stats_[c][k];
        icfg.range = coordinate_range();
        return box_from_coordinates(coord, icfg, 1.0 - cfg_.alpha);
    }

private:
    ResponseRange coordinate_range() const {
        return dims_ == 1 ? cfg_.range : ResponseRange{0.0, 1.0};
    }

    ConfidenceSet universe() const {
        if (cfg_.method == Method::simple) return universe_set(dims_, cfg_.range);
        return universe_set(dims_);
    }

    CalibrationConfig cfg_;
    std::size_t dims_;
    std::vector<std::vector<SampleStats>> stats_;  // [coordinate][k]
};

inline std::vector<double> real_point(const CalibrationRecord& rec,
                                      const CalibrationConfig& cfg) {
    if (rec.dims == 1) {
        return {sample_stats(rec.real_responses, cfg.range).mean};
    }
    std::vector<double> point(rec.dims, 0.0);
    for (double v : rec.real_responses) point[static_cast<std::size_t>(v)] += 1.0;
    for (double& p : point) p /= static_cast<double>(rec.real_responses.size());
    return point;
}

inline std::vector<SampleStats> real_coordinate_stats(const CalibrationRecord& rec,
                                                      const CalibrationConfig& cfg) {
    std::vector<SampleStats> out;
    if (rec.dims == 1) {
        out.push_back(sample_stats(rec.real_responses, cfg.range));
        return out;
    }
    ResponseRange unit{0.0, 1.0};
    for (std::size_t c = 0; c < rec.dims; ++c) {
        PrefixStats acc;
        for (double v : rec.real_responses)
            acc.push(v == static_cast<double>(c) ? 1.0 : 0.0);
        out.push_back(acc.stats(unit));
    }
    return out;
}

}  // namespace detail

// Synthetic confidence set from the first k responses of one record.
inline ConfidenceSet synthetic_set(const CalibrationRecord& rec, std::size_t k,
                                   const CalibrationConfig& cfg) {
    cfg.validate();
    detail::validate_record(rec, cfg);
    return detail::SyntheticPrefix(rec, cfg).set_at(k);
}

// CLT-based confidence set for the real-data parameter at level gamma
// (Bonferroni box across coordinates when dims > 1).
inline ConfidenceSet real_confidence_set(const CalibrationRecord& rec, double gamma,
                                         ResponseRange range = {0.0, 1.0}) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("real_confidence_set: gamma must lie in (0,1)");
    if (rec.real_responses.empty())
        throw std::invalid_argument("real_confidence_set: record '" + rec.question_id +
                                    "' has no real responses");
    CalibrationConfig probe;
    probe.range = range;
    std::vector<SampleStats> coord = detail::real_coordinate_stats(rec, probe);
    IntervalConfig icfg{1.0 - gamma, 1.0, rec.dims == 1 ? range : ResponseRange{0.0, 1.0}};
    return box_from_coordinates(coord, icfg, gamma);
}

// Simple-method miscoverage G(k): share of questions whose real sample mean
// falls outside the synthetic set built from the first k responses.
inline double miscoverage_simple(std::span<const CalibrationRecord> records, std::size_t k,
                                 const CalibrationConfig& cfg) {
    cfg.validate();
    if (records.empty()) throw std::invalid_argument("miscoverage_simple: no records");
    std::size_t misses = 0;
    for (const CalibrationRecord& rec : records) {
        detail::validate_record(rec, cfg);
        if (rec.dims != 1)
            throw std::invalid_argument("miscoverage_simple: the simple proxy is 1-D only");
        detail::SyntheticPrefix prefix(rec, cfg);
        if (prefix.misses_point(k, detail::real_point(rec, cfg)[0])) ++misses;
    }
    return static_cast<double>(misses) / static_cast<double>(records.size());
}

// General-method miscoverage L(k): share of questions whose real-data
// confidence set at level gamma is not contained in the synthetic set.
inline double miscoverage_general(std::span<const CalibrationRecord> records, std::size_t k,
                                  const CalibrationConfig& cfg) {
    cfg.validate();
    if (records.empty()) throw std::invalid_argument("miscoverage_general: no records");
    std::size_t misses = 0;
    for (const CalibrationRecord& rec : records) {
        detail::validate_record(rec, cfg);
        ConfidenceSet real_set = real_confidence_set(rec, cfg.gamma, cfg.range);
        ConfidenceSet syn = synthetic_set(rec, k, cfg);
        if (!contains_set(syn, real_set)) ++misses;
    }
    return static_cast<double>(misses) / static_cast<double>(records.size());
}

// Largest k such that curve[i] <= threshold for every i <= k (prefix rule,
// inclusive comparison). curve[0] must be 0.
inline std::size_t select_k(std::span<const double> curve, double threshold) {
    if (curve.empty()) throw std::invalid_argument("select_k: empty curve");
    if (!(threshold > 0.0 && threshold < 1.0))
        throw std::invalid_argument("select_k: threshold must lie in (0,1)");
    if (curve[0] != 0.0)
        throw std::invalid_argument("select_k: curve[0] must be 0 (universe convention)");
    std::size_t k_hat = 0;
    for (std::size_t k = 1; k < curve.size(); ++k) {
        if (curve[k] <= threshold)
            k_hat = k;
        else
            break;
    }
    return k_hat;
}

inline std::size_t select_k(const std::vector<double>& curve, double threshold) {
    return select_k(std::span<const double>(curve), threshold);
}

// Full selection pipeline: miscoverage curve for k = 0..K with the method's
// metric, prefix-rule selection, kappa_hat = k_hat / C. A result of
// k_hat = 0 is legal and means the synthetic source is unusable at this
// alpha.
inline CalibrationResult calibrate(std::span<const CalibrationRecord> records,
                                   const CalibrationConfig& cfg, unsigned threads = 1) {
    cfg.validate();
    if (records.empty()) throw std::invalid_argument("calibrate: no records");
    for (const CalibrationRecord& rec : records) detail::validate_record(rec, cfg);

    const std::size_t K = cfg.budget;
    const std::size_t m = records.size();

    // Per-record miss flags for k = 0..K, computed independently per record.
    std::vector<std::vector<bool>> flags(m);
    parallel_for(m, threads, [&](std::size_t j) {
        const CalibrationRecord& rec = records[j];
        detail::SyntheticPrefix prefix(rec, cfg);
        std::vector<bool> miss(K + 1, false);
        if (cfg.method == Method::simple) {
            double point = detail::real_point(rec, cfg)[0];
            for (std::size_t k = 1; k <= K; ++k) miss[k] = prefix.misses_point(k, point);
        } else {
            ConfidenceSet real_set = real_confidence_set(rec, cfg.gamma, cfg.range);
            for (std::size_t k = 1; k <= K; ++k)
                miss[k] = !contains_set(prefix.set_at(k), real_set);
        }
        flags[j] = std::move(miss);
    });

    CalibrationResult result;
    result.curve.assign(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        std::size_t misses = 0;
        for (std::size_t j = 0; j < m; ++j) misses += flags[j][k] ? 1 : 0;
        result.curve[k] = static_cast<double>(misses) / static_cast<double>(m);
    }
    result.threshold = cfg.threshold();
    result.method = cfg.method;
    result.k_hat = select_k(result.curve, result.threshold);
    result.kappa_hat = static_cast<double>(result.k_hat) / cfg.dilation;
    for (std::size_t j = 0; j < m; ++j)
        result.per_question_flags[records[j].question_id] = std::move(flags[j]);
    return result;
}

inline CalibrationResult calibrate(const std::vector<CalibrationRecord>& records,
                                   const CalibrationConfig& cfg, unsigned threads = 1) {
    return calibrate(std::span<const CalibrationRecord>(records), cfg, threads);
}

}  // namespace synthcal
