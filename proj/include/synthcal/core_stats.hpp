#pragma once

// Elementary statistical kernels shared by every other module: the inverse
// normal CDF, Bernoulli divergences, empirical quantiles, sample statistics
// and seeded RNG streams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace synthcal {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed numeric range [lo, hi] of survey responses.
struct ResponseRange {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }

    void validate() const {
        if (!(lo < hi))
            throw std::invalid_argument("ResponseRange: lo must be < hi, got [" +
                                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }

    bool contains(double v) const { return v >= lo && v <= hi; }
    bool is_unit() const { return lo == 0.0 && hi == 1.0; }
};

// -------------------------------------------------------------------------
// Normal quantile
// -------------------------------------------------------------------------

namespace detail {

// Standard normal CDF via erfc.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

inline double normal_pdf(double z) {
    static const double inv_sqrt_2pi = 0.3989422804014326779;
    return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

}  // namespace detail

// Inverse standard normal CDF. Rational approximation (Acklam) followed by
// one Newton step, absolute error well below 1e-8 on (0,1).
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie in (0,1), got " +
                                    std::to_string(p));

    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    // One Newton refinement against the erfc-based CDF.
    double err = detail::normal_cdf(x) - p;
    double pdf = detail::normal_pdf(x);
    if (pdf > 0.0) x -= err / pdf;
    return x;
}

// -------------------------------------------------------------------------
// Bernoulli divergences
// -------------------------------------------------------------------------

// KL(Ber(q) || Ber(p)) with the limit convention 0*log 0 = 0. For p in {0,1}
// with mismatched q the divergence is +infinity (returned, not thrown).
inline double kl_bernoulli(double q, double p) {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::invalid_argument("kl_bernoulli: q must lie in [0,1], got " + std::to_string(q));
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("kl_bernoulli: p must lie in [0,1], got " + std::to_string(p));
    if (p == 0.0) return q == 0.0 ? 0.0 : kInf;
    if (p == 1.0) return q == 1.0 ? 0.0 : kInf;
    double acc = 0.0;
    if (q > 0.0) acc += q * std::log(q / p);
    if (q < 1.0) acc += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
    return std::max(acc, 0.0);
}

// Chi-squared divergence between Ber(mu) and Ber(mu_syn):
// (mu - mu_syn)^2 / (mu_syn (1 - mu_syn)). The synthetic mean must be
// non-degenerate.
inline double chi2_bernoulli(double mu, double mu_syn) {
    if (!(mu >= 0.0 && mu <= 1.0))
        throw std::invalid_argument("chi2_bernoulli: mu must lie in [0,1], got " +
                                    std::to_string(mu));
    if (!(mu_syn >= 0.0 && mu_syn <= 1.0))
        throw std::invalid_argument("chi2_bernoulli: mu_syn must lie in [0,1], got " +
                                    std::to_string(mu_syn));
    if (mu_syn == 0.0 || mu_syn == 1.0)
        throw std::domain_error("chi2_bernoulli: degenerate synthetic mean " +
                                std::to_string(mu_syn));
    double gap = mu - mu_syn;
    return gap * gap / (mu_syn * (1.0 - mu_syn));
}

// -------------------------------------------------------------------------
// Quantiles and sample statistics
// -------------------------------------------------------------------------

// Left-continuous generalized inverse: the smallest sample value x with
// (#samples <= x)/n >= level. The result is always an observed sample.
inline double empirical_quantile(std::span<const double> samples, double level) {
    if (samples.empty()) throw std::invalid_argument("empirical_quantile: empty sample list");
    if (!(level > 0.0 && level < 1.0))
        throw std::invalid_argument("empirical_quantile: level must lie in (0,1), got " +
                                    std::to_string(level));
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (static_cast<double>(i + 1) / n >= level) return sorted[i];
    }
    return sorted.back();
}

inline double empirical_quantile(const std::vector<double>& samples, double level) {
    return empirical_quantile(std::span<const double>(samples), level);
}

// Count, mean and standard deviation of one response sample. For binary
// responses on the unit range the std is the plug-in sqrt(mean*(1-mean));
// otherwise it is the unbiased sample standard deviation.
struct SampleStats {
    std::size_t count = 0;
    double mean = 0.0;
    double std = 0.0;
};

// Single-pass (Welford) accumulator producing SampleStats for every prefix.
// Keeps the binary/continuous std rule in one place.
class PrefixStats {
public:
    void push(double x) {
        ++n_;
        double delta = x - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (x - mean_);
        if (x != 0.0 && x != 1.0) binary_ = false;
    }

    std::size_t count() const { return n_; }
    bool all_binary() const { return binary_; }

    SampleStats stats(const ResponseRange& range) const {
        if (n_ == 0) throw std::invalid_argument("PrefixStats: no samples accumulated");
        SampleStats s;
        s.count = n_;
        s.mean = mean_;
        if (n_ == 1) {
            s.std = 0.0;
        } else if (binary_ && range.is_unit()) {
            s.std = std::sqrt(std::max(mean_ * (1.0 - mean_), 0.0));
        } else {
            s.std = std::sqrt(std::max(m2_, 0.0) / static_cast<double>(n_ - 1));
        }
        return s;
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    bool binary_ = true;
};

inline SampleStats sample_stats(std::span<const double> values, const ResponseRange& range) {
    range.validate();
    if (values.empty()) throw std::invalid_argument("sample_stats: empty input");
    PrefixStats acc;
    for (double v : values) {
        if (!range.contains(v))
            throw std::invalid_argument("sample_stats: value " + std::to_string(v) +
                                        " outside range [" + std::to_string(range.lo) + ", " +
                                        std::to_string(range.hi) + "]");
        acc.push(v);
    }
    return acc.stats(range);
}

inline SampleStats sample_stats(const std::vector<double>& values, const ResponseRange& range) {
    return sample_stats(std::span<const double>(values), range);
}

// -------------------------------------------------------------------------
// Seeded RNG streams
// -------------------------------------------------------------------------

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Deterministic stream of random draws keyed by (master_seed, stream_id).
// Identical keys produce byte-identical sequences on every platform; all
// draw primitives avoid std::distributions, whose output is
// implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : engine_(detail::splitmix64(detail::splitmix64(master_seed) ^
                                     detail::splitmix64(stream_id + 0x6A09E667F3BCC909ULL))) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on the open interval (0,1).
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() { return normal_quantile(uniform()); }

    // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("RngStream::below: n must be positive");
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace synthcal
