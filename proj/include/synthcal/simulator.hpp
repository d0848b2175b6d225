#pragma once

// Controllable population laboratory: agent-pool ("Mechanical Turk") response
// model, discrepancy metrics with quantiles, Monte Carlo oracle sample sizes
// and the bootstrap variance-ratio check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <cstring>
#include <string>
#include <vector>

#include "synthcal/calibration.hpp"
#include "synthcal/core_stats.hpp"
#include "synthcal/parallel.hpp"

namespace synthcal {

namespace detail {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Gauss-Legendre nodes/weights on [-1,1], computed once by Newton iteration
// on the Legendre polynomial.
inline const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre_64() {
    static const auto table = [] {
        const int n = 64;
        std::vector<double> nodes(n), weights(n);
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double pp = 0.0;
            for (int iter = 0; iter < 100; ++iter) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                pp = n * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / pp;
                x -= dx;
                if (std::abs(dx) < 1e-15) break;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        }
        return std::make_pair(nodes, weights);
    }();
    return table;
}

// Integral of f over [a,b] by 64-point Gauss-Legendre.
template <class F>
double integrate(F&& f, double a, double b) {
    const auto& [nodes, weights] = gauss_legendre_64();
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        acc += weights[i] * f(mid + half * nodes[i]);
    return acc * half;
}

inline double beta_pdf(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return std::exp(log_norm + (a - 1.0) * std::log(x) + (b - 1.0) * std::log(1.0 - x));
}

// Marsaglia-Tsang gamma sampler; deterministic given the stream.
inline double gamma_sample(double shape, RngStream& rng) {
    if (shape < 1.0) {
        double u = rng.uniform();
        return gamma_sample(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
        double x = rng.normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline double beta_sample(double a, double b, RngStream& rng) {
    double g1 = gamma_sample(a, rng);
    double g2 = gamma_sample(b, rng);
    return g1 / (g1 + g2);
}

inline std::uint64_t stream_id_for(double psi) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(psi));
    std::memcpy(&bits, &psi, sizeof(bits));
    return bits;
}

}  // namespace detail

// Ground-truth population: a distribution over agent profiles, a performance
// function F(profile, question) in [0,1], and an i.i.d. question
// distribution. Closed-form mean hooks make coverage counting exact; when
// they are absent a Monte Carlo fallback is used.
struct PopulationModel {
    std::string name;
    std::function<double(RngStream&)> sample_profile;    // z ~ P
    std::function<double(double, double)> performance;   // F(z, psi)
    std::function<double(RngStream&)> sample_question;   // psi ~ Pi
    std::function<double(double)> mean_closed;           // mu(psi); empty -> MC fallback
    std::function<double(double)> second_moment_closed;  // E_z F(z,psi)^2
    std::function<double(double)> syn_mean_closed;       // mu_syn(psi) when no agent pool
};

namespace presets {

// Agent skill 2*Beta(a,b)-1 on [-1,1], question difficulty Uniform[-1,1],
// performance logistic(skill - difficulty). Symmetric: mu(0) = 1/2 when
// a = b.
inline PopulationModel beta_logistic(double a = 2.0, double b = 2.0) {
    PopulationModel pop;
    pop.name = "beta-logistic(" + std::to_string(a) + "," + std::to_string(b) + ")";
    pop.sample_profile = [a, b](RngStream& rng) {
        return 2.0 * detail::beta_sample(a, b, rng) - 1.0;
    };
    pop.performance = [](double z, double psi) { return detail::logistic(z - psi); };
    pop.sample_question = [](RngStream& rng) { return rng.uniform(-1.0, 1.0); };
    pop.mean_closed = [a, b](double psi) {
        return detail::integrate(
            [a, b, psi](double x) {
                return detail::logistic(2.0 * x - 1.0 - psi) * detail::beta_pdf(x, a, b);
            },
            0.0, 1.0);
    };
    pop.second_moment_closed = [a, b](double psi) {
        return detail::integrate(
            [a, b, psi](double x) {
                double f = detail::logistic(2.0 * x - 1.0 - psi);
                return f * f * detail::beta_pdf(x, a, b);
            },
            0.0, 1.0);
    };
    pop.syn_mean_closed = pop.mean_closed;  // aligned unless an agent pool is drawn
    return pop;
}

// Two-point agent pool: performance f_lo or f_hi with equal probability,
// independent of the question. Closed moments for exact checks.
inline PopulationModel two_point(double f_lo = 0.2, double f_hi = 0.8) {
    if (!(f_lo >= 0.0 && f_lo <= 1.0 && f_hi >= 0.0 && f_hi <= 1.0))
        throw std::invalid_argument("two_point: performance levels must lie in [0,1]");
    PopulationModel pop;
    pop.name = "two-point(" + std::to_string(f_lo) + "," + std::to_string(f_hi) + ")";
    pop.sample_profile = [f_lo, f_hi](RngStream& rng) {
        return rng.bernoulli(0.5) ? f_hi : f_lo;
    };
    pop.performance = [](double z, double) { return z; };
    pop.sample_question = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.mean_closed = [f_lo, f_hi](double) { return 0.5 * (f_lo + f_hi); };
    pop.second_moment_closed = [f_lo, f_hi](double) {
        return 0.5 * (f_lo * f_lo + f_hi * f_hi);
    };
    pop.syn_mean_closed = pop.mean_closed;
    return pop;
}

// Uniform skill with identity performance: mu(psi) = 1/2 for every question.
inline PopulationModel uniform_identity() {
    PopulationModel pop;
    pop.name = "uniform-identity";
    pop.sample_profile = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.performance = [](double z, double) { return z; };
    pop.sample_question = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.mean_closed = [](double) { return 0.5; };
    pop.second_moment_closed = [](double) { return 1.0 / 3.0; };
    pop.syn_mean_closed = pop.mean_closed;
    return pop;
}

// Heterogeneous binary-skill population: questions fall into hash buckets,
// and on each bucket an agent answers well (probability 1 - p_low) or badly
// (p_low), with the assignment varying independently across buckets. Agents
// come in complementary pairs, so the population mean is exactly 1/2 on
// every question. Large between-agent variance with high effective rank
// across questions; the sharpest preset for hidden-pool recovery checks.
inline PopulationModel binary_skill(double p_low = 0.05, std::size_t n_buckets = 200) {
    if (!(p_low > 0.0 && p_low < 0.5))
        throw std::invalid_argument("binary_skill: p_low must lie in (0, 0.5)");
    if (n_buckets < 1) throw std::invalid_argument("binary_skill: need at least one bucket");
    const double p_high = 1.0 - p_low;
    auto bucket_of = [n_buckets](double psi) {
        auto b = static_cast<std::size_t>(psi * static_cast<double>(n_buckets));
        return b >= n_buckets ? n_buckets - 1 : b;
    };
    auto hash_bit = [](double w, std::size_t bucket) {
        std::uint64_t h = detail::splitmix64(detail::stream_id_for(w) ^
                                             detail::splitmix64(bucket + 1));
        return (h & 1ULL) != 0;
    };
    PopulationModel pop;
    pop.name = "binary-skill(" + std::to_string(p_low) + "," + std::to_string(n_buckets) + ")";
    pop.sample_profile = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.performance = [=](double z, double psi) {
        // z < 1/2: hashed skill table over 2z; z >= 1/2: complement of the
        // table over 2z-1. The two halves cancel exactly in the mean.
        std::size_t b = bucket_of(psi);
        if (z < 0.5) return hash_bit(2.0 * z, b) ? p_high : p_low;
        return hash_bit(2.0 * z - 1.0, b) ? p_low : p_high;
    };
    pop.sample_question = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.mean_closed = [](double) { return 0.5; };
    pop.syn_mean_closed = pop.mean_closed;
    return pop;
}

// Continuous cousin of binary_skill: per question bucket an agent's success
// probability is uniform on [p_low, 1-p_low], independently across buckets,
// again with complementary agent pairs for an exact population mean of 1/2.
// Smooth discrepancy distribution; the pool enters only through hash cells.
inline PopulationModel continuous_skill(double p_low = 0.05, std::size_t n_buckets = 200) {
    if (!(p_low >= 0.0 && p_low < 0.5))
        throw std::invalid_argument("continuous_skill: p_low must lie in [0, 0.5)");
    if (n_buckets < 1)
        throw std::invalid_argument("continuous_skill: need at least one bucket");
    const double span = 1.0 - 2.0 * p_low;
    auto bucket_of = [n_buckets](double psi) {
        auto b = static_cast<std::size_t>(psi * static_cast<double>(n_buckets));
        return b >= n_buckets ? n_buckets - 1 : b;
    };
    auto hash01 = [](double w, std::size_t bucket) {
        std::uint64_t h = detail::splitmix64(detail::stream_id_for(w) ^
                                             detail::splitmix64(bucket + 1));
        return static_cast<double>(h >> 11) * 0x1.0p-53;
    };
    PopulationModel pop;
    pop.name =
        "continuous-skill(" + std::to_string(p_low) + "," + std::to_string(n_buckets) + ")";
    pop.sample_profile = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.performance = [=](double z, double psi) {
        std::size_t b = bucket_of(psi);
        if (z < 0.5) return p_low + span * hash01(2.0 * z, b);
        return p_low + span * (1.0 - hash01(2.0 * z - 1.0, b));
    };
    pop.sample_question = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.mean_closed = [](double) { return 0.5; };
    pop.syn_mean_closed = pop.mean_closed;
    return pop;
}

// Fixed real and synthetic means on every question; the minimal
// distribution-shift population.
inline PopulationModel constant_means(double mu, double mu_syn) {
    if (!(mu >= 0.0 && mu <= 1.0 && mu_syn >= 0.0 && mu_syn <= 1.0))
        throw std::invalid_argument("constant_means: means must lie in [0,1]");
    PopulationModel pop;
    pop.name = "constant(" + std::to_string(mu) + "->" + std::to_string(mu_syn) + ")";
    pop.sample_profile = [mu](RngStream&) { return mu; };
    pop.performance = [](double z, double) { return z; };
    pop.sample_question = [](RngStream& rng) { return rng.uniform(0.0, 1.0); };
    pop.mean_closed = [mu](double) { return mu; };
    pop.second_moment_closed = [mu](double) { return mu * mu; };
    pop.syn_mean_closed = [mu_syn](double) { return mu_syn; };
    return pop;
}

// Copy of a preset whose synthetic mean is shifted by a constant (clamped to
// [0,1]).
inline PopulationModel with_shift(PopulationModel pop, double shift) {
    if (!pop.mean_closed)
        throw std::invalid_argument("with_shift: base population needs a closed mean");
    auto base = pop.mean_closed;
    pop.name += "+shift(" + std::to_string(shift) + ")";
    pop.syn_mean_closed = [base, shift](double psi) {
        return std::clamp(base(psi) + shift, 0.0, 1.0);
    };
    return pop;
}

}  // namespace presets

// Hidden pool of kappa agents drawn i.i.d. from the population. The
// synthetic response mean for a question is exactly the agents' average
// performance; there is no extra sampling noise in the mean itself.
struct MTurkModel {
    std::vector<double> profiles;
    std::function<double(double, double)> performance;

    std::size_t kappa() const { return profiles.size(); }

    double mean(double psi) const {
        double acc = 0.0;
        for (double z : profiles) acc += performance(z, psi);
        return acc / static_cast<double>(profiles.size());
    }
};

inline MTurkModel draw_mturk(const PopulationModel& pop, std::size_t kappa, RngStream& rng) {
    if (kappa < 1) throw std::invalid_argument("draw_mturk: kappa must be >= 1");
    MTurkModel model;
    model.profiles.reserve(kappa);
    for (std::size_t i = 0; i < kappa; ++i) model.profiles.push_back(pop.sample_profile(rng));
    model.performance = pop.performance;
    return model;
}

struct MeanEstimate {
    double value = 0.0;
    double std_error = 0.0;  // 0 for closed-form evaluations
};

// Population mean response mu(psi): closed form where the preset provides
// one, otherwise a Monte Carlo average of F over profile draws with its
// standard error.
inline MeanEstimate true_mean(const PopulationModel& pop, double psi,
                              std::size_t mc_draws = 1'000'000, std::uint64_t mc_seed = 0) {
    if (pop.mean_closed) return {pop.mean_closed(psi), 0.0};
    if (!pop.sample_profile || !pop.performance)
        throw std::invalid_argument("true_mean: population lacks both closed form and sampler");
    RngStream rng(mc_seed, detail::stream_id_for(psi));
    PrefixStats acc;
    for (std::size_t i = 0; i < mc_draws; ++i)
        acc.push(pop.performance(pop.sample_profile(rng), psi));
    SampleStats s = acc.stats(ResponseRange{0.0, 1.0});
    return {s.mean, s.std / std::sqrt(static_cast<double>(mc_draws))};
}

inline double synthetic_mean(const MTurkModel& mturk, double psi) { return mturk.mean(psi); }

// Synthetic mean from an agent pool when present, else the population's own
// synthetic-side mean.
inline double synthetic_mean(const PopulationModel& pop, const MTurkModel* mturk, double psi) {
    if (mturk) return mturk->mean(psi);
    if (pop.syn_mean_closed) return pop.syn_mean_closed(psi);
    throw std::invalid_argument("synthetic_mean: no agent pool and no synthetic mean");
}

// n i.i.d. Bernoulli(mean) responses as 0/1 doubles.
inline std::vector<double> sample_responses(double mean, std::size_t n, RngStream& rng) {
    if (!(mean >= 0.0 && mean <= 1.0))
        throw std::invalid_argument("sample_responses: mean must lie in [0,1]");
    if (n < 1) throw std::invalid_argument("sample_responses: n must be >= 1");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = rng.bernoulli(mean) ? 1.0 : 0.0;
    return out;
}

// m calibration questions with n real and K synthetic Bernoulli responses
// each. Real and synthetic streams are independent given the question.
inline std::vector<CalibrationRecord> make_calibration_records(
    const PopulationModel& pop, const MTurkModel* mturk, std::size_t m, std::size_t n,
    std::size_t K, std::uint64_t seed) {
    if (m < 1 || n < 1 || K < 1)
        throw std::invalid_argument("make_calibration_records: m, n, K must be >= 1");
    std::vector<CalibrationRecord> records;
    records.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
        RngStream q_rng(seed, 3 * j);
        RngStream real_rng(seed, 3 * j + 1);
        RngStream syn_rng(seed, 3 * j + 2);
        double psi = pop.sample_question(q_rng);
        double mu = true_mean(pop, psi).value;
        double mu_syn = synthetic_mean(pop, mturk, psi);
        CalibrationRecord rec;
        rec.question_id = "q" + std::to_string(j);
        rec.real_responses = sample_responses(mu, n, real_rng);
        rec.synthetic_responses = sample_responses(mu_syn, K, syn_rng);
        records.push_back(std::move(rec));
    }
    return records;
}

// Per-question chi-squared and KL discrepancies with empirical quantiles.
// Questions with a degenerate synthetic mean are flagged, counted and
// excluded from the quantiles.
struct QuestionDiscrepancy {
    double question = 0.0;
    double chi2 = 0.0;
    double kl = 0.0;
    bool degenerate = false;
};

struct DiscrepancyReport {
    std::vector<QuestionDiscrepancy> per_question;
    std::map<double, double> chi2_quantiles;  // level -> value
    std::map<double, double> kl_quantiles;
    std::size_t degenerate_count = 0;
};

inline DiscrepancyReport discrepancies(const PopulationModel& pop, const MTurkModel* mturk,
                                       std::span<const double> questions,
                                       std::span<const double> quantile_levels) {
    if (questions.empty()) throw std::invalid_argument("discrepancies: no questions");
    DiscrepancyReport report;
    std::vector<double> chi2_values, kl_values;
    for (double psi : questions) {
        QuestionDiscrepancy q;
        q.question = psi;
        double mu = true_mean(pop, psi).value;
        double mu_syn = synthetic_mean(pop, mturk, psi);
        if (mu_syn <= 0.0 || mu_syn >= 1.0) {
            q.degenerate = true;
            ++report.degenerate_count;
        } else {
            q.chi2 = chi2_bernoulli(mu, mu_syn);
            q.kl = kl_bernoulli(mu_syn, mu);
            chi2_values.push_back(q.chi2);
            kl_values.push_back(q.kl);
        }
        report.per_question.push_back(q);
    }
    if (!chi2_values.empty()) {
        for (double level : quantile_levels) {
            report.chi2_quantiles[level] = empirical_quantile(chi2_values, level);
            report.kl_quantiles[level] = empirical_quantile(kl_values, level);
        }
    }
    return report;
}

// Monte Carlo estimate of the oracle sample size: the largest k <= k_max
// whose estimated coverage P(mu(psi) in I_syn(k; C)) stays at or above
// 1 - alpha. Censored when coverage at k_max is still above target.
struct OracleMc {
    std::size_t n_questions = 1000;
    std::size_t n_reps = 1;
};

struct OracleResult {
    std::size_t k_star = 0;
    bool censored = false;
    double coverage_at_k_star = 0.0;
    double std_error = 0.0;
    std::vector<double> coverage;  // indexed by k, entry 0 is 1 by convention
};

inline OracleResult oracle_k_star(const PopulationModel& pop, const MTurkModel* mturk,
                                  double dilation, Constructor ctor, double alpha, OracleMc mc,
                                  std::size_t k_max, std::uint64_t seed, unsigned threads = 1) {
    if (ctor != Constructor::clt && ctor != Constructor::kl)
        throw std::invalid_argument("oracle_k_star: constructor must be clt or kl");
    if (k_max < 1) throw std::invalid_argument("oracle_k_star: k_max must be >= 1");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("oracle_k_star: alpha must lie in (0,1)");
    if (!(dilation >= 1.0)) throw std::invalid_argument("oracle_k_star: dilation must be >= 1");
    if (mc.n_questions * mc.n_reps < 1000)
        throw std::invalid_argument("oracle_k_star: need at least 1000 Monte Carlo pairs");

    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double kl_log = std::log(2.0 / alpha);
    std::vector<std::uint64_t> covered(k_max + 1, 0);
    std::mutex merge_mutex;

    parallel_for(mc.n_questions, threads, [&](std::size_t qi) {
        RngStream q_rng(seed, 2 * qi);
        double psi = pop.sample_question(q_rng);
        double mu = true_mean(pop, psi).value;
        double mu_syn = synthetic_mean(pop, mturk, psi);
        std::vector<std::uint32_t> local(k_max + 1, 0);
        for (std::size_t rep = 0; rep < mc.n_reps; ++rep) {
            RngStream rng(seed, 2 * (mc.n_questions + qi * mc.n_reps + rep) + 1);
            std::size_t ones = 0;
            for (std::size_t k = 1; k <= k_max; ++k) {
                ones += rng.bernoulli(mu_syn) ? 1 : 0;
                double kk = static_cast<double>(k);
                double ybar = static_cast<double>(ones) / kk;
                bool inside;
                if (ctor == Constructor::clt) {
                    double hw = z * std::sqrt(ybar * (1.0 - ybar)) * std::sqrt(dilation / kk);
                    inside = std::abs(mu - ybar) <= hw;
                } else {
                    inside = kl_bernoulli(ybar, mu) <= dilation * kl_log / kk;
                }
                if (inside) ++local[k];
            }
        }
        std::lock_guard<std::mutex> lock(merge_mutex);
        for (std::size_t k = 1; k <= k_max; ++k) covered[k] += local[k];
    });

    const double total = static_cast<double>(mc.n_questions * mc.n_reps);
    OracleResult result;
    result.coverage.assign(k_max + 1, 1.0);
    for (std::size_t k = 1; k <= k_max; ++k)
        result.coverage[k] = static_cast<double>(covered[k]) / total;
    for (std::size_t k = 1; k <= k_max; ++k)
        if (result.coverage[k] >= 1.0 - alpha) result.k_star = k;
    result.censored = result.coverage[k_max] >= 1.0 - alpha;
    std::size_t report_k = result.k_star > 0 ? result.k_star : 1;
    double p = result.coverage[report_k];
    result.coverage_at_k_star = p;
    result.std_error = std::sqrt(std::max(p * (1.0 - p), 0.0) / total);
    return result;
}

// Studentized-mean variance check for the resampling interpretation of the
// dilation factor: with kappa agents each queried B times, the statistic
// (ybar - mu) / (s / sqrt(kappa B)) has limiting variance
// (B tau^2 + sigma^2) / (tau^2 + sigma^2).
struct VarianceRatioResult {
    double empirical_ratio = 0.0;
    double predicted_ratio = 0.0;
    double tau_sq = 0.0;
    double sigma_sq = 0.0;
    std::size_t skipped = 0;  // replicates with zero sample variance
};

inline VarianceRatioResult variance_ratio_check(const PopulationModel& pop, double psi,
                                                std::size_t kappa, std::size_t B,
                                                std::size_t mc_reps, std::uint64_t seed,
                                                unsigned threads = 1) {
    if (kappa < 200)
        throw std::invalid_argument("variance_ratio_check: kappa must be >= 200 (CLT regime)");
    if (B < 1) throw std::invalid_argument("variance_ratio_check: B must be >= 1");
    if (mc_reps < 2) throw std::invalid_argument("variance_ratio_check: mc_reps must be >= 2");
    if (!pop.mean_closed || !pop.second_moment_closed)
        throw std::invalid_argument("variance_ratio_check: population needs closed moments");

    const double mu = pop.mean_closed(psi);
    const double m2 = pop.second_moment_closed(psi);
    VarianceRatioResult result;
    result.tau_sq = m2 - mu * mu;
    result.sigma_sq = mu - m2;
    result.predicted_ratio = (static_cast<double>(B) * result.tau_sq + result.sigma_sq) /
                             (result.tau_sq + result.sigma_sq);

    const double k = static_cast<double>(kappa * B);
    std::vector<double> stat(mc_reps, kInf);  // kInf marks skipped replicates
    parallel_for(mc_reps, threads, [&](std::size_t rep) {
        RngStream rng(seed, rep);
        std::size_t ones = 0;
        for (std::size_t i = 0; i < kappa; ++i) {
            double f = pop.performance(pop.sample_profile(rng), psi);
            for (std::size_t b = 0; b < B; ++b) ones += rng.bernoulli(f) ? 1 : 0;
        }
        double ybar = static_cast<double>(ones) / k;
        double s = std::sqrt(ybar * (1.0 - ybar));
        if (s > 0.0) stat[rep] = (ybar - mu) / (s / std::sqrt(k));
    });

    PrefixStats acc;
    for (double t : stat) {
        if (t == kInf)
            ++result.skipped;
        else
            acc.push(t);
    }
    if (acc.count() < 2)
        throw std::runtime_error("variance_ratio_check: all replicates degenerate");
    SampleStats s = acc.stats(ResponseRange{-1e12, 1e12});
    result.empirical_ratio = s.std * s.std;
    return result;
}

}  // namespace synthcal
