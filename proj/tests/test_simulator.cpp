#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "synthcal/simulator.hpp"

using namespace synthcal;

TEST_CASE("preset means: uniform identity and symmetric beta-logistic") {
    PopulationModel uni = presets::uniform_identity();
    for (double psi : {0.0, 0.3, 0.9}) CHECK(true_mean(uni, psi).value == 0.5);

    PopulationModel beta = presets::beta_logistic(2.0, 2.0);
    CHECK(true_mean(beta, 0.0).value == doctest::Approx(0.5).epsilon(1e-10));
    // Deterministic quadrature, zero reported error.
    CHECK(true_mean(beta, 0.4).std_error == 0.0);
    // Harder questions have lower means.
    CHECK(true_mean(beta, 0.8).value < true_mean(beta, -0.8).value);
}

TEST_CASE("monte carlo mean fallback agrees with quadrature") {
    PopulationModel beta = presets::beta_logistic(2.0, 2.0);
    PopulationModel no_closed = beta;
    no_closed.mean_closed = nullptr;
    for (double psi : {-0.5, 0.2}) {
        MeanEstimate mc = true_mean(no_closed, psi, 200000, 99);
        CHECK(mc.std_error > 0.0);
        CHECK(std::abs(mc.value - true_mean(beta, psi).value) < 4.0 * mc.std_error + 1e-4);
    }
}

TEST_CASE("two-point agent pool averages exactly") {
    MTurkModel pool;
    pool.profiles = {0.2, 0.8};
    pool.performance = [](double z, double) { return z; };
    CHECK(synthetic_mean(pool, 0.123) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("draw_mturk determinism and single-agent identity") {
    PopulationModel beta = presets::beta_logistic(2.0, 2.0);
    RngStream a(77, 0), b(77, 0);
    MTurkModel m1 = draw_mturk(beta, 5, a);
    MTurkModel m2 = draw_mturk(beta, 5, b);
    CHECK(m1.profiles == m2.profiles);

    RngStream c(77, 1);
    MTurkModel solo = draw_mturk(beta, 1, c);
    for (double psi : {-0.7, 0.0, 0.7})
        CHECK(solo.mean(psi) ==
              doctest::Approx(beta.performance(solo.profiles[0], psi)).epsilon(1e-15));

    CHECK_THROWS_AS(draw_mturk(beta, 0, c), std::invalid_argument);
}

TEST_CASE("large agent pools concentrate on the population mean") {
    PopulationModel beta = presets::beta_logistic(2.0, 2.0);
    RngStream rng(78, 0);
    MTurkModel big = draw_mturk(beta, 100000, rng);
    for (double psi : {-0.5, 0.0, 0.5}) {
        CHECK(std::abs(big.mean(psi) - true_mean(beta, psi).value) < 0.01);
    }
}

TEST_CASE("sample_responses edge cases and concentration") {
    RngStream rng(79, 0);
    std::vector<double> zeros = sample_responses(0.0, 50, rng);
    for (double v : zeros) CHECK(v == 0.0);
    std::vector<double> ones = sample_responses(1.0, 50, rng);
    for (double v : ones) CHECK(v == 1.0);

    std::vector<double> half = sample_responses(0.5, 100000, rng);
    double mean = 0.0;
    for (double v : half) mean += v;
    mean /= static_cast<double>(half.size());
    CHECK(std::abs(mean - 0.5) < 0.01);

    RngStream r1(80, 3), r2(80, 3);
    CHECK(sample_responses(0.3, 100, r1) == sample_responses(0.3, 100, r2));

    CHECK_THROWS_AS(sample_responses(1.5, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_responses(0.5, 0, rng), std::invalid_argument);
}

TEST_CASE("make_calibration_records is deterministic and well-formed") {
    PopulationModel beta = presets::beta_logistic(2.0, 2.0);
    RngStream rng(81, 0);
    MTurkModel pool = draw_mturk(beta, 10, rng);
    auto recs1 = make_calibration_records(beta, &pool, 20, 30, 15, 4242);
    auto recs2 = make_calibration_records(beta, &pool, 20, 30, 15, 4242);
    REQUIRE(recs1.size() == 20);
    for (std::size_t j = 0; j < recs1.size(); ++j) {
        CHECK(recs1[j].question_id == recs2[j].question_id);
        CHECK(recs1[j].real_responses == recs2[j].real_responses);
        CHECK(recs1[j].synthetic_responses == recs2[j].synthetic_responses);
        CHECK(recs1[j].real_responses.size() == 30);
        CHECK(recs1[j].synthetic_responses.size() == 15);
    }
}

TEST_CASE("aligned synthetic source keeps k_hat large, misaligned collapses it") {
    // Monte Carlo oracle over 100 seeds: aligned populations select
    // k_hat >= K/2, a single-agent near-deterministic pool selects
    // k_hat <= 10, in at least 90 seeds each. Chernoff/KL sets: the CLT
    // interval collapses to a point at k = 1 on binary data, which pins the
    // prefix rule at k_hat = 0 for any source.
    PopulationModel beta = presets::beta_logistic(2.0, 2.0);
    PopulationModel tp = presets::two_point(0.01, 0.99);
    CalibrationConfig cfg;
    cfg.alpha = 0.1;
    cfg.gamma = 0.5;
    cfg.dilation = 2.0;
    cfg.budget = 100;
    cfg.constructor = Constructor::kl;
    cfg.method = Method::simple;

    int aligned_big = 0, misaligned_small = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        auto aligned = make_calibration_records(beta, nullptr, 300, 400, 100, 1000 + s);
        CalibrationResult res = calibrate(aligned, cfg, 2);
        if (res.k_hat >= 50) ++aligned_big;

        RngStream pool_rng(2000 + s, 0);
        MTurkModel solo = draw_mturk(tp, 1, pool_rng);
        auto shifted = make_calibration_records(tp, &solo, 300, 400, 100, 3000 + s);
        CalibrationResult res2 = calibrate(shifted, cfg, 2);
        if (res2.k_hat <= 10) ++misaligned_small;
    }
    CHECK(aligned_big >= 90);
    CHECK(misaligned_small >= 90);
}

TEST_CASE("discrepancies against the arithmetic oracles") {
    PopulationModel shifted = presets::constant_means(0.4, 0.6);
    std::vector<double> questions{0.1, 0.5, 0.9};
    std::vector<double> levels{0.9};
    DiscrepancyReport rep = discrepancies(shifted, nullptr, questions, levels);
    REQUIRE(rep.per_question.size() == 3);
    for (const auto& q : rep.per_question) {
        CHECK_FALSE(q.degenerate);
        CHECK(q.chi2 == doctest::Approx(0.04 / 0.24).epsilon(1e-12));
        CHECK(q.kl == doctest::Approx(kl_bernoulli(0.6, 0.4)).epsilon(1e-12));
    }
    // Quantile of an all-equal list is that value.
    CHECK(rep.chi2_quantiles.at(0.9) == doctest::Approx(0.04 / 0.24).epsilon(1e-12));
    CHECK(rep.degenerate_count == 0);

    PopulationModel aligned = presets::constant_means(0.4, 0.4);
    DiscrepancyReport zero = discrepancies(aligned, nullptr, questions, levels);
    for (const auto& q : zero.per_question) {
        CHECK(q.chi2 == 0.0);
        CHECK(q.kl == 0.0);
    }

    PopulationModel degenerate = presets::constant_means(0.4, 1.0);
    DiscrepancyReport deg = discrepancies(degenerate, nullptr, questions, levels);
    CHECK(deg.degenerate_count == 3);
    CHECK(deg.chi2_quantiles.empty());
}

TEST_CASE("oracle_k_star: aligned source censors at k_max") {
    PopulationModel uni = presets::uniform_identity();
    OracleResult res = oracle_k_star(uni, nullptr, 16.0, Constructor::clt, 0.1,
                                     OracleMc{500, 2}, 50, 11, 2);
    CHECK(res.censored);
    CHECK(res.k_star == 50);
    CHECK(res.coverage_at_k_star >= 0.9);
}

TEST_CASE("oracle_k_star: fixed shift kills coverage at large k") {
    PopulationModel shifted = presets::constant_means(0.4, 0.6);
    OracleResult res = oracle_k_star(shifted, nullptr, 1.0, Constructor::clt, 0.05,
                                     OracleMc{1000, 2}, 200, 12, 2);
    CHECK_FALSE(res.censored);
    CHECK(res.k_star < 50);
    CHECK(res.coverage[200] < 0.05);
    CHECK(res.std_error < 0.02);
}

TEST_CASE("oracle_k_star is deterministic and validates input") {
    PopulationModel uni = presets::uniform_identity();
    OracleResult a = oracle_k_star(uni, nullptr, 2.0, Constructor::clt, 0.1,
                                   OracleMc{500, 2}, 30, 5, 1);
    OracleResult b = oracle_k_star(uni, nullptr, 2.0, Constructor::clt, 0.1,
                                   OracleMc{500, 2}, 30, 5, 2);
    CHECK(a.k_star == b.k_star);
    CHECK(a.coverage == b.coverage);

    CHECK_THROWS_AS(oracle_k_star(uni, nullptr, 2.0, Constructor::bernstein, 0.1,
                                  OracleMc{500, 2}, 30, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle_k_star(uni, nullptr, 2.0, Constructor::clt, 0.1,
                                  OracleMc{10, 1}, 30, 5),
                    std::invalid_argument);
}

TEST_CASE("calibrated k_hat lands in the oracle-certified range") {
    // Cross-module check: the data-driven selection on simulated records
    // tracks the Monte Carlo oracle sample size for the same agent pool.
    PopulationModel pop = presets::binary_skill(0.05, 200);
    RngStream pool_rng(314, 0);
    MTurkModel pool = draw_mturk(pop, 20, pool_rng);

    OracleResult oracle = oracle_k_star(pop, &pool, 2.0, Constructor::kl, 0.1,
                                        OracleMc{2000, 1}, 200, 315, 2);
    REQUIRE(oracle.k_star > 0);
    REQUIRE_FALSE(oracle.censored);

    CalibrationConfig cfg;
    cfg.alpha = 0.1;
    cfg.dilation = 2.0;
    cfg.budget = 200;
    cfg.constructor = Constructor::kl;
    cfg.method = Method::simple;
    auto recs = make_calibration_records(pop, &pool, 300, 400, 200, 316);
    CalibrationResult res = calibrate(recs, cfg, 2);

    CAPTURE(oracle.k_star);
    CAPTURE(res.k_hat);
    CHECK(res.k_hat >= oracle.k_star / 2);
    CHECK(res.k_hat <= std::min<std::size_t>(2 * oracle.k_star, 200));
}

TEST_CASE("variance ratio: predictions") {
    PopulationModel tp = presets::two_point(0.2, 0.8);
    VarianceRatioResult r = variance_ratio_check(tp, 0.5, 200, 4, 100, 5150, 2);
    CHECK(r.tau_sq == doctest::Approx(0.09).epsilon(1e-12));
    CHECK(r.sigma_sq == doctest::Approx(0.16).epsilon(1e-12));
    CHECK(r.predicted_ratio == doctest::Approx(2.08).epsilon(1e-12));
    CHECK(r.predicted_ratio >= 1.0);
    CHECK(r.predicted_ratio <= 4.0);

    VarianceRatioResult b1 = variance_ratio_check(tp, 0.5, 200, 1, 100, 5151, 2);
    CHECK(b1.predicted_ratio == doctest::Approx(1.0).epsilon(1e-12));

    // All agents identical: no between-agent variance, ratio 1 for every B.
    PopulationModel flat = presets::constant_means(0.3, 0.3);
    for (std::size_t B : {1, 4, 16}) {
        VarianceRatioResult f = variance_ratio_check(flat, 0.5, 200, B, 100, 5152, 2);
        CHECK(f.tau_sq == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(f.predicted_ratio == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(variance_ratio_check(tp, 0.5, 100, 4, 100, 5153), std::invalid_argument);
}

TEST_CASE("chernoff bound coverage grid") {
    // Empirical frequency of KL(xbar || q) <= log(2/alpha)/k at or above
    // 1 - alpha - 0.01 across the grid, 10000 replicates each.
    for (double q : {0.1, 0.3, 0.5}) {
        for (std::size_t k : {std::size_t{20}, std::size_t{50}, std::size_t{200}}) {
            for (double alpha : {0.05, 0.1}) {
                double thr = std::log(2.0 / alpha) / static_cast<double>(k);
                RngStream rng(6000, detail::stream_id_for(q) ^ k ^
                                        detail::stream_id_for(alpha));
                int hit = 0;
                const int reps = 10000;
                for (int r = 0; r < reps; ++r) {
                    std::size_t ones = 0;
                    for (std::size_t i = 0; i < k; ++i) ones += rng.bernoulli(q) ? 1 : 0;
                    double xbar = static_cast<double>(ones) / static_cast<double>(k);
                    if (kl_bernoulli(xbar, q) <= thr) ++hit;
                }
                CAPTURE(q);
                CAPTURE(k);
                CAPTURE(alpha);
                CHECK(static_cast<double>(hit) / reps >= 1.0 - alpha - 0.01);
            }
        }
    }
}

TEST_CASE("empirical bernstein coverage for bounded responses") {
    // Coverage of [ybar +- r_k] with C = 1 at or above 1 - alpha - 0.01 over
    // 10000 replicates; continuous responses on [0,1].
    const double alpha = 0.1;
    const std::size_t k = 50;
    IntervalConfig icfg{alpha, 1.0, ResponseRange{0.0, 1.0}};
    RngStream rng(6100, 0);
    const double mu = 0.35;  // mean of the asymmetric mixture below
    int hit = 0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> ys(k);
        for (auto& y : ys) {
            double u = rng.uniform();
            y = u < 0.5 ? rng.uniform(0.0, 0.4) : rng.uniform(0.1, 0.9);
        }
        SampleStats s = sample_stats(ys, icfg.range);
        if (contains_point(bernstein_interval(s, icfg), mu)) ++hit;
    }
    CHECK(static_cast<double>(hit) / reps >= 1.0 - alpha - 0.01);
}

TEST_CASE("quantile discrepancy shrinks as the agent pool grows") {
    // Paired redraws: the 0.9-quantile of the chi-squared discrepancy at
    // kappa = 10 exceeds the one at kappa = 100 in at least 90% of 50 runs.
    PopulationModel pop = presets::binary_skill(0.05, 200);
    int monotone = 0;
    for (int s = 0; s < 50; ++s) {
        RngStream small_rng(7000 + s, 0), big_rng(7000 + s, 1), q_rng(7000 + s, 2);
        MTurkModel small = draw_mturk(pop, 10, small_rng);
        MTurkModel big = draw_mturk(pop, 100, big_rng);
        std::vector<double> questions(400);
        for (auto& psi : questions) psi = pop.sample_question(q_rng);
        std::vector<double> levels{0.9};
        DiscrepancyReport ds = discrepancies(pop, &small, questions, levels);
        DiscrepancyReport db = discrepancies(pop, &big, questions, levels);
        if (ds.chi2_quantiles.at(0.9) > db.chi2_quantiles.at(0.9)) ++monotone;
    }
    CHECK(monotone >= 45);
}
