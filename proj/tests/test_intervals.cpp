#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "synthcal/core_stats.hpp"
#include "synthcal/intervals.hpp"

using namespace synthcal;

namespace {

const ResponseRange kUnit{0.0, 1.0};

IntervalConfig cfg(double alpha, double dilation, ResponseRange range = {0.0, 1.0}) {
    return IntervalConfig{alpha, dilation, range};
}

SampleStats stats(std::size_t count, double mean, double std) {
    return SampleStats{count, mean, std};
}

// Brute-force KL endpoint oracle: scan then bisect without reusing the
// implementation's bracketing logic.
double kl_endpoint_oracle(double ybar, double thr, bool lower) {
    auto inside = [&](double p) { return kl_bernoulli(ybar, p) <= thr; };
    double in = ybar, out = lower ? 1e-300 : 1.0 - 1e-16;
    for (int i = 0; i < 300; ++i) {
        double mid = 0.5 * (in + out);
        (inside(mid) ? in : out) = mid;
    }
    return in;
}

}  // namespace

TEST_CASE("clt_interval matches hand arithmetic") {
    // z_{0.025} * 0.5 * sqrt(2/100), z frozen from the quantile oracle.
    ConfidenceSet c = clt_interval(stats(100, 0.5, 0.5), cfg(0.05, 2.0));
    double hw = 1.9599639845400536 * 0.5 * std::sqrt(2.0 / 100.0);
    CHECK(hw == doctest::Approx(0.1385903824).epsilon(1e-8));
    CHECK(c.lower[0] == doctest::Approx(0.5 - hw).epsilon(1e-10));
    CHECK(c.upper[0] == doctest::Approx(0.5 + hw).epsilon(1e-10));
}

TEST_CASE("clt_interval degenerate and scaling cases") {
    ConfidenceSet point = clt_interval(stats(10, 0.3, 0.0), cfg(0.05, 2.0));
    CHECK(point.lower[0] == 0.3);
    CHECK(point.upper[0] == 0.3);

    ConfidenceSet c2 = clt_interval(stats(100, 0.5, 0.5), cfg(0.05, 2.0));
    ConfidenceSet c8 = clt_interval(stats(100, 0.5, 0.5), cfg(0.05, 8.0));
    CHECK(c8.halfwidth() == doctest::Approx(2.0 * c2.halfwidth()).epsilon(1e-12));

    CHECK_THROWS_AS(clt_interval(stats(0, 0.0, 0.0), cfg(0.05, 2.0)), std::invalid_argument);
}

TEST_CASE("clt halfwidth scales as sqrt(C/k)") {
    ConfidenceSet a = clt_interval(stats(50, 0.4, 0.3), cfg(0.1, 2.0));
    ConfidenceSet b = clt_interval(stats(200, 0.4, 0.3), cfg(0.1, 2.0));
    CHECK(a.halfwidth() == doctest::Approx(2.0 * b.halfwidth()).epsilon(1e-12));
}

TEST_CASE("bernstein_interval term-by-term") {
    // ln 80 = 4.3820266..., terms 0.2093329 + 0.2065602.
    ConfidenceSet c = bernstein_interval(stats(100, 0.5, 0.5), cfg(0.05, 2.0, kUnit));
    double log_term = std::log(80.0);
    double t1 = 0.5 * std::sqrt(2.0 * 2.0 * log_term / 100.0);
    double t2 = 7.0 * 2.0 * 1.0 * log_term / (3.0 * 99.0);
    CHECK(t1 == doctest::Approx(0.2093329079).epsilon(1e-8));
    CHECK(t2 == doctest::Approx(0.2065601781).epsilon(1e-8));
    CHECK(c.halfwidth() == doctest::Approx(0.4158930860).epsilon(1e-8));

    CHECK_THROWS_AS(bernstein_interval(stats(1, 0.5, 0.0), cfg(0.05, 2.0)),
                    std::invalid_argument);

    ConfidenceSet tight = bernstein_interval(stats(100, 0.5, 0.5), cfg(0.05, 2.0, kUnit));
    ConfidenceSet loose = bernstein_interval(stats(100, 0.5, 0.5), cfg(0.01, 2.0, kUnit));
    CHECK(loose.halfwidth() > tight.halfwidth());
}

TEST_CASE("kl_interval matches closed-form reduction at ybar = 0.5") {
    // threshold ln(20)/10; endpoints solve ln(p(1-p)) = 2(ln 0.5 - thr).
    ConfidenceSet c = kl_interval(stats(10, 0.5, 0.5), cfg(0.1, 1.0));
    double thr = std::log(20.0) / 10.0;
    CHECK(thr == doctest::Approx(0.2995732274).epsilon(1e-9));
    double prod = std::exp(2.0 * (std::log(0.5) - thr));
    double lo = (1.0 - std::sqrt(1.0 - 4.0 * prod)) / 2.0;
    double hi = (1.0 + std::sqrt(1.0 - 4.0 * prod)) / 2.0;
    CHECK(lo == doctest::Approx(0.1643216836).epsilon(1e-8));
    CHECK(c.lower[0] == doctest::Approx(lo).epsilon(1e-8));
    CHECK(c.upper[0] == doctest::Approx(hi).epsilon(1e-8));
    // Symmetry about 0.5.
    CHECK(c.lower[0] + c.upper[0] == doctest::Approx(1.0).epsilon(1e-9));
    // Independent bisection oracle.
    CHECK(c.lower[0] == doctest::Approx(kl_endpoint_oracle(0.5, thr, true)).epsilon(1e-8));
    CHECK(c.upper[0] == doctest::Approx(kl_endpoint_oracle(0.5, thr, false)).epsilon(1e-8));
}

TEST_CASE("kl_interval one-sided limit at ybar = 0") {
    // -log(1-p) <= thr with thr = ln(20)/5.
    ConfidenceSet c = kl_interval(stats(5, 0.0, 0.0), cfg(0.1, 1.0));
    double thr = std::log(20.0) / 5.0;
    CHECK(c.lower[0] == 0.0);
    CHECK(c.upper[0] == doctest::Approx(1.0 - std::exp(-thr)).epsilon(1e-12));
    CHECK(c.upper[0] == doctest::Approx(0.4507197283).epsilon(1e-8));

    ConfidenceSet d = kl_interval(stats(5, 1.0, 0.0), cfg(0.1, 1.0));
    CHECK(d.upper[0] == 1.0);
    CHECK(d.lower[0] == doctest::Approx(std::exp(-thr)).epsilon(1e-12));
}

TEST_CASE("universe_set conventions") {
    ConfidenceSet unit = universe_set(1, ResponseRange{0.0, 1.0});
    CHECK(unit.lower[0] == 0.0);
    CHECK(unit.upper[0] == 1.0);

    ConfidenceSet r3 = universe_set(3);
    CHECK(r3.dims() == 3);
    std::vector<double> far{1e308, -1e308, 42.0};
    CHECK(contains_point(r3, far));

    CHECK_THROWS_AS(universe_set(0), std::invalid_argument);
}

TEST_CASE("contains_set and contains_point") {
    ConfidenceSet outer = ConfidenceSet::interval(0.1, 0.5);
    ConfidenceSet inner = ConfidenceSet::interval(0.2, 0.4);
    CHECK(contains_set(outer, inner));
    CHECK_FALSE(contains_set(inner, outer));
    CHECK(contains_set(universe_set(1), outer));

    ConfidenceSet band = ConfidenceSet::interval(0.36, 0.64);
    CHECK(contains_point(band, 0.5));
    CHECK(contains_point(band, 0.64));
    CHECK_FALSE(contains_point(band, 0.65));

    CHECK_THROWS_AS(contains_set(universe_set(2), outer), std::invalid_argument);
    std::vector<double> p2{0.5, 0.5};
    CHECK_THROWS_AS(contains_point(outer, std::span<const double>(p2)), std::invalid_argument);
}

TEST_CASE("box_from_coordinates bonferroni split") {
    std::vector<SampleStats> one{stats(100, 0.5, 0.5)};
    ConfidenceSet via_box = box_from_coordinates(one, cfg(0.05, 2.0), 0.95);
    ConfidenceSet direct = clt_interval(one[0], cfg(0.05, 2.0));
    CHECK(via_box.lower[0] == direct.lower[0]);
    CHECK(via_box.upper[0] == direct.upper[0]);

    std::vector<SampleStats> five(5, stats(60, 0.2, 0.4));
    ConfidenceSet b5 = box_from_coordinates(five, cfg(0.05, 2.0), 0.9);
    for (std::size_t i = 1; i < 5; ++i) {
        CHECK(b5.lower[i] == b5.lower[0]);
        CHECK(b5.upper[i] == b5.upper[0]);
    }

    // d=2 at level 0.9: per-coordinate alpha 0.05, so halfwidths use z_{0.975}.
    std::vector<SampleStats> two(2, stats(100, 0.5, 0.5));
    ConfidenceSet b2 = box_from_coordinates(two, cfg(0.2, 2.0), 0.9);
    double hw = 1.9599639845400536 * 0.5 * std::sqrt(2.0 / 100.0);
    CHECK(b2.halfwidth(0) == doctest::Approx(hw).epsilon(1e-9));

    CHECK_THROWS_AS(box_from_coordinates(std::vector<SampleStats>{}, cfg(0.05, 2.0), 0.9),
                    std::invalid_argument);
}

TEST_CASE("every constructor contains the sample mean") {
    RngStream rng(21, 0);
    for (int i = 0; i < 10000; ++i) {
        double mean = rng.uniform(0.0, 1.0);
        double sd = rng.uniform(0.0, 0.5);
        std::size_t k = 2 + rng.below(500);
        double alpha = rng.uniform(0.01, 0.3);
        double C = rng.uniform(1.0, 8.0);
        SampleStats s{k, mean, sd};
        CHECK(contains_point(clt_interval(s, cfg(alpha, C)), mean));
        CHECK(contains_point(bernstein_interval(s, cfg(alpha, C)), mean));
        CHECK(contains_point(kl_interval(s, cfg(alpha, C)), mean));
    }
}

TEST_CASE("dilation monotonicity") {
    RngStream rng(22, 0);
    for (int i = 0; i < 2000; ++i) {
        double mean = rng.uniform(0.05, 0.95);
        double sd = rng.uniform(0.0, 0.5);
        std::size_t k = 2 + rng.below(200);
        double alpha = rng.uniform(0.01, 0.3);
        double c1 = rng.uniform(1.0, 4.0);
        double c2 = c1 + rng.uniform(0.0, 4.0);
        SampleStats s{k, mean, sd};
        CHECK(contains_set(clt_interval(s, cfg(alpha, c2)), clt_interval(s, cfg(alpha, c1))));
        CHECK(contains_set(bernstein_interval(s, cfg(alpha, c2)),
                           bernstein_interval(s, cfg(alpha, c1))));
        // KL endpoints come from bisection; allow its absolute tolerance.
        ConfidenceSet k1 = kl_interval(s, cfg(alpha, c1));
        ConfidenceSet k2 = kl_interval(s, cfg(alpha, c2));
        CHECK(k2.lower[0] <= k1.lower[0] + 1e-9);
        CHECK(k2.upper[0] >= k1.upper[0] - 1e-9);
    }
}

TEST_CASE("KL interval sits inside the Bernstein-style bracket") {
    RngStream rng(23, 0);
    for (int i = 0; i < 10000; ++i) {
        double ybar = rng.uniform(1e-6, 1.0 - 1e-6);
        std::size_t k = 1 + rng.below(1000);
        double alpha = rng.uniform(0.005, 0.5);
        SampleStats s{k, ybar, std::sqrt(ybar * (1.0 - ybar))};
        ConfidenceSet kl = kl_interval(s, cfg(alpha, 1.0));
        double log_term = std::log(2.0 / alpha);
        double R = s.std * std::sqrt(2.0 * log_term / static_cast<double>(k)) +
                   2.0 * log_term / static_cast<double>(k);
        CHECK(kl.lower[0] >= ybar - R - 1e-9);
        CHECK(kl.upper[0] <= ybar + R + 1e-9);
    }
}

TEST_CASE("contains_set is a partial order on random boxes") {
    RngStream rng(24, 0);
    auto random_box = [&](std::size_t d) {
        std::vector<double> lo(d), hi(d);
        for (std::size_t i = 0; i < d; ++i) {
            double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
            lo[i] = std::min(a, b);
            hi[i] = std::max(a, b) + 1e-9;
        }
        return ConfidenceSet::box(lo, hi);
    };
    for (int i = 0; i < 2000; ++i) {
        std::size_t d = 1 + rng.below(4);
        ConfidenceSet a = random_box(d), b = random_box(d), c = random_box(d);
        CHECK(contains_set(a, a));  // reflexive
        if (contains_set(a, b) && contains_set(b, a)) {
            for (std::size_t j = 0; j < d; ++j) {
                CHECK(a.lower[j] == b.lower[j]);
                CHECK(a.upper[j] == b.upper[j]);
            }
        }
        if (contains_set(a, b) && contains_set(b, c)) CHECK(contains_set(a, c));
    }
}

TEST_CASE("constructors reject invalid configs") {
    CHECK_THROWS_AS(clt_interval(stats(10, 0.5, 0.5), cfg(0.0, 2.0)), std::invalid_argument);
    CHECK_THROWS_AS(clt_interval(stats(10, 0.5, 0.5), cfg(0.05, 0.5)), std::invalid_argument);
    IntervalConfig bad{0.05, 2.0, ResponseRange{1.0, 0.0}};
    CHECK_THROWS_AS(clt_interval(stats(10, 0.5, 0.5), bad), std::invalid_argument);
    CHECK_THROWS_AS(kl_interval(stats(10, 1.5, 0.5), cfg(0.05, 2.0)), std::invalid_argument);
}
