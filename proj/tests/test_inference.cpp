#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "matchdist/generalised.hpp"
#include "matchdist/inference.hpp"
#include "test_support.hpp"

using namespace matchdist;

namespace {

// The worked dataset used throughout: 40 games of size 16, 65 total matches.
Dataset worked_example() {
    Dataset data;
    data.size = 16;
    data.observations.assign(25, 1);
    data.observations.insert(data.observations.end(), 5, 0);
    data.observations.insert(data.observations.end(), 10, 4);
    return data;
}

Dataset sampled(int size, double theta, int count, std::uint64_t seed) {
    const MatchingDistribution dist(MatchingParams(size, 1, theta));
    Dataset data;
    data.size = size;
    for (long long draw : dist.sample(count, seed))
        data.observations.push_back(static_cast<int>(draw));
    return data;
}

}  // namespace

TEST_CASE("dataset validation") {
    CHECK_NOTHROW(validate_dataset({4, {0, 1, 2, 4}}));
    CHECK_THROWS_AS(validate_dataset({-1, {0}}), std::domain_error);
    CHECK_THROWS_AS(validate_dataset({4, {}}), std::domain_error);
    CHECK_THROWS_AS(validate_dataset({4, {0, 5}}), std::domain_error);
    CHECK_THROWS_AS(validate_dataset({4, {-1}}), std::domain_error);
    CHECK_THROWS_AS(validate_dataset({4, {3}}), std::domain_error);
    CHECK_THROWS_AS(validate_dataset({1, {0}}), std::domain_error);
    CHECK_NOTHROW(validate_dataset({1, {1}}));
    CHECK_NOTHROW(validate_dataset({0, {0, 0}}));

    CHECK(dataset_mean(worked_example()) == doctest::Approx(1.625).epsilon(1e-15));
}

TEST_CASE("parameter transform round trips") {
    for (double theta : {1e-9, 0.01, 0.3, 0.5, 0.8, 1.0 - 1e-9}) {
        const double phi = theta_to_phi(theta);
        CHECK(phi_to_theta(phi) == doctest::Approx(theta).epsilon(1e-12));
    }
    CHECK(theta_to_phi(0.5) == 0.0);
    CHECK(theta_to_phi(0.0) == -std::numeric_limits<double>::infinity());
    CHECK(theta_to_phi(1.0) == std::numeric_limits<double>::infinity());
    CHECK(phi_to_theta(-std::numeric_limits<double>::infinity()) == 0.0);
    CHECK(phi_to_theta(std::numeric_limits<double>::infinity()) == 1.0);
    CHECK(phi_to_theta(-400.0) == 0.0);
    CHECK(phi_to_theta(400.0) == 1.0);
}

TEST_CASE("log likelihood matches direct pmf sums") {
    const Dataset data{5, {0, 2, 2, 5, 1}};
    for (double theta : {0.1, 0.4, 0.85}) {
        const MatchingDistribution dist(MatchingParams(5, 1, theta));
        double want = 0.0;
        for (int k : data.observations) want += dist.log_pmf(k);
        CHECK(log_likelihood(data, theta) == doctest::Approx(want).epsilon(1e-12));
        CHECK(log_likelihood_phi(data, theta_to_phi(theta)) ==
              doctest::Approx(want).epsilon(1e-12));
    }

    // size-2 closed forms: P(0) = (1-t)^2/2 and P(2) = (1+2t-t^2)/2
    const double t = 0.5;
    CHECK(log_likelihood({2, {2}}, t) ==
          doctest::Approx(std::log((1 + 2 * t - t * t) / 2)).epsilon(1e-14));
    CHECK(log_likelihood({2, {0, 2}}, t) ==
          doctest::Approx(std::log((1 - t) * (1 - t) / 2) +
                          std::log((1 + 2 * t - t * t) / 2))
              .epsilon(1e-14));
}

TEST_CASE("score closed forms at size 2") {
    const auto a = score_and_hessian_theta({2, {0}}, 0.25);
    CHECK(a.score == doctest::Approx(-8.0 / 3.0).epsilon(1e-12));
    // d^2/dt^2 of 2*log(1-t) is -2/(1-t)^2
    CHECK(a.hessian == doctest::Approx(-2.0 / (0.75 * 0.75)).epsilon(1e-10));

    const auto b = score_and_hessian_theta({2, {2}}, 0.5);
    CHECK(b.score == doctest::Approx(4.0 / 7.0).epsilon(1e-12));

    const auto c = score_and_hessian_phi({2, {2}}, 0.0);
    CHECK(c.score == doctest::Approx(2.0 / 7.0).epsilon(1e-12));

    CHECK_THROWS_AS(score_and_hessian_theta({2, {0}}, 0.0), std::domain_error);
    CHECK_THROWS_AS(score_and_hessian_theta({2, {0}}, 1.0), std::domain_error);
    CHECK_THROWS_AS(
        score_and_hessian_phi({2, {0}}, std::numeric_limits<double>::infinity()),
        std::domain_error);
}

TEST_CASE("derivatives match finite differences in theta") {
    const double h = 1e-6;
    for (int n : {2, 5, 12}) {
        Dataset data{n, {0, 2}};
        if (n >= 5) data.observations.push_back(n);
        if (n >= 5) data.observations.push_back(3);
        for (double theta : {0.05, 0.3, 0.7, 0.95}) {
            const auto got = score_and_hessian_theta(data, theta);
            const double fd_score = (log_likelihood(data, theta + h) -
                                     log_likelihood(data, theta - h)) /
                                    (2 * h);
            CHECK(testsup::rel_err(got.score, fd_score) <= 1e-5);
            const double fd_hess =
                (score_and_hessian_theta(data, theta + h).score -
                 score_and_hessian_theta(data, theta - h).score) /
                (2 * h);
            CHECK(testsup::rel_err(got.hessian, fd_hess) <= 1e-4);
        }
    }
}

TEST_CASE("derivatives match finite differences in phi") {
    const double h = 1e-6;
    const Dataset data{6, {0, 1, 3, 6, 2, 2}};
    for (double phi : {-2.0, -0.5, 0.0, 1.0}) {
        const auto got = score_and_hessian_phi(data, phi);
        const double fd_score = (log_likelihood_phi(data, phi + h) -
                                 log_likelihood_phi(data, phi - h)) /
                                (2 * h);
        CHECK(testsup::rel_err(got.score, fd_score) <= 1e-5);
        const double fd_hess = (score_and_hessian_phi(data, phi + h).score -
                                score_and_hessian_phi(data, phi - h).score) /
                               (2 * h);
        CHECK(testsup::rel_err(got.hessian, fd_hess) <= 1e-4);
    }
}

TEST_CASE("chain rule ties the two parameterisations together") {
    const Dataset data{8, {0, 2, 8, 1, 5}};
    for (double theta : {0.08, 0.35, 0.6, 0.92}) {
        const auto st = score_and_hessian_theta(data, theta);
        const auto sp = score_and_hessian_phi(data, theta_to_phi(theta));
        const double d = 2 * theta * (1 - theta);
        CHECK(testsup::rel_err(st.score * d, sp.score) <= 1e-8);
        CHECK(testsup::rel_err(st.hessian * d * d,
                               sp.hessian + 4 * (theta - 0.5) * sp.score) <=
              1e-8);
    }
}

TEST_CASE("mle boundary shortcuts") {
    const auto zero = mle({4, {0, 1, 0}});
    CHECK(zero.theta == 0.0);
    CHECK(zero.boundary == BoundaryFlag::at_zero);
    CHECK(zero.phi == -std::numeric_limits<double>::infinity());

    const auto one = mle({5, {5, 5, 5}});
    CHECK(one.theta == 1.0);
    CHECK(one.boundary == BoundaryFlag::at_one);
    CHECK(one.phi == std::numeric_limits<double>::infinity());

    // sample mean of exactly one match also pins the estimate at zero
    const auto flat = mle({6, {1, 1, 1, 1}});
    CHECK(flat.theta == 0.0);
    CHECK(flat.boundary == BoundaryFlag::at_zero);

    const auto mixed = mle({3, {0, 3, 3}});  // mean 2, interior
    CHECK(mixed.boundary == BoundaryFlag::none);
    CHECK(mixed.theta > 0.0);
    CHECK(mixed.theta < 1.0);
}

TEST_CASE("mle on the worked dataset") {
    const auto fit = mle(worked_example());
    CHECK(fit.boundary == BoundaryFlag::none);
    CHECK(fit.theta == doctest::Approx(0.0386942688280422).epsilon(1e-10));
    CHECK(std::fabs(fit.score) <= 1e-10);
    // the score in theta also vanishes at the optimum
    CHECK(std::fabs(score_and_hessian_theta(worked_example(), fit.theta).score) <=
          1e-8);
    CHECK(phi_to_theta(fit.phi) == doctest::Approx(fit.theta).epsilon(1e-14));
}

TEST_CASE("mle is consistent on synthetic data") {
    for (std::uint64_t seed : {11u, 12u, 13u}) {
        const Dataset data = sampled(12, 0.2, 500, seed);
        const auto fit = mle(data);
        REQUIRE(fit.boundary == BoundaryFlag::none);
        CHECK(std::fabs(fit.theta - 0.2) < 0.05);
        CHECK(std::fabs(score_and_hessian_theta(data, fit.theta).score) <= 1e-8);

        // grid refinement around the estimate confirms a local maximum
        const double ll_hat = log_likelihood(data, fit.theta);
        CHECK(log_likelihood(data, fit.theta + 1e-4) < ll_hat);
        CHECK(log_likelihood(data, fit.theta - 1e-4) < ll_hat);
    }
}

TEST_CASE("score changes sign at most once") {
    std::vector<Dataset> cases = {
        worked_example(),
        sampled(5, 0.6, 60, 3),
        sampled(9, 0.05, 30, 4),
        sampled(3, 0.9, 80, 5),
        {4, {0, 1, 0}},   // boundary case, score negative throughout
        {5, {5, 5, 5}},   // score positive throughout
    };
    for (const Dataset& data : cases) {
        int changes = 0;
        double prev = 0.0;
        bool have_prev = false;
        for (int i = 1; i <= 200; ++i) {
            const double theta = i / 201.0;
            const double s = score_and_hessian_theta(data, theta).score;
            if (have_prev && (s > 0) != (prev > 0)) ++changes;
            prev = s;
            have_prev = true;
        }
        CHECK(changes <= 1);
    }
}

TEST_CASE("method of moments") {
    CHECK(mom_estimate_from_mean(1.625, 16) ==
          doctest::Approx(0.0390625).epsilon(1e-7));
    const double root = mom_estimate_from_mean(1.625, 16);
    CHECK(std::fabs(std::pow(root, 16) - 16 * root + 0.625) <= 1e-10);

    CHECK(mom_approx_from_mean(1.625, 16) ==
          doctest::Approx(0.625 / 15.0).epsilon(1e-15));

    // shortcuts
    CHECK(mom_estimate_from_mean(1.0, 7) == 0.0);
    CHECK(mom_estimate_from_mean(0.3, 7) == 0.0);
    CHECK(mom_estimate_from_mean(7.0, 7) == 1.0);
    CHECK(mom_approx_from_mean(0.4, 7) == 0.0);
    CHECK(mom_approx_from_mean(7.0, 7) == 1.0);

    CHECK_THROWS_AS(mom_estimate_from_mean(0.5, 1), std::domain_error);
    CHECK_THROWS_AS(mom_approx_from_mean(0.5, 1), std::domain_error);

    const Dataset data = worked_example();
    CHECK(mom_estimate(data) == doctest::Approx(0.0390625).epsilon(1e-7));
    CHECK(mom_approx(data) == doctest::Approx(0.625 / 15.0).epsilon(1e-15));
}

TEST_CASE("approximate mom overshoots by (t - t^n)/(n-1)") {
    for (int n : {3, 6, 16, 40}) {
        for (double mean : {1.3, 2.0, 0.5 + n / 2.0}) {
            const double exact = mom_estimate_from_mean(mean, n);
            const double approx = mom_approx_from_mean(mean, n);
            const double want = (exact - std::pow(exact, n)) / (n - 1);
            CHECK(approx - exact == doctest::Approx(want).epsilon(1e-12));
            CHECK(approx >= exact);
        }
    }
    // at a fixed mean the gap shrinks as the game grows
    double prev_gap = 1.0;
    for (int n : {3, 5, 9, 17, 33}) {
        const double gap =
            mom_approx_from_mean(2.0, n) - mom_estimate_from_mean(2.0, n);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("lower tail fraction") {
    CHECK(lower_tail_fraction(worked_example()) ==
          doctest::Approx(0.625 / 15.0).epsilon(1e-15));
    CHECK(lower_tail_fraction({4, {0, 1}}) == 0.0);
    CHECK(lower_tail_fraction({4, {4, 4}}) == 1.0);
    CHECK_THROWS_AS(lower_tail_fraction({1, {1}}), std::domain_error);
}

TEST_CASE("asymptotic confidence interval") {
    const Dataset data = worked_example();
    const auto fit = mle(data);
    const auto ci = ci_asymptotic(data, 0.95);
    CHECK(ci.lower == doctest::Approx(0.0151823971686560).epsilon(1e-9));
    CHECK(ci.upper == doctest::Approx(0.0656952559567925).epsilon(1e-9));
    CHECK(ci.lower < fit.theta);
    CHECK(fit.theta < ci.upper);

    const auto wide = ci_asymptotic(data, 0.99);
    CHECK(wide.lower < ci.lower);
    CHECK(wide.upper > ci.upper);

    const auto abs_split = ci_asymptotic(data, 0.95, TailSplit::absolute);
    CHECK(abs_split.lower <= fit.theta);
    CHECK(abs_split.upper >= fit.theta);
    CHECK(abs_split.lower >= 0.0);
    CHECK(abs_split.upper <= 1.0);
    // the worked data put less than alpha below, so the absolute split
    // reuses the whole fraction and the two intervals differ
    CHECK(abs_split.lower != ci.lower);

    CHECK_THROWS_AS(ci_asymptotic({4, {0, 1, 0}}, 0.95), std::domain_error);
    CHECK_THROWS_AS(ci_asymptotic({5, {5, 5}}, 0.95), std::domain_error);
    CHECK_THROWS_AS(ci_asymptotic(data, 0.0), std::domain_error);
    CHECK_THROWS_AS(ci_asymptotic(data, 1.0), std::domain_error);
}

TEST_CASE("asymptotic interval covers the truth on repeated draws") {
    int covered = 0;
    int usable = 0;
    for (std::uint64_t r = 0; r < 200; ++r) {
        const Dataset data = sampled(12, 0.2, 500, 1000 + r);
        const auto fit = mle(data);
        if (fit.boundary != BoundaryFlag::none) continue;
        ++usable;
        const auto ci = ci_asymptotic(data, 0.95);
        if (ci.lower <= 0.2 && 0.2 <= ci.upper) ++covered;
    }
    REQUIRE(usable >= 195);  // boundary fits are vanishingly rare here
    CHECK(double(covered) / double(usable) >= 0.90);
}

TEST_CASE("bootstrap confidence interval") {
    const auto zeros = ci_bootstrap({4, {0, 0, 0}}, 0.95, 50, 1);
    CHECK(zeros.lower == 0.0);
    CHECK(zeros.upper == 0.0);

    const auto ones = ci_bootstrap({5, {5, 5, 5}}, 0.95, 50, 1);
    CHECK(ones.lower == 1.0);
    CHECK(ones.upper == 1.0);

    const Dataset data = worked_example();
    const auto a = ci_bootstrap(data, 0.99, 200, 7);
    const auto b = ci_bootstrap(data, 0.99, 200, 7);
    CHECK(a.lower == b.lower);
    CHECK(a.upper == b.upper);
    const auto c = ci_bootstrap(data, 0.99, 200, 8);
    CHECK((a.lower != c.lower || a.upper != c.upper));
    CHECK(a.lower <= a.upper);
    CHECK(a.lower >= 0.0);
    CHECK(a.upper <= 1.0);

    // sparse matches at a small estimate: enough resamples fall on the
    // boundary that the lower end reaches zero
    const auto ci = ci_bootstrap(data, 0.99, 1000, 3);
    CHECK(ci.lower == 0.0);
    CHECK(ci.upper > 0.0);
    CHECK(ci.upper < 0.15);

    CHECK_THROWS_AS(ci_bootstrap(data, 0.95, 0, 1), std::domain_error);
}
