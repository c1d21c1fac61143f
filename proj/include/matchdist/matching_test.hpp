#pragma once

#include <vector>

#include "matchdist/generalised.hpp"
#include "matchdist/inference.hpp"

namespace matchdist {

enum class Alternative { greater, less, two_sided };

struct TestResult {
    long long observed_total = 0;
    double mean_matches = 0.0;
    double null_prob = 0.0;
    Alternative alternative = Alternative::greater;
    double p_value = 1.0;
    PmfMethod method = PmfMethod::exact;
};

// Tests the observed total of matches against the null Match(t|n,m,theta0).
// greater sums the tail at or above the total, less at or below, two_sided
// over every t whose probability is at most pmf(total) up to a 1e-12
// relative tie tolerance.
TestResult matching_test(const Dataset& data, double null_prob = 0.0,
                         Alternative alternative = Alternative::greater,
                         ApproxPolicy policy = ApproxPolicy::automatic);

// Same test when only the total is known.
TestResult matching_test_total(long long observed_total, int size, int trials,
                               double null_prob = 0.0,
                               Alternative alternative = Alternative::greater,
                               ApproxPolicy policy = ApproxPolicy::automatic);

// Smallest t whose null upper-tail mass drops below alpha; n*m+1 means the
// rejection region is empty.
long long critical_value(int size, int trials, double alpha);

// P(T >= t_star | theta); zero when the rejection region is empty.
double power(double theta, int size, int trials, double alpha);

struct PowerCurve {
    int size = 0;
    int trials = 0;
    double alpha = 0.0;
    long long t_star = 0;
    std::vector<std::pair<double, double>> points;  // (theta, power)
};

PowerCurve power_curve(int size, int trials, double alpha,
                       const std::vector<double>& theta_grid);

// For size 2 the test reduces to a binomial: each game independently matches
// both items with this probability, and odd totals are impossible.
double n2_success_prob(double theta);

}  // namespace matchdist
