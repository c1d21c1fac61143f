#pragma once

#include <optional>
#include <vector>

// The distribution of the number of fixed points ("matches") of a uniformly
// random permutation of n items. Support is {0..n} minus n-1: a permutation
// cannot fix all but one item. n = 0 and n = 1 are point masses at 0 and 1;
// as n grows the distribution converges rapidly to Poisson(1).

namespace matchdist {

// Triangular table of log pmf values, one row per size s = 0..max_size.
// Row s is built by a downward log-space recursion that follows from the
// size recursion of the pmf: starting from logp(s) = -log(s!),
//
//   logp(k) = log(k+1) - log(s-k)
//             + logaddexp(log(s-k-1) + logp(k+1), log(k+2) + logp(k+2)),
//
// where the second term is dropped at k = s-1. Each row is renormalized by
// its own log-sum-exp; the drift corrected this way is at rounding level.
class ClassicalTable {
  public:
    explicit ClassicalTable(int max_size);

    int max_size() const { return static_cast<int>(rows_.size()) - 1; }

    // Log pmf over k = 0..size.
    const std::vector<double>& row(int size) const;

    // Log pmf at k; -inf for k outside 0..size.
    double log_pmf(int k, int size) const;

  private:
    std::vector<std::vector<double>> rows_;
};

// Direct alternating-series evaluation, sum_{i=0}^{n-k} (-1)^i/i! / k!.
// Accurate in double precision for the sizes it is used at (n <= 30 or so);
// the table above is the production path. Throws std::domain_error for
// k > n or negative arguments.
double classical_pmf_explicit(int k, int n);

// Limit of the pmf as the size grows: Poisson with unit rate, e^{-1}/k!.
double classical_pmf_poisson_limit(int k);

// E(K^r) = sum of Stirling numbers of the second kind S(r, i) for
// i = 0..min(r, n); the full Bell number B_r once n >= r. Exact integer
// arithmetic for r <= 20, floating point beyond.
double classical_raw_moment(int r, int n);

struct CentralMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;  // unset when the distribution is degenerate
    std::optional<double> kurtosis;
};

// Piecewise-constant central moments: mean and variance reach 1 by n = 1 and
// n = 2; skewness is 0 at n = 2 and 1 from n = 3; kurtosis steps through
// 1 (n=2), 3 (n=3), 4 (n>=4).
CentralMoments classical_central_moments(int n);

// The n -> infinity values (Poisson(1)): mean 1, variance 1, skew 1, kurt 4.
CentralMoments classical_central_moments_poisson_limit();

// E(e^{tK}) = sum_{i=0}^{n} (e^t - 1)^i / i!.
double classical_mgf(double t, int n);

// Residual of the size recursion
//   p(k | n+1) = (n-k)/(n-k+1) p(k | n) + (k+1)/(n-k+1) p(k+1 | n)
// evaluated from table rows; table must cover size n+1. Zero up to rounding.
double classical_size_recursion_residual(int k, int n,
                                         const ClassicalTable& table);

// Sum of squared differences between the size-n pmf and Poisson(1),
// including the Poisson tail out to k = 60 (mass beyond is ~1e-130 squared,
// far below anything measurable here).
double classical_poisson_sse(int n);

}  // namespace matchdist
