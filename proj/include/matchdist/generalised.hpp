#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "matchdist/classical.hpp"

// The matching distribution with a knowledge parameter and a trials
// parameter. A single game of size n yields K* = L + K_{n-L} matches, where
// L ~ Bin(n, theta) counts the items placed with certain knowledge and the
// remaining n-L items are permuted uniformly. The total over m independent
// games is the m-fold convolution. theta is written `prob` throughout.

namespace matchdist {

// Parameter triple (size n, trials m, prob theta). The size may be infinite,
// in which case theta must be 0 (the Poisson(1)-per-trial limit); an
// infinite size with theta > 0 would concentrate all mass at infinity and is
// rejected at construction.
class MatchingParams {
  public:
    MatchingParams(int size, int trials, double prob);
    static MatchingParams with_infinite_size(int trials, double prob);

    bool infinite_size() const { return infinite_; }
    int size() const;  // throws std::logic_error when infinite
    int trials() const { return trials_; }
    double prob() const { return prob_; }

  private:
    MatchingParams() = default;
    int size_ = 0;
    int trials_ = 1;
    double prob_ = 0.0;
    bool infinite_ = false;
};

enum class PmfMethod { exact, normal_approx, poisson_limit };

// Exact convolution is the default for at most this many trials; beyond it
// the automatic policy switches to a renormalized discrete normal density.
inline constexpr int exact_trials_limit = 100;

enum class ApproxPolicy { automatic, force_exact, force_normal };

// Log pmf of the matches in one game, over k = 0..n. The general case mixes
// classical rows: logsumexp over l of logBin(l|n,theta) + logp(k-l | n-l),
// then renormalizes. The impossible outcome k = n-1 stays -inf because every
// mixture component lands in its own component's hole.
std::vector<double> single_trial_log_pmf(int size, double prob);
std::vector<double> single_trial_log_pmf(int size, double prob,
                                         const ClassicalTable& table);

// Distribution of the total matches over all trials. Finite-size supports
// are stored as a dense log-pmf vector over t = 0..n*m; the infinite-size
// theta=0 case is kept as a Poisson(m) with its support extended on demand.
class MatchingDistribution {
  public:
    explicit MatchingDistribution(const MatchingParams& params,
                                  ApproxPolicy policy = ApproxPolicy::automatic);

    const MatchingParams& params() const { return params_; }
    PmfMethod method() const { return method_; }
    bool finite_support() const { return method_ != PmfMethod::poisson_limit; }
    // Largest support point, n*m; unset for the Poisson limit.
    std::optional<long long> support_max() const;

    double log_pmf(long long t) const;
    double pmf(long long t) const;
    double cdf(long long t) const;         // P(T <= t)
    double upper_tail(long long t) const;  // P(T >= t), summed over the tail
    // Smallest t with cdf(t) >= p; p = 0 gives the smallest point of
    // positive mass. Throws std::domain_error for p outside [0,1], and for
    // p = 1 on the unbounded Poisson support.
    long long quantile(double p) const;
    // Inverse-transform draws; identical output for identical seeds.
    std::vector<long long> sample(int count, std::uint64_t seed) const;

  private:
    MatchingParams params_;
    PmfMethod method_ = PmfMethod::exact;
    std::vector<double> log_probs_;  // finite-support methods only
    std::vector<double> cumulative_; // running sums of exp(log_probs_)
    double poisson_rate_ = 0.0;

    double poisson_log_pmf(long long t) const;
};

struct MatchingMoments {
    double mean = 0.0;
    double variance = 0.0;
    std::optional<double> skewness;  // unset when the variance is zero
    std::optional<double> kurtosis;
};

// Exact closed-form moments. Single-trial values come from the moment
// polynomials in prob (see matching_moments_single_trial); trials scale them
// by the IID-sum rules: mean and variance by m, skewness by m^{-1/2},
// excess kurtosis by 1/m. With asymptotic=true the large-n equivalences
// (mean 1+n*theta, variance 1+n*theta*(1-theta), ...) are used instead.
MatchingMoments matching_moments(const MatchingParams& params,
                                 bool asymptotic = false);

// E(e^{tK*}) for one game:
// sum_{i=0}^{n} ((e^t-1)^i/i!) sum_{l=0}^{n-i} C(n,l)(theta e^t)^l (1-theta)^{n-l}.
double matching_mgf(double t, int size, double prob);

struct HdrRegion {
    std::vector<long long> points;  // sorted ascending
    double coverage = 0.0;          // attained mass, >= the requested level
    bool contiguous = false;
};

// Smallest-mass-ranked covering set: support points are accumulated in
// decreasing pmf order (ties toward smaller t) until the requested
// probability is covered. The result can be non-contiguous since the pmf is
// not always unimodal (and t = nm-1 never has mass).
HdrRegion matching_hdr(double cover_prob, const MatchingParams& params,
                       ApproxPolicy policy = ApproxPolicy::automatic);

}  // namespace matchdist
