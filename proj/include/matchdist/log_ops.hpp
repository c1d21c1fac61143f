#pragma once

#include <limits>
#include <span>

// Log-space primitives shared by every distribution computation in this
// library. All probabilities are carried as natural logs; impossible
// outcomes are -infinity.

namespace matchdist {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)), safe against overflow; -inf acts as the additive zero.
double log_add_exp(double a, double b);

// log(exp(a) - exp(b)) for a >= b; returns -inf when a == b.
double log_sub_exp(double a, double b);

// log(sum exp(x_i)) with the usual max shift. Throws std::invalid_argument on
// an empty span; returns -inf iff every element is -inf.
double log_sum_exp(std::span<const double> logs);

// log(n!). Memoized up to the largest n seen so far; safe to call from
// multiple threads.
double log_factorial(int n);

// log of the number of derangements of n items. D(0)=1 and D(1)=0, so
// log_subfactorial(1) == -inf. Memoized like log_factorial.
double log_subfactorial(int n);

// log C(n, k); -inf outside 0 <= k <= n.
double log_choose(int n, int k);

// log Bin(k | n, theta) with the endpoint conventions 0*log(0) = 0, so that
// theta = 0 puts all mass on k = 0 and theta = 1 on k = n.
double log_binomial_pmf(int k, int n, double theta);

// Same pmf but parameterised by (log theta, log(1-theta)); keeps accuracy
// when theta is the image of a large logit value.
double log_binomial_pmf_from_logs(int k, int n, double log_theta,
                                  double log_one_minus_theta);

// A signed quantity stored as log|x| plus sign, for sums whose terms span
// hundreds of orders of magnitude and mixed signs (score/Hessian inner sums).
struct LogReal {
    double log_abs = neg_inf;
    double sign = 0.0;  // -1, 0, or +1

    static LogReal zero() { return {}; }
    static LogReal from_value(double x);
    // sign * exp(log_mag); sign must be -1, 0, or +1.
    static LogReal from_log(double log_mag, double sign = 1.0);

    double value() const;
    bool is_zero() const { return sign == 0.0; }
};

LogReal log_real_add(LogReal a, LogReal b);

// Adds coeff * exp(log_mag) into a running signed total.
class SignedLogSum {
  public:
    void add(double coeff, double log_mag);
    LogReal total() const { return total_; }

  private:
    LogReal total_;
};

}  // namespace matchdist
