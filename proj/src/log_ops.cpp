#include "matchdist/log_ops.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace matchdist {

double log_add_exp(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    if (a < b) std::swap(a, b);
    // a + log(1 + exp(b - a)); the exponent is <= 0 so this cannot overflow.
    return a + std::log1p(std::exp(b - a));
}

double log_sub_exp(double a, double b) {
    if (b == neg_inf) return a;
    if (a < b) throw std::invalid_argument("log_sub_exp: requires a >= b");
    if (a == b) return neg_inf;
    // expm1 keeps precision when the difference is tiny.
    return a + std::log(-std::expm1(b - a));
}

double log_sum_exp(std::span<const double> logs) {
    if (logs.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    const double m = *std::max_element(logs.begin(), logs.end());
    if (m == neg_inf) return neg_inf;
    double acc = 0.0;
    for (double x : logs) acc += std::exp(x - m);
    return m + std::log(acc);
}

namespace {

// Grow-on-demand table of partial sums; extension happens under a lock so the
// table is usable from concurrent test runners.
class LogSumTable {
  public:
    explicit LogSumTable(std::vector<double> seed) : values_(std::move(seed)) {}

    template <typename Extend>
    double at(int n, Extend extend) {
        std::lock_guard<std::mutex> hold(lock_);
        while (static_cast<int>(values_.size()) <= n) extend(values_);
        return values_[static_cast<std::size_t>(n)];
    }

  private:
    std::mutex lock_;
    std::vector<double> values_;
};

}  // namespace

double log_factorial(int n) {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    static LogSumTable table({0.0, 0.0});  // 0! = 1! = 1
    return table.at(n, [](std::vector<double>& v) {
        const auto k = v.size();
        v.push_back(v.back() + std::log(static_cast<double>(k)));
    });
}

double log_subfactorial(int n) {
    if (n < 0) throw std::domain_error("log_subfactorial: negative argument");
    // D(n) = (n-1) * (D(n-1) + D(n-2)), run in log space.
    static LogSumTable table({0.0, neg_inf});  // D(0) = 1, D(1) = 0
    return table.at(n, [](std::vector<double>& v) {
        const auto k = v.size();
        const double prev = v[k - 1], prev2 = v[k - 2];
        v.push_back(std::log(static_cast<double>(k - 1)) +
                    log_add_exp(prev, prev2));
    });
}

double log_choose(int n, int k) {
    if (k < 0 || k > n) return neg_inf;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_binomial_pmf(int k, int n, double theta) {
    if (theta < 0.0 || theta > 1.0)
        throw std::domain_error("log_binomial_pmf: theta outside [0,1]");
    if (k < 0 || k > n) return neg_inf;
    if (theta == 0.0) return k == 0 ? 0.0 : neg_inf;
    if (theta == 1.0) return k == n ? 0.0 : neg_inf;
    return log_choose(n, k) + k * std::log(theta) +
           (n - k) * std::log1p(-theta);
}

double log_binomial_pmf_from_logs(int k, int n, double log_theta,
                                  double log_one_minus_theta) {
    if (k < 0 || k > n) return neg_inf;
    if (log_theta == neg_inf) return k == 0 ? 0.0 : neg_inf;
    if (log_one_minus_theta == neg_inf) return k == n ? 0.0 : neg_inf;
    return log_choose(n, k) + k * log_theta + (n - k) * log_one_minus_theta;
}

LogReal LogReal::from_value(double x) {
    if (x == 0.0) return zero();
    return {std::log(std::abs(x)), x > 0.0 ? 1.0 : -1.0};
}

LogReal LogReal::from_log(double log_mag, double sign) {
    if (sign == 0.0 || log_mag == neg_inf) return zero();
    return {log_mag, sign > 0.0 ? 1.0 : -1.0};
}

double LogReal::value() const { return sign * std::exp(log_abs); }

LogReal log_real_add(LogReal a, LogReal b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.sign == b.sign) return {log_add_exp(a.log_abs, b.log_abs), a.sign};
    if (a.log_abs == b.log_abs) return LogReal::zero();
    // Opposite signs: the larger magnitude wins.
    if (a.log_abs < b.log_abs) std::swap(a, b);
    return {log_sub_exp(a.log_abs, b.log_abs), a.sign};
}

void SignedLogSum::add(double coeff, double log_mag) {
    if (coeff == 0.0 || log_mag == neg_inf) return;
    total_ = log_real_add(
        total_, {std::log(std::abs(coeff)) + log_mag, coeff > 0.0 ? 1.0 : -1.0});
}

}  // namespace matchdist
