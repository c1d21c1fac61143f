#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

// Shared helpers for the test binaries. Everything here is written from
// plain formulas, independent of the library internals it is used to check.

namespace testsup {

// Regularized lower incomplete gamma P(a, x) by series expansion; valid and
// fast for x < a + 1.
inline double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 500; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction;
// valid for x >= a + 1.
inline double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q domain");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

// Survival function of the chi-square distribution.
inline double chi2_sf(double x, double df) {
    return gamma_q(0.5 * df, 0.5 * x);
}

// Chi-square goodness-of-fit p-value of observed counts against expected
// probabilities; cells are pooled left to right until each expected count
// reaches min_expected.
inline double chi2_gof_pvalue(const std::vector<long long>& counts,
                              const std::vector<double>& probs,
                              double min_expected = 5.0) {
    long long total = 0;
    for (long long c : counts) total += c;
    std::vector<double> exp_bins;
    std::vector<double> obs_bins;
    double e_acc = 0.0, o_acc = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        e_acc += probs[i] * static_cast<double>(total);
        o_acc += static_cast<double>(counts[i]);
        if (e_acc >= min_expected) {
            exp_bins.push_back(e_acc);
            obs_bins.push_back(o_acc);
            e_acc = o_acc = 0.0;
        }
    }
    // fold any light tail into the last bin
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_bins.empty()) throw std::invalid_argument("too few cells");
        exp_bins.back() += e_acc;
        obs_bins.back() += o_acc;
    }
    if (exp_bins.size() < 2) throw std::invalid_argument("too few bins");
    double stat = 0.0;
    for (std::size_t i = 0; i < exp_bins.size(); ++i) {
        const double d = obs_bins[i] - exp_bins[i];
        stat += d * d / exp_bins[i];
    }
    return chi2_sf(stat, static_cast<double>(exp_bins.size() - 1));
}

// Binomial pmf by lgamma, no shared code with the library.
inline double binom_pmf(int k, int n, double p) {
    if (k < 0 || k > n) return 0.0;
    if (p == 0.0) return k == 0 ? 1.0 : 0.0;
    if (p == 1.0) return k == n ? 1.0 : 0.0;
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(n - k + 1.0);
    return std::exp(lc + k * std::log(p) + (n - k) * std::log1p(-p));
}

inline double binom_upper_tail(int k, int n, double p) {
    double acc = 0.0;
    for (int j = n; j >= k; --j) acc += binom_pmf(j, n, p);
    return acc;
}

struct PmfMoments {
    double mean, variance, skewness, kurtosis;
};

// Central moments straight off a pmf vector indexed by the outcome.
inline PmfMoments moments_from_pmf(const std::vector<double>& probs) {
    double mean = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k)
        mean += static_cast<double>(k) * probs[k];
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double d = static_cast<double>(k) - mean;
        m2 += d * d * probs[k];
        m3 += d * d * d * probs[k];
        m4 += d * d * d * d * probs[k];
    }
    return {mean, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

// Plain convolution of two pmf vectors.
inline std::vector<double> convolve(const std::vector<double>& a,
                                    const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline double rel_err(double got, double want) {
    if (want == 0.0) return std::fabs(got);
    return std::fabs(got - want) / std::fabs(want);
}

}  // namespace testsup
