#include "matchdist/classical.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "matchdist/log_ops.hpp"

namespace matchdist {

ClassicalTable::ClassicalTable(int max_size) {
    if (max_size < 0)
        throw std::domain_error("ClassicalTable: negative max size");
    rows_.reserve(static_cast<std::size_t>(max_size) + 1);
    double neg_log_fact = 0.0;  // -log(s!) carried across rows
    for (int s = 0; s <= max_size; ++s) {
        if (s > 0) neg_log_fact -= std::log(static_cast<double>(s));
        std::vector<double> row(static_cast<std::size_t>(s) + 1, neg_inf);
        row[static_cast<std::size_t>(s)] = neg_log_fact;
        for (int k = s - 1; k >= 0; --k) {
            const double t1 =
                s - k - 1 > 0
                    ? std::log(static_cast<double>(s - k - 1)) + row[k + 1]
                    : neg_inf;
            const double t2 =
                k < s - 1 ? std::log(static_cast<double>(k + 2)) + row[k + 2]
                          : neg_inf;
            row[static_cast<std::size_t>(k)] =
                std::log(static_cast<double>(k + 1)) -
                std::log(static_cast<double>(s - k)) + log_add_exp(t1, t2);
        }
        const double norm = log_sum_exp(row);
        for (double& v : row) v -= norm;
        rows_.push_back(std::move(row));
    }
}

const std::vector<double>& ClassicalTable::row(int size) const {
    if (size < 0 || size > max_size())
        throw std::out_of_range("ClassicalTable: size " + std::to_string(size) +
                                " outside table");
    return rows_[static_cast<std::size_t>(size)];
}

double ClassicalTable::log_pmf(int k, int size) const {
    const auto& r = row(size);
    if (k < 0 || k > size) return neg_inf;
    return r[static_cast<std::size_t>(k)];
}

double classical_pmf_explicit(int k, int n) {
    if (k < 0 || n < 0)
        throw std::domain_error("classical_pmf_explicit: negative argument");
    if (k > n)
        throw std::domain_error("classical_pmf_explicit: k exceeds size");
    double series = 0.0, term = 1.0;  // term = (-1)^i / i!
    for (int i = 0; i <= n - k; ++i) {
        series += term;
        term /= -(i + 1);
    }
    return series / std::exp(log_factorial(k));
}

double classical_pmf_poisson_limit(int k) {
    if (k < 0) throw std::domain_error("classical_pmf_poisson_limit: k < 0");
    return std::exp(-1.0 - log_factorial(k));
}

namespace {

// Stirling-number partial sums via the triangle S(r,i) = i S(r-1,i) + S(r-1,i-1).
template <typename Num>
Num stirling_partial_sum(int r, int n) {
    std::vector<Num> s(static_cast<std::size_t>(r) + 1, Num(0));
    s[0] = Num(1);  // row r = 0
    for (int row = 1; row <= r; ++row) {
        for (int i = row; i >= 1; --i)
            s[static_cast<std::size_t>(i)] =
                Num(i) * s[static_cast<std::size_t>(i)] +
                s[static_cast<std::size_t>(i - 1)];
        s[0] = Num(0);
    }
    Num acc(0);
    for (int i = 0; i <= std::min(r, n); ++i)
        acc += s[static_cast<std::size_t>(i)];
    return acc;
}

}  // namespace

double classical_raw_moment(int r, int n) {
    if (r < 0 || n < 0)
        throw std::domain_error("classical_raw_moment: negative argument");
    if (r == 0) return 1.0;
    // Bell numbers stay below 2^63 through r = 20 (B_20 ~ 5.2e13).
    if (r <= 20)
        return static_cast<double>(stirling_partial_sum<std::uint64_t>(r, n));
    return stirling_partial_sum<double>(r, n);
}

CentralMoments classical_central_moments(int n) {
    if (n < 0)
        throw std::domain_error("classical_central_moments: negative size");
    CentralMoments m;
    m.mean = n == 0 ? 0.0 : 1.0;
    m.variance = n <= 1 ? 0.0 : 1.0;
    if (n >= 2) {
        m.skewness = n == 2 ? 0.0 : 1.0;
        m.kurtosis = n == 2 ? 1.0 : (n == 3 ? 3.0 : 4.0);
    }
    return m;
}

CentralMoments classical_central_moments_poisson_limit() {
    return {1.0, 1.0, 1.0, 4.0};
}

double classical_mgf(double t, int n) {
    if (n < 0) throw std::domain_error("classical_mgf: negative size");
    const double x = std::expm1(t);  // e^t - 1
    double acc = 0.0, term = 1.0;    // term = x^i / i!
    for (int i = 0; i <= n; ++i) {
        acc += term;
        term *= x / (i + 1);
    }
    return acc;
}

double classical_size_recursion_residual(int k, int n,
                                         const ClassicalTable& table) {
    if (k < 0 || k > n + 1)
        throw std::domain_error("classical_size_recursion_residual: bad k");
    const double lhs = std::exp(table.log_pmf(k, n + 1));
    const double p_k = k <= n ? std::exp(table.log_pmf(k, n)) : 0.0;
    const double p_k1 = k + 1 <= n ? std::exp(table.log_pmf(k + 1, n)) : 0.0;
    const double rhs =
        (static_cast<double>(n - k) * p_k + (k + 1) * p_k1) / (n - k + 1);
    return lhs - rhs;
}

double classical_poisson_sse(int n) {
    constexpr int tail_cutoff = 60;
    const ClassicalTable table(n);
    const auto& row = table.row(n);
    double sse = 0.0;
    for (int k = 0; k <= tail_cutoff; ++k) {
        const double pois = classical_pmf_poisson_limit(k);
        const double p = k <= n ? std::exp(row[static_cast<std::size_t>(k)]) : 0.0;
        sse += (p - pois) * (p - pois);
    }
    return sse;
}

}  // namespace matchdist
