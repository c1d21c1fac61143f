#include "matchdist/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "matchdist/classical.hpp"
#include "matchdist/gaussian.hpp"
#include "matchdist/generalised.hpp"
#include "matchdist/log_ops.hpp"

namespace matchdist {

void validate_dataset(const Dataset& data) {
    if (data.size < 0) throw std::domain_error("dataset: negative size");
    if (data.observations.empty())
        throw std::domain_error("dataset: no observations");
    for (int k : data.observations) {
        if (k < 0 || k > data.size)
            throw std::domain_error("dataset: observation outside 0..size");
        if (data.size >= 1 && k == data.size - 1)
            throw std::domain_error(
                "dataset: size-1 matches is impossible in any permutation");
    }
}

double dataset_mean(const Dataset& data) {
    validate_dataset(data);
    long long total = 0;
    for (int k : data.observations) total += k;
    return static_cast<double>(total) /
           static_cast<double>(data.observations.size());
}

double theta_to_phi(double theta) {
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("theta_to_phi: theta outside [0,1]");
    if (theta == 0.0) return -pos_inf;
    if (theta == 1.0) return pos_inf;
    return 0.5 * std::log(theta / (1.0 - theta));
}

double phi_to_theta(double phi) {
    if (std::isnan(phi)) throw std::domain_error("phi_to_theta: nan");
    return 1.0 / (1.0 + std::exp(-2.0 * phi));
}

namespace {

// Multiplicity of each distinct observed value, so per-value quantities are
// computed once no matter how long the sample is.
std::vector<long long> observation_counts(const Dataset& data) {
    std::vector<long long> counts(static_cast<std::size_t>(data.size) + 1, 0);
    for (int k : data.observations) ++counts[static_cast<std::size_t>(k)];
    return counts;
}

struct PerValueDerivs {
    double a;  // (1/Match) sum_l (l - n*theta) Bin(l) M(k,l)
    double b;  // (1/Match) sum_l q(l)          Bin(l) M(k,l)
};

// Inner sums of the score and Hessian for one observed value k. Terms are
// accumulated as sign + log magnitude because the binomial weights span many
// orders of magnitude at extreme theta.
PerValueDerivs per_value_derivs(int k, int n, double theta, double log_theta,
                                double log_one_minus_theta,
                                const ClassicalTable& table) {
    const double nd = static_cast<double>(n);
    SignedLogSum a_sum, b_sum;
    std::vector<double> mass_terms;
    mass_terms.reserve(static_cast<std::size_t>(k) + 1);
    for (int l = 0; l <= k; ++l) {
        const double ld = static_cast<double>(l);
        const double lm =
            log_binomial_pmf_from_logs(l, n, log_theta, log_one_minus_theta) +
            table.log_pmf(k - l, n - l);
        mass_terms.push_back(lm);
        a_sum.add(ld - nd * theta, lm);
        b_sum.add(ld * (ld - 1.0) - 2.0 * ld * (nd - 1.0) * theta +
                      nd * (nd - 1.0) * theta * theta,
                  lm);
    }
    const double log_mass = log_sum_exp(mass_terms);
    if (log_mass == neg_inf)
        throw std::domain_error("score: observation has zero probability");
    const LogReal a = a_sum.total();
    const LogReal b = b_sum.total();
    return {a.is_zero() ? 0.0 : a.sign * std::exp(a.log_abs - log_mass),
            b.is_zero() ? 0.0 : b.sign * std::exp(b.log_abs - log_mass)};
}

ScoreHessian accumulate_phi(const Dataset& data, double theta,
                            double log_theta, double log_one_minus_theta) {
    const int n = data.size;
    const ClassicalTable table(n);
    const std::vector<long long> counts = observation_counts(data);
    ScoreHessian out;
    for (int k = 0; k <= n; ++k) {
        const long long c = counts[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        const PerValueDerivs d =
            per_value_derivs(k, n, theta, log_theta, log_one_minus_theta, table);
        const double s_phi = 2.0 * d.a;
        const double h_phi =
            4.0 * d.b - 4.0 * (theta - 0.5) * s_phi - s_phi * s_phi;
        out.score += static_cast<double>(c) * s_phi;
        out.hessian += static_cast<double>(c) * h_phi;
    }
    return out;
}

}  // namespace

double log_likelihood(const Dataset& data, double theta) {
    validate_dataset(data);
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::domain_error("log_likelihood: theta outside [0,1]");
    const ClassicalTable table(data.size);
    const std::vector<double> row =
        single_trial_log_pmf(data.size, theta, table);
    const std::vector<long long> counts = observation_counts(data);
    double acc = 0.0;
    for (std::size_t k = 0; k < counts.size(); ++k)
        if (counts[k] != 0) acc += static_cast<double>(counts[k]) * row[k];
    return acc;
}

double log_likelihood_phi(const Dataset& data, double phi) {
    return log_likelihood(data, phi_to_theta(phi));
}

ScoreHessian score_and_hessian_theta(const Dataset& data, double theta) {
    validate_dataset(data);
    if (!(theta > 0.0 && theta < 1.0))
        throw std::domain_error(
            "score: theta on the boundary, take one-sided limits instead");
    const int n = data.size;
    const ClassicalTable table(n);
    const std::vector<long long> counts = observation_counts(data);
    const double log_theta = std::log(theta);
    const double log_one_minus_theta = std::log1p(-theta);
    const double t1 = theta * (1.0 - theta);
    ScoreHessian out;
    for (int k = 0; k <= n; ++k) {
        const long long c = counts[static_cast<std::size_t>(k)];
        if (c == 0) continue;
        const PerValueDerivs d =
            per_value_derivs(k, n, theta, log_theta, log_one_minus_theta, table);
        const double s = d.a / t1;
        const double h = d.b / (t1 * t1) - s * s;
        out.score += static_cast<double>(c) * s;
        out.hessian += static_cast<double>(c) * h;
    }
    return out;
}

ScoreHessian score_and_hessian_phi(const Dataset& data, double phi) {
    validate_dataset(data);
    if (!std::isfinite(phi))
        throw std::domain_error("score: phi must be finite");
    const double theta = phi_to_theta(phi);
    // log(theta) and log(1-theta) straight from phi, so neither saturates
    // until phi is far beyond any optimiser step.
    const double log_theta = -std::log1p(std::exp(-2.0 * phi));
    const double log_one_minus_theta = -std::log1p(std::exp(2.0 * phi));
    return accumulate_phi(data, theta, log_theta, log_one_minus_theta);
}

namespace {

double phi_score(const Dataset& data, double phi) {
    return score_and_hessian_phi(data, phi).score;
}

[[noreturn]] void mle_failure(double phi, double score) {
    std::ostringstream msg;
    msg << "mle: no convergence, last phi = " << phi << ", score = " << score;
    throw std::runtime_error(msg.str());
}

}  // namespace

MleResult mle(const Dataset& data) {
    const double mean = dataset_mean(data);
    const int n = data.size;

    MleResult r;
    if (mean <= 1.0) {
        r.theta = 0.0;
        r.phi = -pos_inf;
        r.boundary = BoundaryFlag::at_zero;
        return r;
    }
    if (mean == static_cast<double>(n)) {
        r.theta = 1.0;
        r.phi = pos_inf;
        r.boundary = BoundaryFlag::at_one;
        return r;
    }

    const double warm =
        std::clamp(mom_approx_from_mean(mean, n), 1e-6, 1.0 - 1e-6);
    double phi = theta_to_phi(warm);

    // The score is strictly decreasing in phi, so bracket its root first.
    const double phi_cap = 300.0;
    double lo = phi - 1.0, hi = phi + 1.0, step = 1.0;
    while (phi_score(data, lo) <= 0.0) {
        step *= 2.0;
        lo -= step;
        if (lo < -phi_cap) mle_failure(lo, phi_score(data, lo));
    }
    step = 1.0;
    while (phi_score(data, hi) >= 0.0) {
        step *= 2.0;
        hi += step;
        if (hi > phi_cap) mle_failure(hi, phi_score(data, hi));
    }

    ScoreHessian sh{};
    for (int iter = 1; iter <= 200; ++iter) {
        sh = score_and_hessian_phi(data, phi);
        r.iterations = iter;
        if (std::fabs(sh.score) <= 1e-10) break;
        if (sh.score > 0.0)
            lo = phi;
        else
            hi = phi;
        double next = sh.hessian < 0.0 ? phi - sh.score / sh.hessian : lo;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double move = std::fabs(next - phi);
        phi = next;
        if (move <= 1e-12) {
            sh = score_and_hessian_phi(data, phi);
            break;
        }
        if (iter == 200) mle_failure(phi, sh.score);
    }

    r.phi = phi;
    r.theta = phi_to_theta(phi);
    r.score = sh.score;
    return r;
}

double lower_tail_fraction(const Dataset& data) {
    if (data.size < 2)
        throw std::domain_error("lower_tail_fraction: needs size >= 2");
    const double mean = dataset_mean(data);
    return std::max(mean - 1.0, 0.0) / (static_cast<double>(data.size) - 1.0);
}

namespace {

struct TailProbs {
    double lower;  // mass below the interval
    double upper;  // mass above the interval
};

TailProbs split_tails(double level, double a0, TailSplit split) {
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("confidence level outside (0,1)");
    const double alpha = 1.0 - level;
    if (split == TailSplit::fraction_of_alpha)
        return {alpha * a0, alpha * (1.0 - a0)};
    const double lower = std::min(a0, alpha);
    return {lower, alpha - lower};
}

}  // namespace

ConfidenceInterval ci_asymptotic(const Dataset& data, double level,
                                 TailSplit split) {
    const MleResult fit = mle(data);
    if (fit.boundary != BoundaryFlag::none)
        throw std::domain_error(
            "ci_asymptotic: estimate on the boundary gives a degenerate "
            "Hessian; use ci_bootstrap");
    const ScoreHessian sh = score_and_hessian_phi(data, fit.phi);
    if (!(sh.hessian < 0.0))
        throw std::domain_error(
            "ci_asymptotic: observed information is not positive; use "
            "ci_bootstrap");
    const double se = 1.0 / std::sqrt(-sh.hessian);
    const TailProbs tails = split_tails(level, lower_tail_fraction(data), split);
    const double lower_phi = fit.phi + norm_quantile(tails.lower) * se;
    const double upper_phi = fit.phi + norm_quantile(1.0 - tails.upper) * se;
    return {phi_to_theta(lower_phi), phi_to_theta(upper_phi)};
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Interpolated order statistic of a sorted sample at probability p.
double percentile(const std::vector<double>& sorted, double p) {
    if (p <= 0.0) return sorted.front();
    if (p >= 1.0) return sorted.back();
    const double h = p * static_cast<double>(sorted.size() - 1);
    const std::size_t i = static_cast<std::size_t>(h);
    if (i + 1 >= sorted.size()) return sorted.back();
    const double frac = h - static_cast<double>(i);
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

}  // namespace

ConfidenceInterval ci_bootstrap(const Dataset& data, double level,
                                int resamples, std::uint64_t seed,
                                TailSplit split) {
    validate_dataset(data);
    if (resamples < 1) throw std::domain_error("ci_bootstrap: resamples < 1");
    const TailProbs tails = split_tails(level, lower_tail_fraction(data), split);

    const std::size_t len = data.observations.size();
    std::vector<double> estimates;
    estimates.reserve(static_cast<std::size_t>(resamples));
    Dataset resample;
    resample.size = data.size;
    resample.observations.resize(len);
    for (int r = 0; r < resamples; ++r) {
        // Each resample owns a generator seeded from (seed, r), so a parallel
        // evaluation order could not change the interval.
        std::mt19937_64 gen(splitmix64(
            seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1))));
        for (std::size_t j = 0; j < len; ++j) {
            const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
            const std::size_t idx = std::min(
                static_cast<std::size_t>(u * static_cast<double>(len)), len - 1);
            resample.observations[j] = data.observations[idx];
        }
        estimates.push_back(mle(resample).theta);
    }
    std::sort(estimates.begin(), estimates.end());
    return {percentile(estimates, tails.lower),
            percentile(estimates, 1.0 - tails.upper)};
}

double mom_estimate_from_mean(double mean, int size) {
    if (size < 2)
        throw std::domain_error("mom_estimate: undefined for size <= 1");
    if (!(mean >= 0.0 && mean <= static_cast<double>(size)))
        throw std::domain_error("mom_estimate: mean outside 0..size");
    const double c = std::max(mean - 1.0, 0.0);
    if (c == 0.0) return 0.0;
    if (mean == static_cast<double>(size)) return 1.0;

    // F(t) = t^n - n t + c is strictly decreasing on [0,1] with F(0) = c > 0
    // and F(1) = 1 - n + c < 0, so plain bisection cannot miss.
    const double n = static_cast<double>(size);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 100 && hi - lo > 1e-15; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f = std::pow(mid, n) - n * mid + c;
        if (f > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double mom_estimate(const Dataset& data) {
    return mom_estimate_from_mean(dataset_mean(data), data.size);
}

double mom_approx_from_mean(double mean, int size) {
    if (size < 2)
        throw std::domain_error("mom_approx: undefined for size <= 1");
    if (!(mean >= 0.0 && mean <= static_cast<double>(size)))
        throw std::domain_error("mom_approx: mean outside 0..size");
    return std::max(mean - 1.0, 0.0) / (static_cast<double>(size) - 1.0);
}

double mom_approx(const Dataset& data) {
    return mom_approx_from_mean(dataset_mean(data), data.size);
}

}  // namespace matchdist
