#include "matchdist/generalised.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "matchdist/log_ops.hpp"

namespace matchdist {

namespace {

void validate_common(int trials, double prob) {
    if (trials < 1)
        throw std::domain_error("MatchingParams: trials must be >= 1");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::domain_error("MatchingParams: prob outside [0,1]");
}

}  // namespace

MatchingParams::MatchingParams(int size, int trials, double prob) {
    if (size < 0) throw std::domain_error("MatchingParams: negative size");
    validate_common(trials, prob);
    size_ = size;
    trials_ = trials;
    prob_ = prob;
}

MatchingParams MatchingParams::with_infinite_size(int trials, double prob) {
    validate_common(trials, prob);
    if (prob > 0.0)
        throw std::domain_error("Distribution is a point-mass on infinity");
    MatchingParams p;
    p.infinite_ = true;
    p.trials_ = trials;
    p.prob_ = 0.0;
    return p;
}

int MatchingParams::size() const {
    if (infinite_) throw std::logic_error("MatchingParams: size is infinite");
    return size_;
}

std::vector<double> single_trial_log_pmf(int size, double prob) {
    const ClassicalTable table(size);
    return single_trial_log_pmf(size, prob, table);
}

std::vector<double> single_trial_log_pmf(int size, double prob,
                                         const ClassicalTable& table) {
    if (size < 0) throw std::domain_error("single_trial_log_pmf: size < 0");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::domain_error("single_trial_log_pmf: prob outside [0,1]");
    if (table.max_size() < size)
        throw std::out_of_range("single_trial_log_pmf: table too small");

    const std::size_t len = static_cast<std::size_t>(size) + 1;
    if (size == 0) return {0.0};
    if (size == 1) return {neg_inf, 0.0};
    if (prob == 1.0) {
        std::vector<double> point(len, neg_inf);
        point.back() = 0.0;
        return point;
    }
    if (prob == 0.0) return table.row(size);

    std::vector<double> logbin(len);
    for (int l = 0; l <= size; ++l)
        logbin[static_cast<std::size_t>(l)] = log_binomial_pmf(l, size, prob);

    std::vector<double> out(len, neg_inf);
    std::vector<double> terms;
    terms.reserve(len);
    for (int k = 0; k <= size; ++k) {
        terms.clear();
        for (int l = 0; l <= k; ++l)
            terms.push_back(logbin[static_cast<std::size_t>(l)] +
                            table.log_pmf(k - l, size - l));
        out[static_cast<std::size_t>(k)] = log_sum_exp(terms);
    }
    const double norm = log_sum_exp(out);
    for (double& v : out) v -= norm;
    return out;
}

namespace {

// Log-space convolution of two log-pmf vectors over 0..len(a)-1 and
// 0..len(b)-1.
std::vector<double> convolve_log(const std::vector<double>& a,
                                 const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, neg_inf);
    std::vector<double> terms;
    terms.reserve(b.size());
    for (std::size_t t = 0; t < out.size(); ++t) {
        terms.clear();
        const std::size_t lo = t >= b.size() - 1 ? t - (b.size() - 1) : 0;
        const std::size_t hi = std::min(t, a.size() - 1);
        for (std::size_t s = lo; s <= hi; ++s)
            terms.push_back(a[s] + b[t - s]);
        out[t] = log_sum_exp(terms);
    }
    return out;
}

std::vector<double> point_mass_log_pmf(long long at, long long support_max) {
    std::vector<double> out(static_cast<std::size_t>(support_max) + 1, neg_inf);
    out[static_cast<std::size_t>(at)] = 0.0;
    return out;
}

}  // namespace

MatchingDistribution::MatchingDistribution(const MatchingParams& params,
                                           ApproxPolicy policy)
    : params_(params) {
    const int m = params.trials();

    if (params.infinite_size()) {
        // prob is necessarily 0 here: each game contributes Poisson(1)
        // matches in the limit, so the total is Poisson(m).
        method_ = PmfMethod::poisson_limit;
        poisson_rate_ = static_cast<double>(m);
        return;
    }

    const int n = params.size();
    const double theta = params.prob();
    const long long nm = static_cast<long long>(n) * m;

    // Degenerate shapes are cheap and exact no matter how many trials.
    if (n == 0 || n == 1 || theta == 1.0) {
        method_ = PmfMethod::exact;
        log_probs_ = point_mass_log_pmf(n == 0 ? 0 : (n == 1 ? m : nm), nm);
    } else {
        const bool exact = policy == ApproxPolicy::force_exact ||
                           (policy == ApproxPolicy::automatic &&
                            m <= exact_trials_limit);
        if (exact) {
            method_ = PmfMethod::exact;
            const ClassicalTable table(n);
            const std::vector<double> one = single_trial_log_pmf(n, theta, table);
            log_probs_ = one;
            for (int j = 1; j < m; ++j) log_probs_ = convolve_log(log_probs_, one);
            const double norm = log_sum_exp(log_probs_);
            for (double& v : log_probs_) v -= norm;
        } else {
            method_ = PmfMethod::normal_approx;
            const MatchingMoments mom = matching_moments(params);
            const double mu = mom.mean, var = mom.variance;
            log_probs_.resize(static_cast<std::size_t>(nm) + 1);
            for (long long t = 0; t <= nm; ++t) {
                const double d = static_cast<double>(t) - mu;
                log_probs_[static_cast<std::size_t>(t)] = -0.5 * d * d / var;
            }
            const double norm = log_sum_exp(log_probs_);
            for (double& v : log_probs_) v -= norm;
        }
    }

    cumulative_.resize(log_probs_.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < log_probs_.size(); ++t) {
        acc += std::exp(log_probs_[t]);
        cumulative_[t] = acc;
    }
}

std::optional<long long> MatchingDistribution::support_max() const {
    if (!finite_support()) return std::nullopt;
    return static_cast<long long>(log_probs_.size()) - 1;
}

double MatchingDistribution::poisson_log_pmf(long long t) const {
    if (t < 0) return neg_inf;
    if (t > std::numeric_limits<int>::max())
        throw std::domain_error("poisson pmf: t too large");
    return -poisson_rate_ +
           static_cast<double>(t) * std::log(poisson_rate_) -
           log_factorial(static_cast<int>(t));
}

double MatchingDistribution::log_pmf(long long t) const {
    if (method_ == PmfMethod::poisson_limit) return poisson_log_pmf(t);
    if (t < 0 || t >= static_cast<long long>(log_probs_.size())) return neg_inf;
    return log_probs_[static_cast<std::size_t>(t)];
}

double MatchingDistribution::pmf(long long t) const {
    return std::exp(log_pmf(t));
}

double MatchingDistribution::cdf(long long t) const {
    if (t < 0) return 0.0;
    if (method_ == PmfMethod::poisson_limit) {
        double acc = 0.0;
        for (long long k = 0; k <= t; ++k) acc += std::exp(poisson_log_pmf(k));
        return std::min(acc, 1.0);
    }
    if (t >= static_cast<long long>(log_probs_.size()) - 1) return 1.0;
    return std::min(cumulative_[static_cast<std::size_t>(t)], 1.0);
}

double MatchingDistribution::upper_tail(long long t) const {
    if (t <= 0) return 1.0;
    if (method_ == PmfMethod::poisson_limit) {
        // Sum the tail directly; terms decay factorially past the rate.
        double acc = 0.0;
        const long long stop =
            t + 200 +
            static_cast<long long>(poisson_rate_ +
                                   60.0 * std::sqrt(poisson_rate_));
        for (long long k = t; k <= stop; ++k) {
            const double p = std::exp(poisson_log_pmf(k));
            acc += p;
            if (static_cast<double>(k) > poisson_rate_ && p < acc * 1e-18) break;
        }
        return std::min(acc, 1.0);
    }
    const long long top = static_cast<long long>(log_probs_.size()) - 1;
    if (t > top) return 0.0;
    double acc = 0.0;
    for (long long s = top; s >= t; --s)
        acc += std::exp(log_probs_[static_cast<std::size_t>(s)]);
    return std::min(acc, 1.0);
}

long long MatchingDistribution::quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("quantile: p outside [0,1]");
    if (method_ == PmfMethod::poisson_limit) {
        if (p == 1.0)
            throw std::domain_error(
                "quantile: p = 1 has no finite quantile on an unbounded support");
        if (p == 0.0) return 0;
        double acc = 0.0;
        for (long long k = 0;; ++k) {
            acc += std::exp(poisson_log_pmf(k));
            if (acc >= p) return k;
        }
    }
    if (p == 0.0) {
        for (std::size_t t = 0; t < log_probs_.size(); ++t)
            if (log_probs_[t] != neg_inf) return static_cast<long long>(t);
        throw std::logic_error("quantile: empty distribution");
    }
    const auto it =
        std::lower_bound(cumulative_.begin(), cumulative_.end(), p);
    if (it != cumulative_.end())
        return static_cast<long long>(it - cumulative_.begin());
    // p slightly above the rounded total mass: take the last massive point.
    for (std::size_t t = log_probs_.size(); t-- > 0;)
        if (log_probs_[t] != neg_inf) return static_cast<long long>(t);
    throw std::logic_error("quantile: empty distribution");
}

std::vector<long long> MatchingDistribution::sample(int count,
                                                    std::uint64_t seed) const {
    if (count < 0) throw std::domain_error("sample: negative count");
    std::mt19937_64 gen(seed);
    std::vector<long long> draws;
    draws.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        // 53-bit uniform in [0,1); engine output is portable, unlike
        // std::uniform_real_distribution.
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        if (method_ == PmfMethod::poisson_limit) {
            double acc = 0.0;
            long long k = 0;
            while (true) {
                acc += std::exp(poisson_log_pmf(k));
                if (acc > u) break;
                ++k;
            }
            draws.push_back(k);
        } else {
            // Smallest t with cdf(t) > u, so zero-mass points are never hit.
            const auto it =
                std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
            draws.push_back(it == cumulative_.end()
                                ? static_cast<long long>(cumulative_.size()) - 1
                                : static_cast<long long>(it - cumulative_.begin()));
        }
    }
    return draws;
}

namespace {

// c * theta^p, skipping the power when the coefficient vanishes so that
// out-of-range exponents (negative p at small n) never get evaluated.
double poly_term(double c, double theta, long long p) {
    if (c == 0.0) return 0.0;
    return c * std::pow(theta, static_cast<double>(p));
}

struct SingleTrialMoments {
    double mean, variance, m3, m4;
};

// Closed-form raw-moment algebra reduced to central moments. The third and
// fourth central moments are fully expanded polynomials in theta; expansion
// keeps the cancellation mild even where the distribution is nearly
// degenerate (large n with theta near 1).
SingleTrialMoments exact_single_trial_moments(int n_int, double th) {
    const double n = static_cast<double>(n_int);
    const long long N = n_int;

    const double mean = 1.0 + n * th - poly_term(1.0, th, N);
    const double variance =
        1.0 - poly_term(1.0, th, 2 * N) + poly_term(n, th, 1) -
        poly_term(n, th, 2) - poly_term(n, th, N - 1) - poly_term(n, th, N) +
        poly_term(2.0 * n, th, N + 1);

    const double m3 =
        1.0 + n * th * (1.0 - 3.0 * th + 2.0 * th * th) +
        poly_term(-n * (n - 1) / 2.0, th, N - 2) +
        poly_term(-n * (2.0 * n - 1.0), th, N - 1) +
        poly_term((5.0 * n * n - 3.0 * n + 2.0) / 2.0, th, N) +
        poly_term(3.0 * n * (n + 1.0), th, N + 1) +
        poly_term(-3.0 * n * (n + 1.0), th, N + 2) +
        poly_term(-3.0 * n, th, 2 * N - 1) + poly_term(-3.0 * n, th, 2 * N) +
        poly_term(6.0 * n, th, 2 * N + 1) + poly_term(-2.0, th, 3 * N);

    const double m4 =
        4.0 + 7.0 * n * th + n * (3.0 * n - 13.0) * th * th -
        6.0 * n * (n - 2.0) * th * th * th +
        3.0 * n * (n - 2.0) * th * th * th * th +
        poly_term(-n * (n - 1.0) * (n - 2.0) / 6.0, th, N - 3) +
        poly_term(-1.5 * n * (n - 1.0) * (n - 1.0), th, N - 2) +
        poly_term(-n * (n * n + 3.0 * n + 4.0) / 2.0, th, N - 1) +
        poly_term((49.0 * n * n * n - 48.0 * n * n - 25.0 * n + 6.0) / 6.0, th, N) +
        poly_term(-2.0 * n * (2.0 * n * n - 3.0 * n - 6.0), th, N + 1) +
        poly_term(-6.0 * n * (n * n + 2.0), th, N + 2) +
        poly_term(4.0 * n * (n * n + 2.0), th, N + 3) +
        poly_term(-2.0 * n * (n - 1.0), th, 2 * N - 2) +
        poly_term(-4.0 * n * (2.0 * n - 1.0), th, 2 * N - 1) +
        poly_term(2.0 * (5.0 * n * n - 3.0 * n - 1.0), th, 2 * N) +
        poly_term(6.0 * n * (2.0 * n + 1.0), th, 2 * N + 1) +
        poly_term(-6.0 * n * (2.0 * n + 1.0), th, 2 * N + 2) +
        poly_term(-6.0 * n, th, 3 * N - 1) + poly_term(-6.0 * n, th, 3 * N) +
        poly_term(12.0 * n, th, 3 * N + 1) + poly_term(-3.0, th, 4 * N);

    return {mean, variance, m3, m4};
}

SingleTrialMoments asymptotic_single_trial_moments(int n_int, double th) {
    const double n = static_cast<double>(n_int);
    const double v = 1.0 + n * th * (1.0 - th);
    const double m3 = 1.0 + n * th * (1.0 - th) * (1.0 - 2.0 * th);
    const double m4 =
        3.0 * v * v + 1.0 + n * th * (1.0 - th) * (6.0 * th * th - 6.0 * th + 1.0);
    return {1.0 + n * th, v, m3, m4};
}

}  // namespace

MatchingMoments matching_moments(const MatchingParams& params,
                                 bool asymptotic) {
    const double m = static_cast<double>(params.trials());
    MatchingMoments out;

    if (params.infinite_size()) {
        // Poisson(m): cumulants are all m.
        out.mean = m;
        out.variance = m;
        out.skewness = 1.0 / std::sqrt(m);
        out.kurtosis = 3.0 + 1.0 / m;
        return out;
    }

    const SingleTrialMoments s =
        asymptotic ? asymptotic_single_trial_moments(params.size(), params.prob())
                   : exact_single_trial_moments(params.size(), params.prob());

    out.mean = m * s.mean;
    out.variance = m * std::max(s.variance, 0.0);
    if (s.variance > 0.0) {
        const double skew1 = s.m3 / std::pow(s.variance, 1.5);
        const double kurt1 = s.m4 / (s.variance * s.variance);
        out.skewness = skew1 / std::sqrt(m);
        out.kurtosis = 3.0 + (kurt1 - 3.0) / m;
    }
    return out;
}

double matching_mgf(double t, int size, double prob) {
    if (size < 0) throw std::domain_error("matching_mgf: negative size");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::domain_error("matching_mgf: prob outside [0,1]");
    const double x = std::expm1(t);  // e^t - 1
    const double et = std::exp(t);
    double acc = 0.0;
    double outer = 1.0;  // x^i / i!
    for (int i = 0; i <= size; ++i) {
        double inner = 0.0;
        for (int l = 0; l <= size - i; ++l)
            inner += std::exp(log_choose(size, l)) *
                     std::pow(prob * et, static_cast<double>(l)) *
                     std::pow(1.0 - prob, static_cast<double>(size - l));
        acc += outer * inner;
        outer *= x / (i + 1);
    }
    return acc;
}

HdrRegion matching_hdr(double cover_prob, const MatchingParams& params,
                       ApproxPolicy policy) {
    if (!(cover_prob > 0.0 && cover_prob < 1.0))
        throw std::domain_error("matching_hdr: cover_prob outside (0,1)");
    const MatchingDistribution dist(params, policy);

    long long top;
    if (auto mx = dist.support_max()) {
        top = *mx;
    } else {
        // Poisson tail: go far enough out that the missing mass is ~1e-15.
        const double r = static_cast<double>(params.trials());
        top = static_cast<long long>(r + 20.0 * std::sqrt(r) + 40.0);
    }

    std::vector<long long> order(static_cast<std::size_t>(top) + 1);
    std::iota(order.begin(), order.end(), 0LL);
    std::vector<double> probs(order.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        probs[i] = dist.pmf(static_cast<long long>(i));
    std::sort(order.begin(), order.end(), [&](long long a, long long b) {
        const double pa = probs[static_cast<std::size_t>(a)];
        const double pb = probs[static_cast<std::size_t>(b)];
        if (pa != pb) return pa > pb;
        return a < b;
    });

    HdrRegion region;
    double acc = 0.0;
    for (long long t : order) {
        region.points.push_back(t);
        acc += probs[static_cast<std::size_t>(t)];
        if (acc >= cover_prob) break;
    }
    region.coverage = acc;
    std::sort(region.points.begin(), region.points.end());
    region.contiguous =
        region.points.back() - region.points.front() + 1 ==
        static_cast<long long>(region.points.size());
    return region;
}

}  // namespace matchdist
