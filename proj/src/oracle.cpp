#include "matchdist/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace matchdist::oracle {

namespace {

long long factorial_ll(int n) {
    long long f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

// Pascal's triangle row, exact in long long for the sizes allowed here.
std::vector<long long> binomial_row(int n) {
    std::vector<long long> row(static_cast<std::size_t>(n) + 1, 1);
    for (int i = 1; i < n; ++i)
        for (int j = i; j >= 1; --j) row[j] += row[j - 1];
    return row;
}

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

ExactDistribution enumerate_classical(int size) {
    if (size < 0) throw std::domain_error("enumerate_classical: negative size");
    if (size > 9)
        throw std::domain_error("enumerate_classical: size > 9 refused");

    std::vector<long long> counts(static_cast<std::size_t>(size) + 1, 0);
    std::vector<int> perm(static_cast<std::size_t>(size));
    std::iota(perm.begin(), perm.end(), 0);
    do {
        int fixed = 0;
        for (int i = 0; i < size; ++i)
            if (perm[static_cast<std::size_t>(i)] == i) ++fixed;
        ++counts[static_cast<std::size_t>(fixed)];
    } while (std::next_permutation(perm.begin(), perm.end()));

    ExactDistribution dist;
    const double total = static_cast<double>(factorial_ll(size));
    dist.probs.resize(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k)
        dist.probs[k] = static_cast<double>(counts[k]) / total;
    return dist;
}

ExactDistribution enumerate_generalised(int size, double prob) {
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::domain_error("enumerate_generalised: prob outside [0,1]");
    ExactDistribution dist;
    dist.probs.assign(static_cast<std::size_t>(size) + 1, 0.0);
    const std::vector<long long> choose = binomial_row(size);
    for (int l = 0; l <= size; ++l) {
        const double weight = static_cast<double>(choose[static_cast<std::size_t>(l)]) *
                              std::pow(prob, l) *
                              std::pow(1.0 - prob, size - l);
        if (weight == 0.0) continue;
        const ExactDistribution part = enumerate_classical(size - l);
        for (std::size_t k = 0; k < part.probs.size(); ++k)
            dist.probs[k + static_cast<std::size_t>(l)] +=
                weight * part.probs[k];
    }
    return dist;
}

std::vector<double> simulate_two_step(int size, double prob, int trials,
                                      int reps, std::uint64_t seed) {
    if (size < 0) throw std::domain_error("simulate_two_step: negative size");
    if (trials < 1) throw std::domain_error("simulate_two_step: trials < 1");
    if (reps < 1) throw std::domain_error("simulate_two_step: reps < 1");
    if (!(prob >= 0.0 && prob <= 1.0))
        throw std::domain_error("simulate_two_step: prob outside [0,1]");

    std::mt19937_64 gen(seed);
    const long long nm = static_cast<long long>(size) * trials;
    std::vector<long long> counts(static_cast<std::size_t>(nm) + 1, 0);
    std::vector<int> unknown;
    std::vector<int> placed;
    unknown.reserve(static_cast<std::size_t>(size));
    placed.reserve(static_cast<std::size_t>(size));

    for (int r = 0; r < reps; ++r) {
        long long total = 0;
        for (int trial = 0; trial < trials; ++trial) {
            unknown.clear();
            int known = 0;
            for (int i = 0; i < size; ++i) {
                if (uniform01(gen) < prob)
                    ++known;  // placed correctly by knowledge
                else
                    unknown.push_back(i);
            }
            placed = unknown;
            // Fisher-Yates over the unknown items.
            for (std::size_t i = placed.size(); i > 1; --i) {
                const std::size_t j = std::min(
                    static_cast<std::size_t>(uniform01(gen) *
                                             static_cast<double>(i)),
                    i - 1);
                std::swap(placed[i - 1], placed[j]);
            }
            int fixed = 0;
            for (std::size_t i = 0; i < placed.size(); ++i)
                if (placed[i] == unknown[i]) ++fixed;
            total += known + fixed;
        }
        ++counts[static_cast<std::size_t>(total)];
    }

    std::vector<double> pmf(counts.size());
    for (std::size_t t = 0; t < counts.size(); ++t)
        pmf[t] = static_cast<double>(counts[t]) / static_cast<double>(reps);
    return pmf;
}

}  // namespace matchdist::oracle
