#pragma once

#include <cstdint>
#include <vector>

// Brute-force ground truth for tests and diagnostics. Nothing here shares
// code with the recursion-based production paths: probabilities come from
// permutation enumeration and plain-arithmetic mixtures.
namespace matchdist::oracle {

struct ExactDistribution {
    std::vector<double> probs;  // index = number of matches
};

// Walks all size! permutations and counts fixed points. Refuses size > 9.
ExactDistribution enumerate_classical(int size);

// Exact binomial mixture over the number of known placements, each stratum
// shifted and weighted; same size cap.
ExactDistribution enumerate_generalised(int size, double prob);

// Simulates reps totals of the two-step game (Bernoulli knowledge flags,
// then a uniform shuffle of the unknown items) across trials games each;
// returns the empirical pmf over 0..size*trials.
std::vector<double> simulate_two_step(int size, double prob, int trials,
                                      int reps, std::uint64_t seed);

}  // namespace matchdist::oracle
