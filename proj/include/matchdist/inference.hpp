#pragma once

#include <cstdint>
#include <vector>

namespace matchdist {

// Observed match counts from repeated games of the same size. Each
// observation lies in {0..size} \ {size-1}: matching all but one item is
// impossible, so that value is rejected as data.
struct Dataset {
    int size = 0;
    std::vector<int> observations;
};

void validate_dataset(const Dataset& data);

double dataset_mean(const Dataset& data);

// phi = -0.5 * log((1-theta)/theta); maps (0,1) onto the real line.
double theta_to_phi(double theta);
// Inverse map, 1/(1 + e^{-2 phi}); sends -inf to 0 and +inf to 1.
double phi_to_theta(double phi);

double log_likelihood(const Dataset& data, double theta);
double log_likelihood_phi(const Dataset& data, double phi);

struct ScoreHessian {
    double score = 0.0;
    double hessian = 0.0;
};

// Derivatives of the log-likelihood in the theta parameterisation.
// Requires 0 < theta < 1; the formulas divide by theta*(1-theta).
ScoreHessian score_and_hessian_theta(const Dataset& data, double theta);

// Derivatives in the phi parameterisation, valid for any finite phi.
// Related to the theta versions by s(phi) = 2*theta*(1-theta)*s(theta) and
// H(theta)*4*theta^2*(1-theta)^2 = H(phi) + 4*(theta-1/2)*s(phi).
ScoreHessian score_and_hessian_phi(const Dataset& data, double phi);

enum class BoundaryFlag { none, at_zero, at_one };

struct MleResult {
    double theta = 0.0;
    double phi = 0.0;  // +-inf at the boundaries
    BoundaryFlag boundary = BoundaryFlag::none;
    int iterations = 0;
    double score = 0.0;  // phi-space score at the estimate, 0 at boundaries
};

// Maximum likelihood estimate. Sample mean <= 1 gives theta = 0 and sample
// mean = n gives theta = 1 (the likelihood is monotone there); otherwise
// Newton iteration in phi with a bracketing bisection fallback.
MleResult mle(const Dataset& data);

// Data-dependent share of the confidence tail mass placed below the
// estimate: max(mean-1, 0)/(n-1).
double lower_tail_fraction(const Dataset& data);

// How lower_tail_fraction splits the total tail mass alpha:
// fraction_of_alpha puts alpha*a0 below and alpha*(1-a0) above;
// absolute puts min(a0, alpha) below and the remainder above.
enum class TailSplit { fraction_of_alpha, absolute };

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
};

// Wald interval in phi from the observed information, mapped back through
// the logistic. Throws when the estimate sits on the boundary, where the
// Hessian degenerates; use ci_bootstrap there.
ConfidenceInterval ci_asymptotic(const Dataset& data, double level,
                                 TailSplit split = TailSplit::fraction_of_alpha);

// Percentile bootstrap with the same tail split. Resample r draws its own
// generator seed from (seed, r), so results do not depend on evaluation
// order.
ConfidenceInterval ci_bootstrap(const Dataset& data, double level,
                                int resamples, std::uint64_t seed,
                                TailSplit split = TailSplit::fraction_of_alpha);

// Root of theta^n - n*theta + max(mean-1, 0) on [0,1]; requires n >= 2.
double mom_estimate(const Dataset& data);
double mom_estimate_from_mean(double mean, int size);

// First-order version max(mean-1, 0)/(n-1); requires n >= 2.
double mom_approx(const Dataset& data);
double mom_approx_from_mean(double mean, int size);

}  // namespace matchdist
