#pragma once

// Standard normal CDF and quantile, needed for the normal approximation to
// the total-matches distribution and for Wald-type confidence intervals.

namespace matchdist {

// P(Z <= z) for Z ~ N(0,1).
double norm_cdf(double z);

// Inverse of norm_cdf. Returns -inf / +inf at p = 0 / 1; throws
// std::domain_error outside [0,1]. Accurate to about 1e-15 (Wichura's
// algorithm AS 241, PPND16).
double norm_quantile(double p);

}  // namespace matchdist
