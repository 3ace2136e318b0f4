#pragma once

#include <cstdint>
#include <random>

namespace lsmmn {

using Rng = std::mt19937_64;

double standard_normal_cdf(double x);
/// Upper tail 1 - Phi(x), accurate far into the tail.
double standard_normal_sf(double x);
double standard_normal_quantile(double p);

double normal_log_density(double x, double mean, double variance);

/// Draw from N(mean, sd^2) restricted to [lower, upper]. Either bound may be infinite.
/// Inverse-CDF on the truncated region, with exponential rejection when the region starts
/// more than five standard deviations out in a tail.
double sample_truncated_normal(double mean, double sd, double lower, double upper, Rng& rng);

double truncated_normal_log_density(double x, double mean, double sd, double lower, double upper);
double truncated_normal_cdf(double x, double mean, double sd, double lower, double upper);

/// Draw from the inverse gamma distribution with density proportional to x^(-shape-1) exp(-rate/x).
double sample_inverse_gamma(double shape, double rate, Rng& rng);
double inverse_gamma_cdf(double x, double shape, double rate);

double sample_normal(double mean, double sd, Rng& rng);
double sample_uniform(Rng& rng);

}  // namespace lsmmn
