#include "lsmmn/random.hpp"

#include "lsmmn/types.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace lsmmn {

namespace {

constexpr double kTailSwitch = 5.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Robert (1995) exponential rejection for the standard normal restricted to [a, b], a > 0.
double sample_standard_tail(double a, double b, Rng& rng) {
    const double rate = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        const double x = a - std::log(1.0 - sample_uniform(rng)) / rate;
        if (x > b) continue;
        const double accept = std::exp(-0.5 * (x - rate) * (x - rate));
        if (sample_uniform(rng) <= accept) return x;
    }
}

// Probability mass of the standard normal on [a, b], computed on the side that keeps precision.
double standard_mass(double a, double b) {
    if (a > 0.0) return standard_normal_sf(a) - standard_normal_sf(b);
    return standard_normal_cdf(b) - standard_normal_cdf(a);
}

}  // namespace

double sample_uniform(Rng& rng) {
    // 53 random mantissa bits in [0, 1).
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double sample_normal(double mean, double sd, Rng& rng) {
    boost::random::normal_distribution<double> dist(mean, sd);
    return dist(rng);
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double standard_normal_quantile(double p) {
    if (p <= 0.0) return -kInf;
    if (p >= 1.0) return kInf;
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_log_density(double x, double mean, double variance) {
    const double r = x - mean;
    return -0.5 * (r * r / variance + std::log(2.0 * std::numbers::pi * variance));
}

double sample_truncated_normal(double mean, double sd, double lower, double upper, Rng& rng) {
    if (!(sd > 0.0) || !std::isfinite(sd) || !std::isfinite(mean))
        throw DomainError("truncated normal needs a finite mean and positive scale");
    if (!(lower < upper)) throw DomainError("truncated normal needs lower < upper");
    const double a = (lower - mean) / sd;
    const double b = (upper - mean) / sd;

    double x;
    if (a > kTailSwitch) {
        x = sample_standard_tail(a, b, rng);
    } else if (b < -kTailSwitch) {
        x = -sample_standard_tail(-b, -a, rng);
    } else if (a >= 0.0) {
        const double hi = standard_normal_sf(a);
        const double lo = standard_normal_sf(b);
        x = -standard_normal_quantile(lo + sample_uniform(rng) * (hi - lo));
    } else {
        const double lo = standard_normal_cdf(a);
        const double hi = standard_normal_cdf(b);
        x = standard_normal_quantile(lo + sample_uniform(rng) * (hi - lo));
    }
    x = std::clamp(x, a, b);
    return mean + sd * x;
}

double truncated_normal_log_density(double x, double mean, double sd, double lower, double upper) {
    if (x < lower || x > upper) return -kInf;
    const double a = (lower - mean) / sd;
    const double b = (upper - mean) / sd;
    return normal_log_density(x, mean, sd * sd) - std::log(standard_mass(a, b));
}

double truncated_normal_cdf(double x, double mean, double sd, double lower, double upper) {
    if (x <= lower) return 0.0;
    if (x >= upper) return 1.0;
    const double a = (lower - mean) / sd;
    const double b = (upper - mean) / sd;
    const double s = (x - mean) / sd;
    return standard_mass(a, s) / standard_mass(a, b);
}

double sample_inverse_gamma(double shape, double rate, Rng& rng) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
        throw DomainError("inverse gamma needs positive finite shape and rate");
    boost::random::gamma_distribution<double> dist(shape, 1.0 / rate);
    return 1.0 / dist(rng);
}

double inverse_gamma_cdf(double x, double shape, double rate) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_q(shape, rate / x);
}

}  // namespace lsmmn
