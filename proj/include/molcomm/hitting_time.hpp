#pragma once

#include <cmath>
#include <optional>
#include <random>

#include "molcomm/random.hpp"

namespace molcomm {

/// Physical constants of the one-dimensional diffusion channel.
///
/// `d` is the transmitter/receiver distance and `sigma2` the Wiener variance
/// parameter. When `deadline` is set, a particle whose transmission time exceeds
/// it is declared lost.
struct ChannelParams {
    double d = 1.0;
    double sigma2 = 1.0;
    std::optional<double> deadline;

    /// Throws std::invalid_argument unless d > 0, sigma2 > 0 and deadline > 0.
    void validate() const;
};

// First hitting time of a Wiener process started at 0 at level d > 0
// (a Levy distribution with scale d^2 / sigma^2):
//
//   f(t) = d / sqrt(2 pi sigma^2 t^3) * exp(-d^2 / (2 sigma^2 t)),   t > 0.
//
// Note the exponent is d^2/(2 sigma^2 t). Writing t^2 in the denominator gives
// a function that does not integrate to one.

/// Natural log of the density; -inf for t <= 0. Throws std::domain_error for
/// non-finite t.
double log_pdf(double t, const ChannelParams& params);

/// Density. Returns exactly 0 for t <= 0 and wherever log_pdf < -700.
double pdf(double t, const ChannelParams& params);

/// Distribution function 2 * Phi(-d / (sigma sqrt(t))) = erfc(d / sqrt(2 sigma^2 t)).
double cdf(double t, const ChannelParams& params);

/// Survival function 1 - cdf(t), computed without cancellation.
double survival(double t, const ChannelParams& params);

/// Probability that a particle released at the start of an interval of width
/// `tau` arrives in the k-th interval (k = 1 is its own interval).
double arrival_prob_interval(int k, double tau, const ChannelParams& params);

/// Maps a standard normal draw z != 0 to a hitting time d^2 / (sigma^2 z^2).
inline double hitting_time_from_normal(double z, const ChannelParams& params) {
    return params.d * params.d / (params.sigma2 * z * z);
}

/// Draws one exact hitting time from the stream.
template <class URBG>
double sample(const ChannelParams& params, URBG& rng) {
    std::normal_distribution<double> normal;
    double z = 0.0;
    while (z == 0.0) z = normal(rng);
    return hitting_time_from_normal(z, params);
}

}  // namespace molcomm
