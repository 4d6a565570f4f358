#include "molcomm/hitting_time.hpp"

#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace molcomm {

namespace {

void require_finite(double t) {
    if (!std::isfinite(t)) throw std::domain_error("hitting time: non-finite time argument");
}

constexpr double kLogUnderflow = -700.0;

}  // namespace

void ChannelParams::validate() const {
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("ChannelParams: d must be > 0");
    if (!(sigma2 > 0.0) || !std::isfinite(sigma2))
        throw std::invalid_argument("ChannelParams: sigma2 must be > 0");
    if (deadline && !(*deadline > 0.0))
        throw std::invalid_argument("ChannelParams: deadline must be > 0");
}

double log_pdf(double t, const ChannelParams& params) {
    require_finite(t);
    if (t <= 0.0) return -std::numeric_limits<double>::infinity();
    const double d = params.d;
    const double s2 = params.sigma2;
    return std::log(d) - 0.5 * std::log(2.0 * std::numbers::pi * s2) - 1.5 * std::log(t) -
           d * d / (2.0 * s2 * t);
}

double pdf(double t, const ChannelParams& params) {
    const double lp = log_pdf(t, params);
    if (lp < kLogUnderflow) return 0.0;
    return std::exp(lp);
}

double cdf(double t, const ChannelParams& params) {
    require_finite(t);
    if (t <= 0.0) return 0.0;
    return std::erfc(params.d / std::sqrt(2.0 * params.sigma2 * t));
}

double survival(double t, const ChannelParams& params) {
    require_finite(t);
    if (t <= 0.0) return 1.0;
    return std::erf(params.d / std::sqrt(2.0 * params.sigma2 * t));
}

double arrival_prob_interval(int k, double tau, const ChannelParams& params) {
    if (k < 1) throw std::domain_error("arrival_prob_interval: k must be >= 1, got " + std::to_string(k));
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::domain_error("arrival_prob_interval: tau must be > 0");
    const double hi = cdf(k * tau, params);
    if (hi <= 0.5) return hi - cdf((k - 1) * tau, params);
    // Far tail: both cdf values are close to one, subtract survivals instead.
    return survival((k - 1) * tau, params) - survival(k * tau, params);
}

}  // namespace molcomm
