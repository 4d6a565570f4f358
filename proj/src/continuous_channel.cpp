#include "molcomm/continuous_channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "molcomm/errors.hpp"
#include "molcomm/permanent.hpp"

namespace molcomm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double exp_or_zero(double log_value) {
    return log_value < -700.0 ? 0.0 : std::exp(log_value);
}

}  // namespace

void ReleaseSchedule::validate() const {
    for (double xi : x) {
        if (!std::isfinite(xi) || xi < 0.0)
            throw std::invalid_argument("ReleaseSchedule: release times must be finite and >= 0");
    }
}

std::vector<int> apply_labeling(std::size_t n, const LabelingScheme& scheme) {
    if (scheme.period == 0) throw std::invalid_argument("LabelingScheme: period must be >= 1");
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i / scheme.period);
    return labels;
}

ObservedArrivals observe(const ReleaseSchedule& x, std::span<const double> t,
                         const ChannelParams& params, const LabelingScheme& scheme) {
    if (t.size() != x.size())
        throw ContractViolation("observe: need one transmission time per release");
    const auto labels = apply_labeling(x.size(), scheme);

    ObservedArrivals obs;
    std::vector<std::size_t> arrived;
    arrived.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (params.deadline && t[i] > *params.deadline)
            obs.lost.push_back(i);
        else
            arrived.push_back(i);
    }
    // stable: equal hitting times stay in release order
    std::stable_sort(arrived.begin(), arrived.end(), [&](std::size_t a, std::size_t b) {
        return x.x[a] + t[a] < x.x[b] + t[b];
    });
    obs.y.reserve(arrived.size());
    obs.b.reserve(arrived.size());
    for (std::size_t i : arrived) {
        obs.y.push_back(x.x[i] + t[i]);
        obs.b.push_back(labels[i]);
    }
    return obs;
}

ObservedArrivals simulate(const ReleaseSchedule& x, const ChannelParams& params,
                          const LabelingScheme& scheme, Rng& rng, HiddenTransmission* hidden) {
    std::vector<double> t(x.size());
    for (double& ti : t) ti = sample(params, rng);
    if (hidden != nullptr) {
        hidden->u.resize(t.size());
        for (std::size_t i = 0; i < t.size(); ++i) hidden->u[i] = x.x[i] + t[i];
        hidden->t = t;
    }
    return observe(x, t, params, scheme);
}

std::vector<double> invert_sort(std::span<const double> y, std::span<const int> b) {
    if (y.size() != b.size()) throw ContractViolation("invert_sort: |y| != |b|");
    std::vector<std::size_t> idx(y.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return b[i] < b[j]; });
    for (std::size_t k = 1; k < idx.size(); ++k) {
        if (b[idx[k]] == b[idx[k - 1]])
            throw ContractViolation("invert_sort: duplicate label " + std::to_string(b[idx[k]]));
    }
    std::vector<double> u(y.size());
    for (std::size_t k = 0; k < idx.size(); ++k) u[k] = y[idx[k]];
    return u;
}

double labeled_log_density(std::span<const double> y, std::span<const int> b,
                           const ReleaseSchedule& x, const ChannelParams& params) {
    if (y.size() != b.size() || y.size() != x.size())
        throw ContractViolation("labeled_density: |y|, |b| and |x| must agree");
    if (!std::is_sorted(y.begin(), y.end())) return kNegInf;
    const auto u = invert_sort(y, b);
    double total = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) total += log_pdf(u[i] - x.x[i], params);
    return total;
}

double labeled_density(std::span<const double> y, std::span<const int> b,
                       const ReleaseSchedule& x, const ChannelParams& params) {
    return exp_or_zero(labeled_log_density(y, b, x, params));
}

double labeled_log_likelihood(const ObservedArrivals& obs, const ReleaseSchedule& x,
                              const ChannelParams& params) {
    if (obs.y.size() != obs.b.size())
        throw ContractViolation("labeled_log_likelihood: |y| != |b|");
    if (obs.y.size() + obs.lost.size() != x.size())
        throw ContractViolation("labeled_log_likelihood: |y| + |lost| != n");
    if (!obs.lost.empty() && !params.deadline)
        throw ContractViolation("labeled_log_likelihood: losses without a deadline");
    if (!std::is_sorted(obs.y.begin(), obs.y.end())) return kNegInf;

    std::vector<char> seen(x.size(), 0);
    double total = 0.0;
    for (std::size_t i : obs.lost) {
        if (i >= x.size() || seen[i]) throw ContractViolation("labeled_log_likelihood: bad lost index");
        seen[i] = 1;
        total += std::log(survival(*params.deadline, params));
    }
    for (std::size_t k = 0; k < obs.y.size(); ++k) {
        const int label = obs.b[k];
        if (label < 0 || static_cast<std::size_t>(label) >= x.size() || seen[label])
            throw ContractViolation("labeled_log_likelihood: labels must be distinct release indices");
        seen[label] = 1;
        const double t = obs.y[k] - x.x[label];
        if (params.deadline && t > *params.deadline) return kNegInf;
        total += log_pdf(t, params);
    }
    return total;
}

double pair_density(std::span<const double, 2> y, std::span<const double, 2> x,
                    const ChannelParams& params) {
    if (y[0] > y[1]) return 0.0;
    return pdf(y[0] - x[0], params) * pdf(y[1] - x[1], params) +
           pdf(y[1] - x[0], params) * pdf(y[0] - x[1], params);
}

double indistinguishable_log_density(std::span<const double> y, const ReleaseSchedule& x,
                                     const ChannelParams& params, std::size_t permanent_cap) {
    const std::size_t n = x.size();
    if (y.size() != n) throw ContractViolation("indistinguishable_density: |y| != |x|");
    if (n > permanent_cap)
        throw SizeError("indistinguishable_density: n = " + std::to_string(n) +
                        " exceeds permanent cap " + std::to_string(permanent_cap));
    if (!std::is_sorted(y.begin(), y.end())) return kNegInf;
    if (n == 0) return 0.0;

    // Row i holds log f(y_k - x_i); each row is rescaled by its maximum so the
    // permanent sees O(1) entries, and the scales are added back in log space.
    SquareMatrix scaled(n);
    double log_scale = 0.0;
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row_max = kNegInf;
        for (std::size_t k = 0; k < n; ++k) {
            row[k] = log_pdf(y[k] - x.x[i], params);
            row_max = std::max(row_max, row[k]);
        }
        if (row_max == kNegInf) return kNegInf;
        for (std::size_t k = 0; k < n; ++k) scaled(i, k) = std::exp(row[k] - row_max);
        log_scale += row_max;
    }
    const double per = permanent_nonnegative(scaled, permanent_cap);
    if (!(per > 0.0)) return kNegInf;
    return log_scale + std::log(per);
}

double indistinguishable_density(std::span<const double> y, const ReleaseSchedule& x,
                                 const ChannelParams& params, std::size_t permanent_cap) {
    return exp_or_zero(indistinguishable_log_density(y, x, params, permanent_cap));
}

}  // namespace molcomm
