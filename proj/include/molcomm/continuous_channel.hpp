#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "molcomm/hitting_time.hpp"
#include "molcomm/random.hpp"

namespace molcomm {

/// Release times x_1..x_n. Any order is allowed; entries must be finite and >= 0.
struct ReleaseSchedule {
    std::vector<double> x;

    std::size_t size() const { return x.size(); }
    void validate() const;
};

/// Every `period`-th particle carries a fresh label: release indices are split
/// into consecutive blocks of `period` and each block shares one label.
/// period = 1 is full labeling; period >= n makes all particles indistinguishable.
struct LabelingScheme {
    std::size_t period = 1;
};

/// What the receiver sees.
struct ObservedArrivals {
    std::vector<double> y;            ///< hitting times, ascending
    std::vector<int> b;               ///< b[i] = label of the particle arriving at y[i]
    std::vector<std::size_t> lost;    ///< release indices with t_i > deadline, ascending
};

/// Per-particle transmission times and the unsorted hitting times u = x + t.
struct HiddenTransmission {
    std::vector<double> t;
    std::vector<double> u;
};

/// Label of each release index under `scheme`; the last block may be short.
std::vector<int> apply_labeling(std::size_t n, const LabelingScheme& scheme);

/// Forms the observation for given transmission times. Survivors are sorted by
/// hitting time with ties broken by release index.
ObservedArrivals observe(const ReleaseSchedule& x, std::span<const double> t,
                         const ChannelParams& params, const LabelingScheme& scheme);

/// Draws t_i independently for every particle and calls observe().
ObservedArrivals simulate(const ReleaseSchedule& x, const ChannelParams& params,
                          const LabelingScheme& scheme, Rng& rng,
                          HiddenTransmission* hidden = nullptr);

/// Inverse of the sort: returns y reordered so that labels are ascending, which
/// is release order because labeled particles are always released in order.
/// Throws ContractViolation on duplicate labels or size mismatch.
std::vector<double> invert_sort(std::span<const double> y, std::span<const int> b);

/// log of prod_i f(u_i - x_i) with u = invert_sort(y, b); -inf when y is unsorted.
double labeled_log_density(std::span<const double> y, std::span<const int> b,
                           const ReleaseSchedule& x, const ChannelParams& params);
double labeled_density(std::span<const double> y, std::span<const int> b,
                       const ReleaseSchedule& x, const ChannelParams& params);

/// Log-likelihood of a fully labeled observation that may contain losses.
/// Labels must be release indices (period 1). Each lost particle contributes
/// log(1 - cdf(deadline)); each arrival its log density, which is -inf when the
/// implied transmission time exceeds the deadline.
double labeled_log_likelihood(const ObservedArrivals& obs, const ReleaseSchedule& x,
                              const ChannelParams& params);

/// Density of two indistinguishable particles:
/// f(y1-x1) f(y2-x2) + f(y2-x1) f(y1-x2) for y1 <= y2, zero otherwise.
double pair_density(std::span<const double, 2> y, std::span<const double, 2> x,
                    const ChannelParams& params);

/// Sum over all label permutations of the labeled density, evaluated as the
/// permanent of M[i][k] = f(y_k - x_i). Zero / -inf when y is unsorted.
/// Throws SizeError when n exceeds `permanent_cap`.
double indistinguishable_log_density(std::span<const double> y, const ReleaseSchedule& x,
                                     const ChannelParams& params,
                                     std::size_t permanent_cap = 14);
double indistinguishable_density(std::span<const double> y, const ReleaseSchedule& x,
                                 const ChannelParams& params, std::size_t permanent_cap = 14);

}  // namespace molcomm
