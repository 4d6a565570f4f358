#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "molcomm/hitting_time.hpp"
#include "molcomm/random.hpp"

namespace molcomm {

/// Interval grid for the counting receiver. Releases happen at the start of an
/// interval, at most one per interval, i.i.d. with probability `release_prob`.
struct DiscreteConfig {
    double tau = 1.0;
    std::size_t num_intervals = 1000;
    double release_prob = 0.5;
    std::size_t isi_taps = 2;

    void validate() const;
};

/// Release bits r (0/1) and arrival counts c, one entry per interval.
struct DiscreteTrace {
    std::vector<int> r;
    std::vector<int> c;
};

/// Tractable approximation of the counting channel: a particle released i
/// intervals ago is tracked as a Bernoulli(p_table[i]) arrival for i < N and
/// folded into a Poisson(lambda) background afterwards.
struct ApproxModel {
    std::vector<double> p_table;
    double lambda = 0.0;

    std::size_t taps() const { return p_table.size(); }
};

/// Largest per-interval count the likelihoods accept.
inline constexpr int kMaxCount = 64;
/// Largest tap count for the forward recursion (2^N states).
inline constexpr std::size_t kMaxForwardTaps = 20;

/// Draws r_i ~ Bernoulli(p) for every interval.
std::vector<int> draw_releases(const DiscreteConfig& cfg, Rng& rng);

/// Exact channel with given transmission times, one per released particle in
/// release order. A particle released in interval i with time t lands in
/// interval i + ceil(t / tau) - 1 (a time on a grid point credits the earlier
/// interval); arrivals past the horizon are dropped.
std::vector<int> credit_arrivals(std::span<const int> r, std::span<const double> times,
                                 const DiscreteConfig& cfg);

/// Exact channel: draws a hitting time for every release and credits it.
std::vector<int> simulate_discrete(std::span<const int> r, const DiscreteConfig& cfg,
                                   const ChannelParams& params, Rng& rng);

/// p_table[k-1] = arrival_prob_interval(k) for k = 1..N and
/// lambda = p * (1 - sum p_table). N = 1 is the memoryless model.
ApproxModel build_approx_model(const DiscreteConfig& cfg, const ChannelParams& params);

/// Pr(c | releases) under the model. `recent_r[j]` is the release bit j
/// intervals back (j = 0 is the current interval); size must equal N.
double likelihood_window(int c, std::span<const int> recent_r, const ApproxModel& model);

/// sum_i log likelihood_window(c_i, window ending at i). Releases before the
/// first interval are taken as zero.
double sequence_likelihood(std::span<const int> c, std::span<const int> r,
                           const ApproxModel& model);

/// log sum_r Pr(c | r) Pr(r) with r_i i.i.d. Bernoulli(cfg.release_prob), by a
/// scaled forward recursion over the last N release bits.
double marginal_likelihood(std::span<const int> c, const DiscreteConfig& cfg,
                           const ApproxModel& model);

}  // namespace molcomm
