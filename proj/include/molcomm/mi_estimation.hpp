#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "molcomm/discrete_channel.hpp"
#include "molcomm/hitting_time.hpp"
#include "molcomm/random.hpp"

namespace molcomm {

/// Monte-Carlo mutual-information estimate in bits.
struct MIEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

/// Adaptive Gauss-Kronrod settings for the one-dimensional marginals.
struct QuadratureSpec {
    double rel_tol = 1e-10;
    unsigned max_depth = 20;
};

/// Sample budget and seeding. Samples are split over a fixed number of slots,
/// each with its own substream derived from (seed, slot), so the estimate does
/// not depend on `threads`.
struct MonteCarloSpec {
    std::size_t n_samples = 20000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

inline constexpr std::size_t kMonteCarloSlots = 16;

/// Mean (converted from nats to bits) and standard error of `draw` over the
/// sample budget. Per-slot running moments are merged in slot order.
MIEstimate estimate_mean_bits(const MonteCarloSpec& mc, const std::function<double(Rng&)>& draw);

/// Probability that a particle released uniformly on [0, T] misses the horizon T:
/// (1/T) * integral_0^T (1 - cdf(s)) ds. Throws NumericError if quadrature does
/// not reach `quad.rel_tol`.
double lost_probability(double T, const ChannelParams& params, const QuadratureSpec& quad = {});

/// I(X; Y) per particle for X ~ Uniform[0, T] with output Y = X + t when X + t <= T
/// and an erasure symbol otherwise. The output marginal is closed form,
/// f(y) = cdf(y) / T on (0, T], and Pr(erasure) = lost_probability(T).
/// Uses params.d and params.sigma2; the horizon is T.
MIEstimate mi_single_particle(double T, const ChannelParams& params, const QuadratureSpec& quad,
                              const MonteCarloSpec& mc);

/// Per-particle mutual information of a block of two particles sharing one label
/// (half the block MI). Each particle is released independently Uniform[0, T].
/// Block outcomes and their output marginals, with F = cdf and P = lost_probability(T):
///   both arrive, y1 <= y2 <= T:  f(y|x) = pair_density(y, x),   f(y) = 2 F(y1) F(y2) / T^2
///   one arrives at y <= T:       f(y|x) = f(y-x1) S(T-x2) + f(y-x2) S(T-x1),
///                                f(y) = 2 F(y) P / T
///   none arrives:                Pr = S(T-x1) S(T-x2),        Pr = P^2
/// where S = 1 - F.
MIEstimate mi_pair(double T, const ChannelParams& params, const QuadratureSpec& quad,
                   const MonteCarloSpec& mc);

/// A joint law g(c, r) = g(c | r) Pr(r) on the counting channel that keeps the
/// i.i.d. Bernoulli release marginal.
class DiscreteLaw {
  public:
    virtual ~DiscreteLaw() = default;
    virtual double log_conditional(std::span<const int> c, std::span<const int> r) const = 0;
    /// log sum_r g(c | r) Pr(r)
    virtual double log_marginal(std::span<const int> c) const = 0;
};

/// The intersymbol-interference approximation of ApproxModel.
class IsiLaw final : public DiscreteLaw {
  public:
    IsiLaw(DiscreteConfig cfg, ApproxModel model) : cfg_(cfg), model_(std::move(model)) {}
    double log_conditional(std::span<const int> c, std::span<const int> r) const override {
        return sequence_likelihood(c, r, model_);
    }
    double log_marginal(std::span<const int> c) const override {
        return marginal_likelihood(c, cfg_, model_);
    }
    const ApproxModel& model() const { return model_; }

  private:
    DiscreteConfig cfg_;
    ApproxModel model_;
};

/// True law of the exact counting channel, by enumeration. Every released
/// particle lands k - 1 intervals after its release with probability
/// p_arr^(k), or is dropped past the horizon. Limited to 8 intervals.
class ExactDiscreteLaw final : public DiscreteLaw {
  public:
    static constexpr std::size_t kMaxIntervals = 8;

    ExactDiscreteLaw(const DiscreteConfig& cfg, const ChannelParams& params);

    double log_conditional(std::span<const int> c, std::span<const int> r) const override;
    double log_marginal(std::span<const int> c) const override;

    const DiscreteConfig& config() const { return cfg_; }
    /// Number of release sequences, 2^num_intervals.
    std::size_t num_release_sequences() const { return conditional_.size(); }
    /// Release sequence with index `code` (bit i = r_i) and its probability.
    std::vector<int> release_sequence(std::size_t code) const;
    double release_probability(std::size_t code) const;
    /// Support of Pr(c | r) for the release sequence `code`.
    const std::map<std::vector<int>, double>& conditional(std::size_t code) const {
        return conditional_[code];
    }

  private:
    DiscreteConfig cfg_;
    std::vector<std::map<std::vector<int>, double>> conditional_;
    std::map<std::vector<int>, double> marginal_;
};

/// Monte-Carlo lower bound on I(R; C) over one trace of cfg.num_intervals:
/// the mean of log[g(c | r) / g(c)] over (r, c) drawn from the exact channel.
MIEstimate mi_lower_bound_discrete(const DiscreteConfig& cfg, const ChannelParams& params,
                                   const DiscreteLaw& law, const MonteCarloSpec& mc);

/// Same with g = the intersymbol-interference model with cfg.isi_taps taps.
MIEstimate mi_lower_bound_discrete(const DiscreteConfig& cfg, const ChannelParams& params,
                                   const MonteCarloSpec& mc);

/// Exact I(R; C) in bits on an enumerable instance.
double exact_mutual_information(const ExactDiscreteLaw& exact);

/// Exact value of the bound that `approx` yields (expectation under the true law), in bits.
double exact_lower_bound(const ExactDiscreteLaw& exact, const DiscreteLaw& approx);

/// exact MI - exact bound, i.e. the expected KL divergence between the true and
/// approximate posteriors over releases. Non-negative up to rounding.
double kl_gap_diagnostic(const ExactDiscreteLaw& exact, const DiscreteLaw& approx);

}  // namespace molcomm
