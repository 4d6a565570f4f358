#include "molcomm/discrete_channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "molcomm/errors.hpp"

namespace molcomm {

namespace {

double poisson_pmf(int m, double lambda) {
    if (m < 0) return 0.0;
    if (lambda == 0.0) return m == 0 ? 1.0 : 0.0;
    return std::exp(-lambda + m * std::log(lambda) - std::lgamma(m + 1.0));
}

void check_count(int c) {
    if (c < 0) throw std::domain_error("likelihood: negative count " + std::to_string(c));
    if (c > kMaxCount)
        throw NumericError("likelihood: count " + std::to_string(c) + " exceeds cap " +
                           std::to_string(kMaxCount));
}

// Pr(c | active taps), where bit j of `active` marks a release j intervals back.
double window_prob(int c, std::uint64_t active, const ApproxModel& model) {
    // Distribution of the number of tracked arrivals: convolution of Bernoullis.
    const std::size_t n = model.taps();
    std::vector<double> dist(n + 1, 0.0);
    dist[0] = 1.0;
    std::size_t top = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (((active >> j) & 1U) == 0) continue;
        const double q = model.p_table[j];
        ++top;
        for (std::size_t k = top; k > 0; --k) dist[k] = dist[k] * (1.0 - q) + dist[k - 1] * q;
        dist[0] *= 1.0 - q;
    }
    double total = 0.0;
    const std::size_t kmax = std::min<std::size_t>(top, static_cast<std::size_t>(c));
    for (std::size_t k = 0; k <= kmax; ++k)
        total += dist[k] * poisson_pmf(c - static_cast<int>(k), model.lambda);
    return total;
}

// window_prob for every (count, tap state), filled lazily per count.
class EmissionTable {
  public:
    explicit EmissionTable(const ApproxModel& model)
        : model_(model), states_(std::size_t{1} << model.taps()), rows_(kMaxCount + 1) {}

    const std::vector<double>& row(int count) {
        check_count(count);
        auto& r = rows_[static_cast<std::size_t>(count)];
        if (r.empty()) {
            r.resize(states_);
            for (std::size_t s = 0; s < states_; ++s) r[s] = window_prob(count, s, model_);
        }
        return r;
    }

  private:
    const ApproxModel& model_;
    std::size_t states_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace

void DiscreteConfig::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("DiscreteConfig: tau must be > 0");
    if (num_intervals < 1) throw std::invalid_argument("DiscreteConfig: need at least one interval");
    if (!(release_prob >= 0.0 && release_prob <= 1.0))
        throw std::invalid_argument("DiscreteConfig: release_prob must lie in [0, 1]");
    if (isi_taps < 1) throw std::invalid_argument("DiscreteConfig: isi_taps must be >= 1");
}

std::vector<int> draw_releases(const DiscreteConfig& cfg, Rng& rng) {
    std::bernoulli_distribution bit(cfg.release_prob);
    std::vector<int> r(cfg.num_intervals);
    for (int& ri : r) ri = bit(rng) ? 1 : 0;
    return r;
}

std::vector<int> credit_arrivals(std::span<const int> r, std::span<const double> times,
                                 const DiscreteConfig& cfg) {
    std::vector<int> c(r.size(), 0);
    std::size_t next = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < 0 || r[i] > 1) throw ContractViolation("credit_arrivals: release bits must be 0 or 1");
        if (r[i] == 0) continue;
        if (next >= times.size()) throw ContractViolation("credit_arrivals: too few transmission times");
        const double t = times[next++];
        const double lag = std::ceil(t / cfg.tau);  // >= 1 since t > 0
        if (lag - 1.0 < static_cast<double>(r.size() - i)) {
            const auto offset = static_cast<std::size_t>(lag) - 1;
            ++c[i + offset];
        }
    }
    if (next != times.size()) throw ContractViolation("credit_arrivals: too many transmission times");
    return c;
}

std::vector<int> simulate_discrete(std::span<const int> r, const DiscreteConfig& cfg,
                                   const ChannelParams& params, Rng& rng) {
    std::vector<double> times;
    for (int ri : r)
        if (ri == 1) times.push_back(sample(params, rng));
    return credit_arrivals(r, times, cfg);
}

ApproxModel build_approx_model(const DiscreteConfig& cfg, const ChannelParams& params) {
    cfg.validate();
    ApproxModel model;
    model.p_table.resize(cfg.isi_taps);
    for (std::size_t k = 1; k <= cfg.isi_taps; ++k)
        model.p_table[k - 1] = arrival_prob_interval(static_cast<int>(k), cfg.tau, params);
    // 1 - sum p_arr^(k) telescopes to the survival at N tau.
    const double untracked = survival(static_cast<double>(cfg.isi_taps) * cfg.tau, params);
    model.lambda = cfg.release_prob * untracked;
    return model;
}

double likelihood_window(int c, std::span<const int> recent_r, const ApproxModel& model) {
    check_count(c);
    if (recent_r.size() != model.taps())
        throw ContractViolation("likelihood_window: window length must equal the tap count");
    std::uint64_t active = 0;
    for (std::size_t j = 0; j < recent_r.size(); ++j) {
        if (recent_r[j] < 0 || recent_r[j] > 1)
            throw ContractViolation("likelihood_window: release bits must be 0 or 1");
        if (recent_r[j] == 1) active |= std::uint64_t{1} << j;
    }
    return window_prob(c, active, model);
}

double sequence_likelihood(std::span<const int> c, std::span<const int> r,
                           const ApproxModel& model) {
    if (c.size() != r.size()) throw ContractViolation("sequence_likelihood: |c| != |r|");
    const std::size_t n = model.taps();
    if (n > kMaxForwardTaps)
        throw SizeError("sequence_likelihood: " + std::to_string(n) + " taps exceed the cap of " +
                        std::to_string(kMaxForwardTaps));
    EmissionTable emissions(model);
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    std::uint64_t state = 0;  // bit j = release j intervals back; zero before the first interval
    double total = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (r[i] < 0 || r[i] > 1) throw ContractViolation("sequence_likelihood: release bits must be 0 or 1");
        state = ((state << 1) | static_cast<std::uint64_t>(r[i])) & mask;
        total += std::log(emissions.row(c[i])[state]);
    }
    return total;
}

double marginal_likelihood(std::span<const int> c, const DiscreteConfig& cfg,
                           const ApproxModel& model) {
    cfg.validate();
    const std::size_t n = model.taps();
    if (n > kMaxForwardTaps)
        throw SizeError("marginal_likelihood: " + std::to_string(n) + " taps exceed the cap of " +
                        std::to_string(kMaxForwardTaps));
    const std::size_t states = std::size_t{1} << n;
    const std::uint64_t mask = states - 1;
    const double p = cfg.release_prob;

    EmissionTable emissions(model);

    // alpha[s]: scaled Pr(c_1..c_i, state_i = s); state bit j = release j intervals back.
    std::vector<double> alpha(states, 0.0), next(states, 0.0);
    alpha[0] = 1.0;  // empty channel before the first interval
    double log_total = 0.0;
    for (int count : c) {
        const auto& e = emissions.row(count);
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s) {
            if (alpha[s] == 0.0) continue;
            const std::uint64_t shifted = (s << 1) & mask;
            next[shifted] += alpha[s] * (1.0 - p);
            next[shifted | 1U] += alpha[s] * p;
        }
        double norm = 0.0;
        for (std::size_t s = 0; s < states; ++s) {
            next[s] *= e[s];
            norm += next[s];
        }
        if (!(norm > 0.0)) return -std::numeric_limits<double>::infinity();
        for (double& v : next) v /= norm;
        log_total += std::log(norm);
        alpha.swap(next);
    }
    return log_total;
}

}  // namespace molcomm
