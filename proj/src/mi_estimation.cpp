#include "molcomm/mi_estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "molcomm/continuous_channel.hpp"
#include "molcomm/errors.hpp"

namespace molcomm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Moments {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
    }

    void merge(const Moments& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.count) / n;
        m2 += o.m2 + delta * delta * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }
};

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_horizon(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw std::domain_error("mutual information: horizon T must be > 0");
}

}  // namespace

MIEstimate estimate_mean_bits(const MonteCarloSpec& mc, const std::function<double(Rng&)>& draw) {
    if (mc.n_samples < 1) throw std::invalid_argument("Monte Carlo: need at least one sample");
    std::array<Moments, kMonteCarloSlots> slots{};
    auto run_slot = [&](std::size_t slot) {
        const std::size_t share =
            mc.n_samples / kMonteCarloSlots + (slot < mc.n_samples % kMonteCarloSlots ? 1 : 0);
        Rng rng = make_substream(mc.seed, slot);
        for (std::size_t i = 0; i < share; ++i) slots[slot].add(draw(rng));
    };

    const unsigned workers = std::clamp<unsigned>(mc.threads, 1, kMonteCarloSlots);
    if (workers == 1) {
        for (std::size_t s = 0; s < kMonteCarloSlots; ++s) run_slot(s);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t s = w; s < kMonteCarloSlots; s += workers) run_slot(s);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    Moments total;
    for (const auto& m : slots) total.merge(m);
    const double to_bits = 1.0 / std::numbers::ln2;
    MIEstimate est;
    est.n_samples = total.count;
    est.seed = mc.seed;
    est.value = total.mean * to_bits;
    const double var = total.count > 1 ? total.m2 / static_cast<double>(total.count - 1) : 0.0;
    est.std_error = std::sqrt(var / static_cast<double>(total.count)) * to_bits;
    if (!std::isfinite(est.value)) throw NumericError("Monte Carlo: non-finite mean log-ratio");
    return est;
}

double lost_probability(double T, const ChannelParams& params, const QuadratureSpec& quad) {
    require_horizon(T);
    double error = 0.0;
    double l1 = 0.0;
    auto surv = [&](double s) { return survival(s, params); };
    const double integral = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        surv, 0.0, T, quad.max_depth, quad.rel_tol, &error, &l1);
    if (!(error <= quad.rel_tol * std::abs(integral) + 1e-300) || !std::isfinite(integral)) {
        std::ostringstream msg;
        msg << "lost_probability: quadrature did not converge on [0, " << T << "]: estimate "
            << integral << ", error " << error << ", requested rel_tol " << quad.rel_tol
            << ", max_depth " << quad.max_depth;
        throw NumericError(msg.str());
    }
    return integral / T;
}

MIEstimate mi_single_particle(double T, const ChannelParams& params, const QuadratureSpec& quad,
                              const MonteCarloSpec& mc) {
    require_horizon(T);
    params.validate();
    const double log_lost = std::log(lost_probability(T, params, quad));
    const double log_T = std::log(T);
    return estimate_mean_bits(mc, [&](Rng& rng) {
        const double x = std::uniform_real_distribution<double>(0.0, T)(rng);
        const double t = sample(params, rng);
        const double y = x + t;
        if (y <= T) return log_pdf(t, params) - (std::log(cdf(y, params)) - log_T);
        return std::log(survival(T - x, params)) - log_lost;
    });
}

MIEstimate mi_pair(double T, const ChannelParams& params, const QuadratureSpec& quad,
                   const MonteCarloSpec& mc) {
    require_horizon(T);
    params.validate();
    const double log_lost = std::log(lost_probability(T, params, quad));
    const double log_T = std::log(T);
    auto est = estimate_mean_bits(mc, [&](Rng& rng) {
        std::uniform_real_distribution<double> uniform(0.0, T);
        const double x1 = uniform(rng);
        const double x2 = uniform(rng);
        const double u1 = x1 + sample(params, rng);
        const double u2 = x2 + sample(params, rng);
        const bool in1 = u1 <= T;
        const bool in2 = u2 <= T;
        if (in1 && in2) {
            const double y1 = std::min(u1, u2);
            const double y2 = std::max(u1, u2);
            const double cond = log_add(log_pdf(y1 - x1, params) + log_pdf(y2 - x2, params),
                                        log_pdf(y2 - x1, params) + log_pdf(y1 - x2, params));
            const double marg = std::numbers::ln2 + std::log(cdf(y1, params)) +
                                std::log(cdf(y2, params)) - 2.0 * log_T;
            return cond - marg;
        }
        if (in1 || in2) {
            const double y = in1 ? u1 : u2;
            const double cond =
                log_add(log_pdf(y - x1, params) + std::log(survival(T - x2, params)),
                        log_pdf(y - x2, params) + std::log(survival(T - x1, params)));
            const double marg = std::numbers::ln2 + std::log(cdf(y, params)) + log_lost - log_T;
            return cond - marg;
        }
        return std::log(survival(T - x1, params)) + std::log(survival(T - x2, params)) -
               2.0 * log_lost;
    });
    est.value /= 2.0;
    est.std_error /= 2.0;
    return est;
}

ExactDiscreteLaw::ExactDiscreteLaw(const DiscreteConfig& cfg, const ChannelParams& params)
    : cfg_(cfg) {
    cfg.validate();
    const std::size_t L = cfg.num_intervals;
    if (L > kMaxIntervals)
        throw SizeError("ExactDiscreteLaw: " + std::to_string(L) + " intervals exceed the cap of " +
                        std::to_string(kMaxIntervals));
    std::vector<double> p_arr(L);
    for (std::size_t k = 1; k <= L; ++k)
        p_arr[k - 1] = arrival_prob_interval(static_cast<int>(k), cfg.tau, params);

    const std::size_t sequences = std::size_t{1} << L;
    conditional_.resize(sequences);
    for (std::size_t code = 0; code < sequences; ++code) {
        std::map<std::vector<int>, double> dist{{std::vector<int>(L, 0), 1.0}};
        for (std::size_t i = 0; i < L; ++i) {
            if (((code >> i) & 1U) == 0) continue;
            const std::size_t reach = L - i;  // intervals i .. L-1
            const double dropped = survival(static_cast<double>(reach) * cfg.tau, params);
            std::map<std::vector<int>, double> next;
            for (const auto& [counts, prob] : dist) {
                if (dropped > 0.0) next[counts] += prob * dropped;
                for (std::size_t k = 1; k <= reach; ++k) {
                    auto landed = counts;
                    ++landed[i + k - 1];
                    next[landed] += prob * p_arr[k - 1];
                }
            }
            dist.swap(next);
        }
        const double pr = release_probability(code);
        for (const auto& [counts, prob] : dist) marginal_[counts] += pr * prob;
        conditional_[code] = std::move(dist);
    }
}

std::vector<int> ExactDiscreteLaw::release_sequence(std::size_t code) const {
    std::vector<int> r(cfg_.num_intervals);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = static_cast<int>((code >> i) & 1U);
    return r;
}

double ExactDiscreteLaw::release_probability(std::size_t code) const {
    const double p = cfg_.release_prob;
    double pr = 1.0;
    for (std::size_t i = 0; i < cfg_.num_intervals; ++i) pr *= ((code >> i) & 1U) ? p : 1.0 - p;
    return pr;
}

double ExactDiscreteLaw::log_conditional(std::span<const int> c, std::span<const int> r) const {
    if (c.size() != cfg_.num_intervals || r.size() != cfg_.num_intervals)
        throw ContractViolation("ExactDiscreteLaw: trace length differs from the configured horizon");
    std::size_t code = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] < 0 || r[i] > 1) throw ContractViolation("ExactDiscreteLaw: release bits must be 0 or 1");
        code |= static_cast<std::size_t>(r[i]) << i;
    }
    const auto& dist = conditional_[code];
    const auto it = dist.find(std::vector<int>(c.begin(), c.end()));
    return it == dist.end() ? kNegInf : std::log(it->second);
}

double ExactDiscreteLaw::log_marginal(std::span<const int> c) const {
    if (c.size() != cfg_.num_intervals)
        throw ContractViolation("ExactDiscreteLaw: trace length differs from the configured horizon");
    const auto it = marginal_.find(std::vector<int>(c.begin(), c.end()));
    return it == marginal_.end() ? kNegInf : std::log(it->second);
}

MIEstimate mi_lower_bound_discrete(const DiscreteConfig& cfg, const ChannelParams& params,
                                   const DiscreteLaw& law, const MonteCarloSpec& mc) {
    cfg.validate();
    params.validate();
    return estimate_mean_bits(mc, [&](Rng& rng) {
        const auto r = draw_releases(cfg, rng);
        const auto c = simulate_discrete(r, cfg, params, rng);
        return law.log_conditional(c, r) - law.log_marginal(c);
    });
}

MIEstimate mi_lower_bound_discrete(const DiscreteConfig& cfg, const ChannelParams& params,
                                   const MonteCarloSpec& mc) {
    const IsiLaw law(cfg, build_approx_model(cfg, params));
    return mi_lower_bound_discrete(cfg, params, law, mc);
}

namespace {

// sum_r Pr(r) sum_c f(c|r) [log g(c|r) - log g(c)] in bits, under the exact f.
double expected_log_ratio(const ExactDiscreteLaw& exact, const DiscreteLaw& g) {
    double total = 0.0;
    for (std::size_t code = 0; code < exact.num_release_sequences(); ++code) {
        const double pr = exact.release_probability(code);
        if (pr == 0.0) continue;
        const auto r = exact.release_sequence(code);
        for (const auto& [c, prob] : exact.conditional(code)) {
            if (prob == 0.0) continue;
            total += pr * prob * (g.log_conditional(c, r) - g.log_marginal(c));
        }
    }
    return total / std::numbers::ln2;
}

}  // namespace

double exact_mutual_information(const ExactDiscreteLaw& exact) {
    return expected_log_ratio(exact, exact);
}

double exact_lower_bound(const ExactDiscreteLaw& exact, const DiscreteLaw& approx) {
    return expected_log_ratio(exact, approx);
}

double kl_gap_diagnostic(const ExactDiscreteLaw& exact, const DiscreteLaw& approx) {
    return exact_mutual_information(exact) - exact_lower_bound(exact, approx);
}

}  // namespace molcomm
