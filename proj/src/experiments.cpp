#include "molcomm/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "molcomm/continuous_channel.hpp"
#include "molcomm/discrete_channel.hpp"
#include "molcomm/errors.hpp"
#include "molcomm/mi_estimation.hpp"
#include "molcomm/permanent.hpp"
#include "molcomm/random.hpp"

namespace molcomm {

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw std::invalid_argument("not a number: '" + t + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text) {
    const std::string t = trim(text);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw std::invalid_argument("not an unsigned integer: '" + t + "'");
    return v;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += fmt_double(values[i]);
    }
    return out;
}

// Seed for one (experiment stream, grid point) pair; rows still report cfg.seed.
std::uint64_t point_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
    Rng rng = make_substream(seed, (stream << 32) | index);
    return rng();
}

void require_nonempty(const std::vector<double>& grid, const char* name) {
    if (grid.empty()) throw std::invalid_argument(std::string("config: ") + name + " grid is empty");
}

}  // namespace

std::size_t default_samples(Experiment e) {
    switch (e) {
        case Experiment::SampleCheck: return 100000;
        case Experiment::DensityCheck: return 1000;
        case Experiment::Example2: return 4000;
        case Experiment::Example3: return 2000;
    }
    return 1000;
}

void ExperimentConfig::validate() const {
    params.validate();
    require_nonempty(grid_T, "T");
    require_nonempty(grid_tau, "tau");
    require_nonempty(grid_p, "p");
    for (double T : grid_T)
        if (!(T > 0.0)) throw std::invalid_argument("config: T grid values must be > 0");
    for (double tau : grid_tau)
        if (!(tau > 0.0)) throw std::invalid_argument("config: tau grid values must be > 0");
    for (double p : grid_p)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("config: p grid values must lie in [0, 1]");
    if (n_samples && *n_samples < 100) throw std::invalid_argument("config: samples must be >= 100");
    if (!(max_release_rate > 0.0)) throw std::invalid_argument("config: max_rate must be > 0");
    if (isi_taps < 1 || isi_taps > kMaxForwardTaps)
        throw std::invalid_argument("config: isi_taps must lie in [1, 20]");
    if (num_intervals < 1) throw std::invalid_argument("config: intervals must be >= 1");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
}

std::size_t ExperimentConfig::samples_for(Experiment e) const {
    return n_samples.value_or(default_samples(e));
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(parse_double(item));
    if (grid.empty()) throw std::invalid_argument("empty grid");
    return grid;
}

void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "seed") cfg.seed = parse_u64(value);
            else if (key == "samples") cfg.n_samples = parse_u64(value);
            else if (key == "out") cfg.out = value;
            else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_u64(value));
            else if (key == "d") cfg.params.d = parse_double(value);
            else if (key == "sigma2") cfg.params.sigma2 = parse_double(value);
            else if (key == "grid-T") cfg.grid_T = parse_grid(value);
            else if (key == "grid-tau") cfg.grid_tau = parse_grid(value);
            else if (key == "grid-p") cfg.grid_p = parse_grid(value);
            else if (key == "max-rate") cfg.max_release_rate = parse_double(value);
            else if (key == "isi-taps") cfg.isi_taps = parse_u64(value);
            else if (key == "intervals") cfg.num_intervals = parse_u64(value);
            else throw std::invalid_argument("unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg;
    apply_config_text(cfg, buf.str());
    return cfg;
}

std::string format_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "seed = " << cfg.seed << '\n';
    if (cfg.n_samples) {
        out << "samples = " << *cfg.n_samples << '\n';
    } else {
        out << "# samples unset; per-experiment defaults: sample-check "
            << default_samples(Experiment::SampleCheck) << ", density-check "
            << default_samples(Experiment::DensityCheck) << ", example2 "
            << default_samples(Experiment::Example2) << ", example3 "
            << default_samples(Experiment::Example3) << '\n';
    }
    if (!cfg.out.empty()) out << "out = " << cfg.out << '\n';
    out << "threads = " << cfg.threads << '\n';
    out << "d = " << fmt_double(cfg.params.d) << '\n';
    out << "sigma2 = " << fmt_double(cfg.params.sigma2) << '\n';
    out << "grid-T = " << join(cfg.grid_T) << '\n';
    out << "grid-tau = " << join(cfg.grid_tau) << '\n';
    out << "grid-p = " << join(cfg.grid_p) << '\n';
    out << "max-rate = " << fmt_double(cfg.max_release_rate) << '\n';
    out << "isi-taps = " << cfg.isi_taps << '\n';
    out << "intervals = " << cfg.num_intervals << '\n';
    return out.str();
}

std::vector<Example2Row> run_example2(const ExperimentConfig& cfg) {
    cfg.validate();
    ChannelParams params = cfg.params;
    params.deadline.reset();
    const std::size_t n = cfg.samples_for(Experiment::Example2);
    std::vector<Example2Row> rows;
    for (std::size_t i = 0; i < cfg.grid_T.size(); ++i) {
        const double T = cfg.grid_T[i];
        try {
            const auto single = mi_single_particle(T, params, {}, {n, point_seed(cfg.seed, 1, i), cfg.threads});
            const auto pair = mi_pair(T, params, {}, {n, point_seed(cfg.seed, 2, i), cfg.threads});
            Example2Row row;
            row.T = T;
            row.bits_per_particle_j1 = single.value;
            row.bits_per_particle_per_second_j1 = single.value / T;
            row.bits_per_particle_j2 = pair.value;
            row.bits_per_particle_per_second_j2 = pair.value / T;
            row.std_error_j1 = single.std_error;
            row.std_error_j2 = pair.std_error;
            row.seed = cfg.seed;
            row.n_samples = n;
            rows.push_back(row);
        } catch (const std::exception& e) {
            throw NumericError("example2 at T = " + fmt_double(T) + ": " + e.what());
        }
    }
    return rows;
}

bool admits_rate(double tau, double p, double max_rate) {
    return p / tau <= max_rate * (1.0 + 1e-9);
}

Example3Result run_example3(const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.samples_for(Experiment::Example3);
    Example3Result result;
    std::uint64_t index = 0;
    for (double tau : cfg.grid_tau) {
        for (double p : cfg.grid_p) {
            const std::uint64_t point = index++;
            if (!admits_rate(tau, p, cfg.max_release_rate)) {
                result.rejected.push_back(
                    {tau, p, "p/tau = " + fmt_double(p / tau) + " exceeds max-rate " +
                                 fmt_double(cfg.max_release_rate)});
                continue;
            }
            try {
                DiscreteConfig dc;
                dc.tau = tau;
                dc.release_prob = p;
                dc.num_intervals = cfg.num_intervals;
                dc.isi_taps = cfg.isi_taps;
                Example3Row row;
                row.tau = tau;
                row.p = p;
                row.seed = cfg.seed;
                row.n_samples = n;
                if (p > 0.0) {
                    const auto bound = mi_lower_bound_discrete(
                        dc, cfg.params, {n, point_seed(cfg.seed, 3, point), cfg.threads});
                    const double seconds = static_cast<double>(dc.num_intervals) * tau;
                    const double particles = p * static_cast<double>(dc.num_intervals);
                    row.bits_per_second = bound.value / seconds;
                    row.std_error_bits_per_second = bound.std_error / seconds;
                    row.bits_per_particle = bound.value / particles;
                    row.std_error_bits_per_particle = bound.std_error / particles;
                }
                result.rows.push_back(row);
            } catch (const std::exception& e) {
                throw NumericError("example3 at tau = " + fmt_double(tau) + ", p = " + fmt_double(p) +
                                   ": " + e.what());
            }
        }
    }
    return result;
}

std::string example2_csv(const std::vector<Example2Row>& rows) {
    std::string out =
        "T,bits_per_particle_j1,bits_per_particle_per_second_j1,bits_per_particle_j2,"
        "bits_per_particle_per_second_j2,std_error_j1,std_error_j2,seed,n_samples\n";
    for (const auto& r : rows) {
        out += fmt_double(r.T) + ',' + fmt_double(r.bits_per_particle_j1) + ',' +
               fmt_double(r.bits_per_particle_per_second_j1) + ',' +
               fmt_double(r.bits_per_particle_j2) + ',' +
               fmt_double(r.bits_per_particle_per_second_j2) + ',' + fmt_double(r.std_error_j1) +
               ',' + fmt_double(r.std_error_j2) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.n_samples) + '\n';
    }
    return out;
}

std::string example3_csv(const std::vector<Example3Row>& rows) {
    std::string out =
        "tau,p,bits_per_second,bits_per_particle,std_error_bits_per_second,"
        "std_error_bits_per_particle,seed,n_samples\n";
    for (const auto& r : rows) {
        out += fmt_double(r.tau) + ',' + fmt_double(r.p) + ',' + fmt_double(r.bits_per_second) +
               ',' + fmt_double(r.bits_per_particle) + ',' +
               fmt_double(r.std_error_bits_per_second) + ',' +
               fmt_double(r.std_error_bits_per_particle) + ',' + std::to_string(r.seed) + ',' +
               std::to_string(r.n_samples) + '\n';
    }
    return out;
}

std::string rejected_log(const std::vector<RejectedPoint>& rejected) {
    std::string out = "tau,p,reason\n";
    for (const auto& r : rejected) out += fmt_double(r.tau) + ',' + fmt_double(r.p) + ',' + r.reason + '\n';
    return out;
}

double ks_critical_value_1pct(std::size_t n) {
    const double rn = std::sqrt(static_cast<double>(n));
    return 1.6276 / (rn + 0.12 + 0.11 / rn);
}

double ks_statistic(std::vector<double>& samples, const ChannelParams& params) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i], params);
        stat = std::max({stat, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return stat;
}

SampleCheckReport run_sample_check(const ExperimentConfig& cfg) {
    cfg.validate();
    SampleCheckReport report;
    report.n = cfg.samples_for(Experiment::SampleCheck);
    Rng rng = make_substream(cfg.seed, 0);
    std::vector<double> samples(report.n);
    for (double& s : samples) s = sample(cfg.params, rng);
    report.ks_statistic = ks_statistic(samples, cfg.params);
    report.critical_value = ks_critical_value_1pct(report.n);
    const std::size_t mid = report.n / 2;
    report.empirical_median =
        report.n % 2 == 1 ? samples[mid] : 0.5 * (samples[mid - 1] + samples[mid]);
    // cdf(t) = 1/2  <=>  d / sqrt(2 sigma^2 t) = erfc^{-1}(1/2) = 0.4769362762044699
    const double z = 0.4769362762044699;
    report.analytic_median = cfg.params.d * cfg.params.d / (2.0 * cfg.params.sigma2 * z * z);
    report.pass = report.ks_statistic < report.critical_value;
    return report;
}

DensityCheckReport run_density_check(const ExperimentConfig& cfg, bool perturb) {
    cfg.validate();
    DensityCheckReport report;
    report.instances = cfg.samples_for(Experiment::DensityCheck);
    Rng rng = make_substream(cfg.seed, 7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ChannelParams params = cfg.params;
    params.deadline.reset();

    auto rel_err = [](double a, double b) {
        const double scale = std::max(std::abs(a), std::abs(b));
        return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
    };
    auto fail = [&](const std::string& what) {
        if (report.failure.empty()) report.failure = what;
    };

    for (std::size_t k = 0; k < report.instances; ++k) {
        // Pair: releases on [0, 5], arrivals drawn from the channel.
        ReleaseSchedule x{{5.0 * unit(rng), 5.0 * unit(rng)}};
        const auto obs = simulate(x, params, LabelingScheme{2}, rng);
        const std::array<double, 2> y{obs.y[0], obs.y[1]};
        const std::array<double, 2> xs{x.x[0], x.x[1]};
        const double direct = pair_density(y, xs, params);
        double via_permanent = indistinguishable_density(y, x, params);
        if (perturb) via_permanent *= 1.0 + 1e-6;
        const double e = rel_err(direct, via_permanent);
        report.max_rel_error_pair = std::max(report.max_rel_error_pair, e);
        if (!(e < kDensityCheckTolerance)) {
            std::ostringstream dump;
            dump.precision(17);
            dump << "pair instance " << k << ": x = [" << xs[0] << ", " << xs[1] << "], y = [" << y[0]
                 << ", " << y[1] << "], pair_density = " << direct
                 << ", permanent density = " << via_permanent << ", rel error = " << e;
            fail(dump.str());
        }

        // Permanent: random non-negative matrices of order 1..8.
        const std::size_t order = 1 + k % 8;
        SquareMatrix m(order);
        for (std::size_t i = 0; i < order; ++i)
            for (std::size_t j = 0; j < order; ++j) m(i, j) = unit(rng);
        const double ryser = permanent(m);
        const double brute = permanent_by_enumeration(m);
        const double pe = rel_err(ryser, brute);
        report.max_rel_error_permanent = std::max(report.max_rel_error_permanent, pe);
        if (!(pe < kDensityCheckTolerance)) {
            std::ostringstream dump;
            dump.precision(17);
            dump << "permanent instance " << k << ": order " << order << ", ryser = " << ryser
                 << ", enumeration = " << brute << ", rel error = " << pe;
            fail(dump.str());
        }
    }
    report.pass = report.failure.empty();
    return report;
}

}  // namespace molcomm
