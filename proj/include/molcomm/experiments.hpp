#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "molcomm/hitting_time.hpp"

namespace molcomm {

enum class Experiment { SampleCheck, DensityCheck, Example2, Example3 };

/// Everything a CLI run depends on. Loaded from a flat `key = value` file and
/// then overridden by command-line flags.
struct ExperimentConfig {
    ChannelParams params;
    std::vector<double> grid_T{0.25, 0.5, 1, 2, 4, 8, 16, 32, 64};
    std::vector<double> grid_tau{0.1, 0.2, 0.5, 1, 2, 5};
    std::vector<double> grid_p{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5,
                               0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95};
    /// Unset means the per-experiment default from default_samples().
    std::optional<std::size_t> n_samples;
    std::uint64_t seed = 1;
    std::string out;
    unsigned threads = 1;
    double max_release_rate = 5.0;  ///< particles per second
    std::size_t isi_taps = 2;
    std::size_t num_intervals = 1000;

    void validate() const;
    std::size_t samples_for(Experiment e) const;
};

std::size_t default_samples(Experiment e);

/// Parses `key = value` lines (`#` starts a comment). Unknown keys and bad
/// values throw std::invalid_argument naming the line.
void apply_config_text(ExperimentConfig& cfg, const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Config in the same `key = value` form that apply_config_text reads.
std::string format_config(const ExperimentConfig& cfg);

/// Comma-separated list of doubles, e.g. "0.5,1,2".
std::vector<double> parse_grid(const std::string& text);

struct Example2Row {
    double T = 0.0;
    double bits_per_particle_j1 = 0.0;
    double bits_per_particle_per_second_j1 = 0.0;
    double bits_per_particle_j2 = 0.0;
    double bits_per_particle_per_second_j2 = 0.0;
    double std_error_j1 = 0.0;  ///< of bits_per_particle_j1
    double std_error_j2 = 0.0;  ///< of bits_per_particle_j2
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
};

struct Example3Row {
    double tau = 0.0;
    double p = 0.0;
    double bits_per_second = 0.0;
    double bits_per_particle = 0.0;
    double std_error_bits_per_second = 0.0;
    double std_error_bits_per_particle = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_samples = 0;
};

struct RejectedPoint {
    double tau = 0.0;
    double p = 0.0;
    std::string reason;
};

struct Example3Result {
    std::vector<Example3Row> rows;
    std::vector<RejectedPoint> rejected;
};

/// Labeled (j = 1) and pair-labeled (j = 2) mutual information over grid_T.
std::vector<Example2Row> run_example2(const ExperimentConfig& cfg);

/// Discrete-model lower bound over the (tau, p) grid; points with p / tau above
/// the release-rate cap are listed in `rejected` rather than run.
Example3Result run_example3(const ExperimentConfig& cfg);

/// True when p / tau <= max_rate (with a 1e-9 relative slack for decimal grids).
bool admits_rate(double tau, double p, double max_rate);

std::string example2_csv(const std::vector<Example2Row>& rows);
std::string example3_csv(const std::vector<Example3Row>& rows);
std::string rejected_log(const std::vector<RejectedPoint>& rejected);

struct SampleCheckReport {
    std::size_t n = 0;
    double ks_statistic = 0.0;
    double critical_value = 0.0;  ///< two-sided, 1% level
    double empirical_median = 0.0;
    double analytic_median = 0.0;
    bool pass = false;
};

/// KS test of the hitting-time sampler against the analytic cdf.
SampleCheckReport run_sample_check(const ExperimentConfig& cfg);

/// Two-sided 1% critical value of the one-sample KS statistic (asymptotic
/// form with the Stephens small-sample correction).
double ks_critical_value_1pct(std::size_t n);

/// KS statistic of samples (sorted in place) against a continuous cdf.
double ks_statistic(std::vector<double>& samples, const ChannelParams& params);

struct DensityCheckReport {
    std::size_t instances = 0;
    double max_rel_error_pair = 0.0;       ///< pair vs permanent density, n = 2
    double max_rel_error_permanent = 0.0;  ///< Ryser vs enumeration, n <= 8
    bool pass = false;
    std::string failure;                   ///< first failing instance, if any
};

/// `perturb` scales the permanent-based density by (1 + 1e-6) as a negative control.
DensityCheckReport run_density_check(const ExperimentConfig& cfg, bool perturb = false);

inline constexpr double kDensityCheckTolerance = 1e-10;

}  // namespace molcomm
