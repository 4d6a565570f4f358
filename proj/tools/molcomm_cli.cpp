// Command-line front end for the Brownian-motion timing channel experiments.
//
// Exit codes: 0 success, 1 usage error, 2 numeric or assertion failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "molcomm/experiments.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kNumericFailure = 2;

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Brownian-motion molecular timing channel: samplers, likelihood checks and "
        "mutual-information sweeps.\n"
        "The hitting-time density is d/sqrt(2 pi sigma2 t^3) exp(-d^2/(2 sigma2 t)); the "
        "exponent uses t, not t^2 (the t^2 form does not integrate to one).\n"
        "example3 runs `intervals` intervals per trace and discards arrivals after the last one."};
    app.require_subcommand(1);

    std::string config_path;
    std::uint64_t seed = 1;
    std::size_t samples = 0;
    std::string out;
    std::string grid_T, grid_tau, grid_p;
    double max_rate = 5.0;
    std::size_t isi_taps = 2;
    std::size_t intervals = 1000;
    unsigned threads = 1;
    double d = 1.0, sigma2 = 1.0;
    bool perturb = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--seed", seed, "64-bit seed");
        sub->add_option("--samples", samples, "Monte-Carlo samples / traces / instances (>= 100)");
        sub->add_option("--out", out, "output path (default stdout)");
        sub->add_option("--grid-T", grid_T, "comma-separated T grid (example2)");
        sub->add_option("--grid-tau", grid_tau, "comma-separated tau grid (example3)");
        sub->add_option("--grid-p", grid_p, "comma-separated release-probability grid (example3)");
        sub->add_option("--max-rate", max_rate, "release-rate cap in particles per second (default 5)");
        sub->add_option("--isi-taps", isi_taps, "tracked ISI taps N (default 2)");
        sub->add_option("--intervals", intervals, "intervals per trace (default 1000)");
        sub->add_option("--threads", threads, "worker threads; results do not depend on it");
        sub->add_option("--d", d, "transmitter-receiver distance (default 1)");
        sub->add_option("--sigma2", sigma2, "Wiener variance parameter (default 1)");
    };

    auto* sample_check = app.add_subcommand("sample-check", "KS test of the hitting-time sampler");
    auto* density_check = app.add_subcommand(
        "density-check", "pair density vs permanent density, Ryser vs enumeration");
    auto* example2 = app.add_subcommand("example2", "labeled / pair-labeled MI sweep over T");
    auto* example3 = app.add_subcommand("example3", "rate-limited discrete lower-bound sweep over (tau, p)");
    auto* show_config = app.add_subcommand("show-config", "print the effective configuration");
    for (auto* sub : {sample_check, density_check, example2, example3, show_config}) add_common(sub);
    density_check->add_flag("--perturb", perturb, "negative control: perturb the permanent density");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }

    CLI::App* sub = app.get_subcommands().front();
    molcomm::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) cfg = molcomm::load_config_file(config_path);
        auto given = [&](const char* name) { return sub->count(name) > 0; };
        if (given("--seed")) cfg.seed = seed;
        if (given("--samples")) cfg.n_samples = samples;
        if (given("--out")) cfg.out = out;
        if (given("--grid-T")) cfg.grid_T = molcomm::parse_grid(grid_T);
        if (given("--grid-tau")) cfg.grid_tau = molcomm::parse_grid(grid_tau);
        if (given("--grid-p")) cfg.grid_p = molcomm::parse_grid(grid_p);
        if (given("--max-rate")) cfg.max_release_rate = max_rate;
        if (given("--isi-taps")) cfg.isi_taps = isi_taps;
        if (given("--intervals")) cfg.num_intervals = intervals;
        if (given("--threads")) cfg.threads = threads;
        if (given("--d")) cfg.params.d = d;
        if (given("--sigma2")) cfg.params.sigma2 = sigma2;
        cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        if (sub == show_config) {
            write_output(cfg.out, molcomm::format_config(cfg));
            return 0;
        }
        if (sub == sample_check) {
            const auto r = molcomm::run_sample_check(cfg);
            std::printf("n = %zu\nks_statistic = %.6g\ncritical_value_1pct = %.6g\n"
                        "empirical_median = %.6g\nanalytic_median = %.6g\n%s\n",
                        r.n, r.ks_statistic, r.critical_value, r.empirical_median,
                        r.analytic_median, r.pass ? "PASS" : "FAIL");
            return r.pass ? 0 : kNumericFailure;
        }
        if (sub == density_check) {
            const auto r = molcomm::run_density_check(cfg, perturb);
            std::printf("instances = %zu\nmax_rel_error_pair = %.3g\nmax_rel_error_permanent = %.3g\n",
                        r.instances, r.max_rel_error_pair, r.max_rel_error_permanent);
            if (!r.pass) {
                std::printf("FAIL\n%s\n", r.failure.c_str());
                return kNumericFailure;
            }
            std::printf("PASS\n");
            return 0;
        }
        if (sub == example2) {
            write_output(cfg.out, molcomm::example2_csv(molcomm::run_example2(cfg)));
            return 0;
        }
        if (sub == example3) {
            const auto result = molcomm::run_example3(cfg);
            write_output(cfg.out, molcomm::example3_csv(result.rows));
            const std::string log = molcomm::rejected_log(result.rejected);
            if (cfg.out.empty() || cfg.out == "-")
                std::cerr << "rejected grid points:\n" << log;
            else
                write_output(cfg.out + ".rejected.csv", log);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericFailure;
    }
    return kUsageError;
}
