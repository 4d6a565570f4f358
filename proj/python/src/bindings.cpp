#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <optional>

#include "molcomm/continuous_channel.hpp"
#include "molcomm/errors.hpp"
#include "molcomm/discrete_channel.hpp"
#include "molcomm/experiments.hpp"
#include "molcomm/mi_estimation.hpp"
#include "molcomm/permanent.hpp"

namespace py = pybind11;
using namespace molcomm;

namespace {

ChannelParams make_params(double d, double sigma2, std::optional<double> deadline) {
    ChannelParams p{d, sigma2, deadline};
    p.validate();
    return p;
}

MonteCarloSpec mc_spec(std::size_t n_samples, std::uint64_t seed, unsigned threads) {
    return MonteCarloSpec{n_samples, seed, threads};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Brownian-motion molecular timing channel";

    py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_ValueError);
    py::register_exception<SizeError>(m, "SizeError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

    py::class_<ChannelParams>(m, "ChannelParams")
        .def(py::init(&make_params), py::arg("d") = 1.0, py::arg("sigma2") = 1.0,
             py::arg("deadline") = py::none())
        .def_readwrite("d", &ChannelParams::d)
        .def_readwrite("sigma2", &ChannelParams::sigma2)
        .def_readwrite("deadline", &ChannelParams::deadline);

    py::class_<Rng>(m, "Rng")
        .def(py::init([](std::uint64_t seed) { return make_substream(seed, 0); }), py::arg("seed"));

    m.def("pdf", &pdf, py::arg("t"), py::arg("params") = ChannelParams{});
    m.def("cdf", &cdf, py::arg("t"), py::arg("params") = ChannelParams{});
    m.def("arrival_prob_interval", &arrival_prob_interval, py::arg("k"), py::arg("tau"),
          py::arg("params") = ChannelParams{});
    m.def("sample", [](const ChannelParams& p, Rng& rng) { return sample(p, rng); },
          py::arg("params"), py::arg("rng"));

    py::class_<ObservedArrivals>(m, "ObservedArrivals")
        .def_readonly("y", &ObservedArrivals::y)
        .def_readonly("b", &ObservedArrivals::b)
        .def_readonly("lost", &ObservedArrivals::lost);

    m.def("apply_labeling", [](std::size_t n, std::size_t period) {
        return apply_labeling(n, LabelingScheme{period});
    }, py::arg("n"), py::arg("period") = 1);
    m.def("observe", [](std::vector<double> x, std::vector<double> t, const ChannelParams& p,
                        std::size_t period) {
        return observe(ReleaseSchedule{std::move(x)}, t, p, LabelingScheme{period});
    }, py::arg("x"), py::arg("t"), py::arg("params"), py::arg("period") = 1);
    m.def("simulate", [](std::vector<double> x, const ChannelParams& p, Rng& rng, std::size_t period) {
        return simulate(ReleaseSchedule{std::move(x)}, p, LabelingScheme{period}, rng);
    }, py::arg("x"), py::arg("params"), py::arg("rng"), py::arg("period") = 1);
    m.def("invert_sort", [](std::vector<double> y, std::vector<int> b) { return invert_sort(y, b); },
          py::arg("y"), py::arg("b"));
    m.def("labeled_density", [](std::vector<double> y, std::vector<int> b, std::vector<double> x,
                                const ChannelParams& p) {
        return labeled_density(y, b, ReleaseSchedule{std::move(x)}, p);
    }, py::arg("y"), py::arg("b"), py::arg("x"), py::arg("params") = ChannelParams{});
    m.def("pair_density", [](std::array<double, 2> y, std::array<double, 2> x, const ChannelParams& p) {
        return pair_density(y, x, p);
    }, py::arg("y"), py::arg("x"), py::arg("params") = ChannelParams{});
    m.def("indistinguishable_density", [](std::vector<double> y, std::vector<double> x,
                                          const ChannelParams& p) {
        return indistinguishable_density(y, ReleaseSchedule{std::move(x)}, p);
    }, py::arg("y"), py::arg("x"), py::arg("params") = ChannelParams{});
    m.def("permanent", [](const std::vector<std::vector<double>>& rows) {
        SquareMatrix mat(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw ContractViolation("permanent: matrix is not square");
            for (std::size_t j = 0; j < rows.size(); ++j) mat(i, j) = rows[i][j];
        }
        return permanent(mat);
    }, py::arg("matrix"));

    py::class_<DiscreteConfig>(m, "DiscreteConfig")
        .def(py::init([](double tau, std::size_t intervals, double p, std::size_t taps) {
                 DiscreteConfig c{tau, intervals, p, taps};
                 c.validate();
                 return c;
             }),
             py::arg("tau") = 1.0, py::arg("num_intervals") = 1000, py::arg("release_prob") = 0.5,
             py::arg("isi_taps") = 2)
        .def_readwrite("tau", &DiscreteConfig::tau)
        .def_readwrite("num_intervals", &DiscreteConfig::num_intervals)
        .def_readwrite("release_prob", &DiscreteConfig::release_prob)
        .def_readwrite("isi_taps", &DiscreteConfig::isi_taps);

    py::class_<ApproxModel>(m, "ApproxModel")
        .def_readonly("p_table", &ApproxModel::p_table)
        .def_readonly("lam", &ApproxModel::lambda);

    m.def("build_approx_model", &build_approx_model, py::arg("cfg"), py::arg("params") = ChannelParams{});
    m.def("likelihood_window", [](int c, std::vector<int> r, const ApproxModel& model) {
        return likelihood_window(c, r, model);
    }, py::arg("c"), py::arg("recent_r"), py::arg("model"));
    m.def("sequence_likelihood", [](std::vector<int> c, std::vector<int> r, const ApproxModel& model) {
        return sequence_likelihood(c, r, model);
    }, py::arg("c"), py::arg("r"), py::arg("model"));
    m.def("marginal_likelihood", [](std::vector<int> c, const DiscreteConfig& cfg, const ApproxModel& model) {
        return marginal_likelihood(c, cfg, model);
    }, py::arg("c"), py::arg("cfg"), py::arg("model"));
    m.def("credit_arrivals", [](std::vector<int> r, std::vector<double> t, const DiscreteConfig& cfg) {
        return credit_arrivals(r, t, cfg);
    }, py::arg("r"), py::arg("times"), py::arg("cfg"));
    m.def("simulate_discrete", [](std::vector<int> r, const DiscreteConfig& cfg, const ChannelParams& p,
                                  Rng& rng) { return simulate_discrete(r, cfg, p, rng); },
          py::arg("r"), py::arg("cfg"), py::arg("params"), py::arg("rng"));

    py::class_<MIEstimate>(m, "MIEstimate")
        .def_readonly("value", &MIEstimate::value)
        .def_readonly("std_error", &MIEstimate::std_error)
        .def_readonly("n_samples", &MIEstimate::n_samples)
        .def_readonly("seed", &MIEstimate::seed)
        .def("__repr__", [](const MIEstimate& e) {
            return "MIEstimate(value=" + std::to_string(e.value) + ", std_error=" +
                   std::to_string(e.std_error) + ", n_samples=" + std::to_string(e.n_samples) + ")";
        });

    m.def("mi_single_particle", [](double T, const ChannelParams& p, std::size_t n, std::uint64_t seed,
                                   unsigned threads) {
        py::gil_scoped_release release;
        return mi_single_particle(T, p, {}, mc_spec(n, seed, threads));
    }, py::arg("T"), py::arg("params") = ChannelParams{}, py::arg("n_samples") = 20000,
          py::arg("seed") = 1, py::arg("threads") = 1);
    m.def("mi_pair", [](double T, const ChannelParams& p, std::size_t n, std::uint64_t seed,
                        unsigned threads) {
        py::gil_scoped_release release;
        return mi_pair(T, p, {}, mc_spec(n, seed, threads));
    }, py::arg("T"), py::arg("params") = ChannelParams{}, py::arg("n_samples") = 20000,
          py::arg("seed") = 1, py::arg("threads") = 1);
    m.def("mi_lower_bound_discrete", [](const DiscreteConfig& cfg, const ChannelParams& p,
                                        std::size_t n, std::uint64_t seed, unsigned threads) {
        py::gil_scoped_release release;
        return mi_lower_bound_discrete(cfg, p, mc_spec(n, seed, threads));
    }, py::arg("cfg"), py::arg("params") = ChannelParams{}, py::arg("n_traces") = 1000,
          py::arg("seed") = 1, py::arg("threads") = 1);

    m.def("example2_csv", [](std::vector<double> grid_T, std::size_t n, std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.grid_T = std::move(grid_T);
        cfg.n_samples = n;
        cfg.seed = seed;
        return example2_csv(run_example2(cfg));
    }, py::arg("grid_T"), py::arg("n_samples") = 4000, py::arg("seed") = 1);
    m.def("example3_csv", [](std::vector<double> grid_tau, std::vector<double> grid_p,
                             std::size_t n, std::size_t intervals, std::uint64_t seed) {
        ExperimentConfig cfg;
        cfg.grid_tau = std::move(grid_tau);
        cfg.grid_p = std::move(grid_p);
        cfg.n_samples = n;
        cfg.num_intervals = intervals;
        cfg.seed = seed;
        return example3_csv(run_example3(cfg).rows);
    }, py::arg("grid_tau"), py::arg("grid_p"), py::arg("n_traces") = 2000,
          py::arg("intervals") = 1000, py::arg("seed") = 1);
}
