// Thin pybind11 layer. Structured values cross the boundary as JSON text; the Python
// package decodes them.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "msreg/bench.hpp"
#include "msreg/dataset.hpp"
#include "msreg/morse_smale.hpp"
#include "msreg/piecewise.hpp"
#include "msreg/tweedie.hpp"

namespace py = pybind11;
using namespace msreg;

namespace {

Relationship parse_relationship(const std::string& s) {
    if (s == "linear") return Relationship::Linear;
    if (s == "nonlinear") return Relationship::Nonlinear;
    if (s == "mixed") return Relationship::Mixed;
    throw std::invalid_argument("relationship must be linear, nonlinear or mixed, got '" + s + "'");
}

std::vector<std::string> names_or_default(std::vector<std::string> names, Index p) {
    if (names.empty())
        for (Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j + 1));
    if (static_cast<Index>(names.size()) != p) throw DataError("feature_names length does not match X");
    return names;
}

Dataset as_dataset(const Matrix& x, const Vector& y, std::vector<std::string> names) {
    Dataset d;
    d.features = x;
    d.outcome = y;
    d.feature_names = names_or_default(std::move(names), x.cols());
    d.validate();
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Morse-Smale piecewise regression core";

    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    m.def("algorithm_names", &algorithm_names);
    m.def("learner_names", &learner_names);

    m.def(
        "simulate",
        [](Index n, double xi, double phi, const std::string& relationship, std::uint64_t seed) {
            SimConfig c;
            c.n = n;
            c.xi = xi;
            c.phi = phi;
            c.relationship = parse_relationship(relationship);
            c.seed = seed;
            c.validate();
            Dataset d = simulate_dataset(c);
            return py::make_tuple(d.features, d.outcome, d.feature_names);
        },
        py::arg("n"), py::arg("xi") = 1.5, py::arg("phi") = 1.0, py::arg("relationship") = "linear",
        py::arg("seed") = 0);

    m.def(
        "sample_tweedie",
        [](double mu, double phi, double xi, Index size, std::uint64_t seed) {
            Rng rng(seed);
            Vector out(size);
            for (Index i = 0; i < size; ++i) out[i] = sample_tweedie(mu, phi, xi, rng);
            return out;
        },
        py::arg("mu"), py::arg("phi"), py::arg("xi"), py::arg("size"), py::arg("seed") = 0);

    m.def(
        "partition",
        [](const Matrix& x, const Vector& y, const std::string& policy_json, Index k, int jobs) {
            if (x.rows() != y.size()) throw DataError("X and y have different row counts");
            MsParams p;
            p.k = k;
            p.jobs = jobs;
            p.policy = PartitionPolicy::from_json(nlohmann::json::parse(policy_json));
            py::gil_scoped_release release;
            return fit_morse_smale(x, y, p).partitioning.to_json().dump();
        },
        py::arg("X"), py::arg("y"), py::arg("policy_json"), py::arg("k") = 0, py::arg("jobs") = 1);

    py::class_<MsrModel>(m, "MsrModel")
        .def_static(
            "fit",
            [](const Matrix& x, const Vector& y, const std::string& learner, const std::string& policy_json,
               const std::string& learner_json, std::uint64_t seed, std::vector<std::string> names) {
                const Dataset d = as_dataset(x, y, std::move(names));
                MsParams p;
                p.policy = PartitionPolicy::from_json(nlohmann::json::parse(policy_json));
                const LearnerConfig c = LearnerConfig::from_json(nlohmann::json::parse(learner_json));
                const auto reg = make_learner(learner, c);
                py::gil_scoped_release release;
                return fit_msr(d, *reg, p, seed);
            },
            py::arg("X"), py::arg("y"), py::arg("learner"), py::arg("policy_json"), py::arg("learner_json") = "{}",
            py::arg("seed") = 0, py::arg("feature_names") = std::vector<std::string>{})
        .def("predict", [](const MsrModel& model, const Matrix& x) { return model.predict(x); }, py::arg("X"))
        .def("route", [](const MsrModel& model, const Matrix& x) { return model.route(x); }, py::arg("X"))
        .def_property_readonly("learner", [](const MsrModel& model) { return model.learner; })
        .def_property_readonly("partition_sizes", [](const MsrModel& model) { return model.partitioning.sizes(); })
        .def_property_readonly("labels", [](const MsrModel& model) { return model.partitioning.labels; })
        .def("to_json", [](const MsrModel& model) { return model.to_json().dump(); })
        .def_static("from_json", [](const std::string& s) { return MsrModel::from_json(nlohmann::json::parse(s)); });

    m.def(
        "run_benchmark",
        [](Index n, int trials, std::vector<std::string> algorithms, std::uint64_t seed, int jobs,
           const std::string& learner_json) {
            if (algorithms.empty()) algorithms = algorithm_names();
            for (const auto& a : algorithms) algorithm_spec(a);
            BenchOptions o;
            o.jobs = jobs;
            o.learner = LearnerConfig::from_json(nlohmann::json::parse(learner_json));
            py::gil_scoped_release release;
            return run_benchmark(simulation_grid(n), trials, algorithms, seed, o).to_json().dump();
        },
        py::arg("n"), py::arg("trials") = 1, py::arg("algorithms") = std::vector<std::string>{},
        py::arg("seed") = 1, py::arg("jobs") = 1, py::arg("learner_json") = "{}");
}
