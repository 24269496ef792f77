#include "lowregret/fractional_operator.hpp"
#include "lowregret/optimizer.hpp"
#include "lowregret/oracle.hpp"
#include "lowregret/scenario.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace lowregret;

namespace {

RegretProblem problem_from_json(const std::string& text) {
    return RegretProblem(ScenarioConfig::from_json(nlohmann::json::parse(text)).regret_config());
}

py::dict bundle_dict(const OptimalityBundle& b) {
    py::dict d;
    d["u"] = b.u;
    d["q"] = b.q;
    d["xi"] = b.xi.trajectory;
    d["psi"] = b.psi;
    d["phi"] = b.phi;
    d["objective"] = b.objective;
    d["converged"] = b.converged;
    d["cg_iterations"] = b.cg_iterations;
    d["stationarity_residual"] = b.stationarity_residual;
    d["residual_scale"] = b.residual_scale;
    d["objective_history"] = b.objective_history;
    return d;
}

}  // namespace

PYBIND11_MODULE(_lowregret, m) {
    m.doc() = "Low-regret control of 1-D fractional diffusion with unknown initial data.";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("normalization_constant", &normalization_constant, py::arg("s"));

    py::class_<FracOperator>(m, "FracOperator")
        .def(py::init([](double x_l, double x_r, int n, double s) {
                 return FracOperator(build_grid(x_l, x_r, n), s);
             }),
             py::arg("x_left"), py::arg("x_right"), py::arg("nodes"), py::arg("s"))
        .def_property_readonly("s", &FracOperator::s)
        .def_property_readonly("nodes", [](const FracOperator& op) { return op.grid().nodes; })
        .def_property_readonly("h", [](const FracOperator& op) { return op.grid().h; })
        .def_property_readonly("matrix", &FracOperator::matrix)
        .def("apply", &FracOperator::apply, py::arg("w"));

    py::class_<RegretProblem>(m, "Problem")
        .def(py::init(&problem_from_json), py::arg("config_json"))
        .def_property_readonly("aleph", &RegretProblem::aleph)
        .def_property_readonly("gamma", &RegretProblem::gamma)
        .def_property_readonly("j_gamma_00", &RegretProblem::j_gamma_00)
        .def_property_readonly("nodes", [](const RegretProblem& p) { return p.grid().nodes; })
        .def_property_readonly("times", [](const RegretProblem& p) { return p.tgrid().times; })
        .def_property_readonly("q00", &RegretProblem::q00)
        .def("with_gamma", &RegretProblem::with_gamma, py::arg("gamma"))
        .def("zero_control",
             [](const RegretProblem& p) { return zero_spacetime(p.grid(), p.tgrid()); })
        .def("norm_Q", &RegretProblem::norm_Q, py::arg("field"))
        .def("objective", &eval_J_reduced, py::arg("v"))
        .def("gradient", &reduced_gradient, py::arg("v"))
        .def("fd_gradient", &oracle::fd_gradient, py::arg("v"), py::arg("eps") = 1e-5)
        .def("xi0", [](const RegretProblem& p, const SpaceTimeField& v) {
            return solve_xi(p, v).initial_value;
        }, py::arg("v"))
        .def("solve", [](const RegretProblem& p) { return bundle_dict(solve_low_regret(p)); })
        .def("residuals", [](const RegretProblem& p) {
            return optimality_residuals(p, solve_low_regret(p)).as_map();
        });

    m.def("gamma_sweep", [](const RegretProblem& p, const std::vector<double>& gammas) {
        const GammaSweepReport r = gamma_sweep(p, gammas);
        py::dict d;
        d["gammas"] = r.gammas;
        d["xi0_norms"] = r.xi0_norms;
        d["pairwise_control_distances"] = r.pairwise_control_distances;
        d["fitted_slope"] = r.fitted_slope;
        d["degenerate"] = r.degenerate;
        d["objectives"] = r.objectives;
        d["converged"] = r.converged;
        d["controls"] = r.controls;
        return d;
    }, py::arg("problem"), py::arg("gammas"));

    m.def("validate_config", [](const std::string& text) {
        return ScenarioConfig::from_json(nlohmann::json::parse(text)).to_json().dump();
    }, py::arg("config_json"));

    m.def("run_scenario",
          [](const std::filesystem::path& path, std::optional<std::filesystem::path> out,
             std::optional<std::uint64_t> seed) {
              RunOptions options;
              options.out_dir = std::move(out);
              options.seed = seed;
              py::gil_scoped_release release;
              return run_scenario(path, options).to_json().dump();
          },
          py::arg("config_path"), py::arg("out_dir") = py::none(), py::arg("seed") = py::none());
}
