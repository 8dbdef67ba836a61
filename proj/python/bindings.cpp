// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include "nlevp/experiment.hpp"

namespace py = pybind11;
using namespace nlevp;

namespace
{

NlevpProblem make_problem(Index n, MatrixFunction evaluate, std::optional<MatrixFunction> derivative)
{
  NlevpProblem p;
  p.n = n;
  p.evaluate = std::move(evaluate);
  if (derivative)
  {
    p.derivative = std::move(*derivative);
  }
  return p;
}

}  // namespace

PYBIND11_MODULE(_nlevp, m)
{
  m.doc() = "Contour-based nonlinear eigenvalue solvers";

  py::register_exception<Error>(m, "NlevpError", PyExc_RuntimeError);

  py::class_<Circle>(m, "Circle")
      .def(py::init<Complex, double>(), py::arg("center") = Complex(0.0), py::arg("radius") = 1.0)
      .def_readwrite("center", &Circle::center)
      .def_readwrite("radius", &Circle::radius);
  py::class_<Ellipse>(m, "Ellipse")
      .def(py::init<Complex, double, double>(), py::arg("center") = Complex(0.0),
           py::arg("rx") = 1.0, py::arg("ry") = 1.0)
      .def_readwrite("center", &Ellipse::center)
      .def_readwrite("rx", &Ellipse::rx)
      .def_readwrite("ry", &Ellipse::ry);
  py::class_<Interval>(m, "Interval")
      .def(py::init<double, double>(), py::arg("a") = -1.0, py::arg("b") = 1.0)
      .def_readwrite("a", &Interval::a)
      .def_readwrite("b", &Interval::b);
  m.def("contains", &contains, py::arg("domain"), py::arg("z"));

  py::enum_<QuadratureRule>(m, "QuadratureRule")
      .value("Trapezoid", QuadratureRule::Trapezoid)
      .value("GaussLegendre", QuadratureRule::GaussLegendre);
  py::enum_<Method>(m, "Method")
      .value("CauchyRational", Method::CauchyRational)
      .value("ChebyshevInterp", Method::ChebyshevInterp);

  m.def(
      "quadrature",
      [](const Contour &domain, std::size_t m, QuadratureRule rule) {
        const Quadrature q = make_quadrature(rule, domain, m);
        return py::make_tuple(q.nodes, q.weights);
      },
      py::arg("domain"), py::arg("m"), py::arg("rule") = QuadratureRule::Trapezoid,
      "Quadrature nodes and Cauchy weights on a closed contour.");
  m.def("chebyshev_points", &chebyshev_points, py::arg("interval"), py::arg("m"));

  py::class_<NlevpProblem>(m, "Problem")
      .def(py::init(&make_problem), py::arg("n"), py::arg("evaluate"),
           py::arg("derivative") = py::none())
      .def_readonly("n", &NlevpProblem::n)
      .def("__call__", &NlevpProblem::operator(), py::arg("z"))
      .def("derivative_at", &NlevpProblem::derivative_at, py::arg("z"));

  py::class_<GalleryProblem>(m, "GalleryProblem")
      .def_readonly("name", &GalleryProblem::name)
      .def_readonly("problem", &GalleryProblem::problem)
      .def_readonly("reference", &GalleryProblem::reference)
      .def_readonly("domain", &GalleryProblem::domain);
  m.def("make_diagonal", [](const std::vector<Complex> &roots, Index n) { return make_diagonal(roots, n); },
        py::arg("roots"), py::arg("n"));
  m.def("make_quadratic", &make_quadratic, py::arg("M2"), py::arg("C1"), py::arg("K0"));
  m.def("make_delay", &make_delay, py::arg("A0"), py::arg("A1"), py::arg("tau"),
        py::arg("region") = py::none());
  m.def("standard_delay", &standard_delay, py::arg("n"), py::arg("inside"), py::arg("seed"),
        py::arg("with_reference") = true);
  m.def("standard_quadratic", &standard_quadratic, py::arg("n"), py::arg("inside"),
        py::arg("seed"));
  m.def(
      "newton_trace_oracle",
      [](const NlevpProblem &p, const Contour &region, std::size_t grid) {
        return newton_trace_oracle(p, region, grid).roots;
      },
      py::arg("problem"), py::arg("region"), py::arg("grid") = 50);

  py::class_<DecayReport>(m, "DecayReport")
      .def_property_readonly("orders",
                             [](const DecayReport &r) {
                               std::vector<std::size_t> out;
                               for (const auto &p : r.points) out.push_back(p.m);
                               return out;
                             })
      .def_property_readonly("errors",
                             [](const DecayReport &r) {
                               std::vector<double> out;
                               for (const auto &p : r.points) out.push_back(p.error);
                               return out;
                             })
      .def_readonly("ratio", &DecayReport::ratio)
      .def_readonly("decaying", &DecayReport::decaying);
  m.def(
      "decay_check",
      [](const NlevpProblem &p, const Contour &domain, const std::vector<std::size_t> &orders,
         QuadratureRule rule) {
        const auto grid = default_test_grid(domain, 0.5);
        return decay_check(p, domain, orders, grid, rule);
      },
      py::arg("problem"), py::arg("domain"), py::arg("orders"),
      py::arg("rule") = QuadratureRule::Trapezoid,
      "Approximation error against the order on the half-diameter test grid.");

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("method", &SolverConfig::method)
      .def_readwrite("quadrature", &SolverConfig::quadrature)
      .def_readwrite("m", &SolverConfig::m)
      .def_readwrite("nu", &SolverConfig::subspace_dim)
      .def_readwrite("q", &SolverConfig::power_steps)
      .def_readwrite("k", &SolverConfig::k)
      .def_readwrite("tol", &SolverConfig::tol)
      .def_readwrite("max_outer", &SolverConfig::max_outer)
      .def_readwrite("shift", &SolverConfig::shift)
      .def_readwrite("seed", &SolverConfig::seed)
      .def_readwrite("krylov_max", &SolverConfig::krylov_max)
      .def_readwrite("threads", &SolverConfig::threads);

  py::class_<EigenPair>(m, "EigenPair")
      .def_readonly("eigenvalue", &EigenPair::lambda)
      .def_readonly("vector", &EigenPair::u)
      .def_readonly("residual", &EigenPair::residual);
  py::class_<EigenResult>(m, "EigenResult")
      .def_readonly("pairs", &EigenResult::pairs)
      .def_readonly("rejected", &EigenResult::rejected)
      .def_readonly("outer_iterations", &EigenResult::outer_iterations)
      .def_readonly("converged", &EigenResult::converged)
      .def_readonly("history", &EigenResult::history)
      .def_property_readonly("eigenvalues", [](const EigenResult &r) {
        std::vector<Complex> out;
        for (const auto &p : r.pairs) out.push_back(p.lambda);
        return out;
      });

  m.def("reduced_subspace_iteration", &reduced_subspace_iteration, py::arg("problem"),
        py::arg("config"), py::arg("domain"));
  m.def("full_pencil_arnoldi", &full_pencil_arnoldi, py::arg("problem"), py::arg("config"),
        py::arg("domain"));
  m.def("residual", &residual, py::arg("problem"), py::arg("eigenvalue"), py::arg("vector"));

  m.def(
      "run_config",
      [](const std::string &text) {
        const ExperimentConfig cfg = parse_config(text);
        const RunOutcome out = run_experiment(cfg);
        return py::make_tuple(out.exit_code, out.report);
      },
      py::arg("text"), "Runs a key-value experiment; returns (exit_code, report).");
}
