// Python bindings: parameters, presets, one-grid solves, convergence studies
// and the property checks. Fields come back as NumPy arrays.

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>

#include "cbfed/checks.hpp"
#include "cbfed/manufactured.hpp"
#include "cbfed/solver.hpp"

namespace py = pybind11;
using namespace cbfed;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

CaseId case_from(const std::string& s) {
  const auto id = parse_case_id(s);
  if (!id) throw py::value_error("unknown case '" + s + "' (expected ex1, ex2 or ex3)");
  return *id;
}

py::dict report_dict(const IterationReport& r) {
  py::list outer;
  for (const auto& rec : r.outer) {
    py::dict d;
    d["outer"] = rec.index;
    d["inner_iterations"] = rec.inner_iterations;
    d["inner_converged"] = rec.inner_converged;
    d["increment"] = rec.increment;
    d["linear_residual"] = rec.linear_residual;
    d["divergence_residual"] = rec.divergence_residual;
    d["pressure_mean"] = rec.pressure_mean;
    outer.append(d);
  }
  py::dict d;
  d["converged"] = r.converged;
  d["outer_iterations"] = r.outer_iterations();
  d["final_increment"] = r.final_increment;
  d["outer"] = outer;
  return d;
}

// Vertex fields, the Gamma1 multiplier table and the iteration history.
py::dict solve_py(const std::string& name, std::size_t n, std::optional<ProblemParams> params,
                  std::optional<SolverConfig> config, std::optional<VectorField> f) {
  const auto c = manufactured_case(case_from(name));
  SolverConfig cfg = config.value_or(SolverConfig{});
  if (!config) cfg.eta = c.eta;
  const ProblemParams prm = params.value_or(c.params);
  const VectorField force = f.value_or(forcing_field(c));
  const TriMesh mesh = unit_square_mesh(n);
  SolveResult res;
  DofMap dofs;
  {
    py::gil_scoped_release release;
    const CbfedSolver solver(mesh, prm, cfg, force);
    res = solver.solve();
    dofs = solver.dofs();
  }
  const std::size_t nv = mesh.num_vertices();
  std::vector<double> x(nv), y(nv), ux(nv), uy(nv), p(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    x[v] = mesh.vertices[v].x;
    y[v] = mesh.vertices[v].y;
    ux[v] = res.state.u[dofs.vertex_dof(0, v)];
    uy[v] = res.state.u[dofs.vertex_dof(1, v)];
    p[v] = res.state.p[v];
  }
  std::vector<double> gx;
  for (auto v : dofs.multiplier_vertices) gx.push_back(mesh.vertices[v].x);
  const auto ut = tangential_velocity(dofs, res.state.u);
  const auto comp = check_complementarity(dofs, res.state);

  py::dict d;
  d["x"] = to_array(x);
  d["y"] = to_array(y);
  d["u_x"] = to_array(ux);
  d["u_y"] = to_array(uy);
  d["p"] = to_array(p);
  d["gamma1_x"] = to_array(gx);
  d["u_tau"] = to_array(ut);
  d["lambda"] = to_array(res.state.lambda);
  d["report"] = report_dict(res.report);
  d["complementarity"] = py::make_tuple(comp.satisfied(), comp.nodes);
  return d;
}

py::list study_py(const std::string& name, std::optional<std::vector<std::size_t>> grids,
                  std::optional<std::size_t> n_ref, std::optional<SolverConfig> config) {
  const auto c = manufactured_case(case_from(name));
  SolverConfig cfg = config.value_or(SolverConfig{});
  if (!config) cfg.eta = c.eta;
  ConvergenceStudy st;
  {
    py::gil_scoped_release release;
    st = run_convergence_study(c, grids.value_or(c.grids), n_ref.value_or(c.n_ref), cfg);
  }
  py::list rows;
  for (const auto& r : st.rows) {
    py::dict d;
    d["grid"] = r.grid;
    d["e_l2_u"] = r.err.l2_u;
    d["e_V_u"] = r.err.v_u;
    d["e_l2_p"] = r.err.l2_p;
    d["ord_l2_u"] = r.ord_l2_u;
    d["ord_V_u"] = r.ord_v_u;
    d["ord_l2_p"] = r.ord_l2_p;
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_cbfed, m) {
  m.doc() = "MINI element solver for stationary CBFeD flow with nonsmooth slip";

  py::class_<FrictionLaw>(m, "FrictionLaw")
      .def(py::init<>())
      .def_readwrite("a", &FrictionLaw::a)
      .def_readwrite("b", &FrictionLaw::b)
      .def_readwrite("rho", &FrictionLaw::rho)
      .def("omega", &FrictionLaw::omega)
      .def("validate", &FrictionLaw::validate);

  py::class_<ProblemParams>(m, "ProblemParams")
      .def(py::init<>())
      .def_readwrite("mu", &ProblemParams::mu)
      .def_readwrite("alpha", &ProblemParams::alpha)
      .def_readwrite("beta", &ProblemParams::beta)
      .def_readwrite("kappa", &ProblemParams::kappa)
      .def_readwrite("r", &ProblemParams::r)
      .def_readwrite("q", &ProblemParams::q)
      .def_readwrite("friction", &ProblemParams::friction)
      .def("validate", &ProblemParams::validate);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("eta", &SolverConfig::eta)
      .def_readwrite("eps_outer", &SolverConfig::eps_outer)
      .def_readwrite("eps_inner", &SolverConfig::eps_inner)
      .def_readwrite("max_outer", &SolverConfig::max_outer)
      .def_readwrite("max_inner", &SolverConfig::max_inner)
      .def_readwrite("warm_start_lambda", &SolverConfig::warm_start_lambda)
      .def_readwrite("relative_outer", &SolverConfig::relative_outer)
      .def("validate", &SolverConfig::validate);

  m.def(
      "case_params",
      [](const std::string& name) { return manufactured_case(case_from(name)).params; },
      py::arg("case"), "Coefficients of a built-in example.");
  m.def(
      "exact_solution",
      [](const std::string& name, double x, double y) {
        const auto c = manufactured_case(case_from(name));
        const Vec2 u = c.velocity(x, y);
        return py::make_tuple(u[0], u[1], c.pressure(x, y));
      },
      py::arg("case"), py::arg("x"), py::arg("y"), "(u_x, u_y, p) of the analytic solution.");
  m.def(
      "forcing",
      [](const std::string& name, double x, double y) {
        const Vec2 f = forcing(manufactured_case(case_from(name)), {x, y});
        return py::make_tuple(f[0], f[1]);
      },
      py::arg("case"), py::arg("x"), py::arg("y"));

  m.def("solve", &solve_py, py::arg("case") = "ex1", py::arg("n") = 10,
        py::arg("params") = py::none(), py::arg("config") = py::none(),
        py::arg("forcing") = py::none(),
        "Solve on the n x n mesh. Defaults come from the named example.");
  m.def("convergence_study", &study_py, py::arg("case") = "ex1", py::arg("grids") = py::none(),
        py::arg("n_ref") = py::none(), py::arg("config") = py::none());

  m.def(
      "project_lambda", [](const std::vector<double>& l) { return to_array(project_lambda(l)); },
      py::arg("lam"));
  m.def("inf_sup_constant", &inf_sup_constant, py::arg("n"));
  m.def(
      "check_monotonicity",
      [](double r, std::size_t samples, std::uint64_t seed) {
        const auto rep = check_monotonicity(r, samples, seed);
        return py::make_tuple(rep.min_slack_weighted, rep.min_slack_strong);
      },
      py::arg("r"), py::arg("samples") = 10000, py::arg("seed") = 1);
  m.def(
      "run_checks",
      [](std::uint64_t seed, std::size_t samples, int quadrature_degree) {
        const auto items = run_checks({seed, samples, quadrature_degree});
        py::list out;
        for (const auto& it : items) out.append(py::make_tuple(it.name, it.passed, it.detail));
        return out;
      },
      py::arg("seed") = 1, py::arg("samples") = 10000, py::arg("quadrature_degree") = 0);
}
