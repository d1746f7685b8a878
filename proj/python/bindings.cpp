#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaps/bench.hpp"
#include "gaps/cone.hpp"
#include "gaps/gap.hpp"
#include "gaps/solver.hpp"

namespace py = pybind11;
using namespace gaps;

namespace {

SetPtr build_product(const std::vector<std::pair<std::string, Index>>& parts) {
  std::vector<SetPtr> sets;
  for (const auto& [type, dim] : parts) {
    if (type == "zero") {
      sets.push_back(std::make_shared<ZeroCone>(dim));
    } else if (type == "nonneg") {
      sets.push_back(std::make_shared<NonnegativeOrthant>(dim));
    } else if (type == "soc") {
      sets.push_back(std::make_shared<SecondOrderCone>(dim));
    } else if (type == "free") {
      sets.push_back(std::make_shared<FreeSpace>(dim));
    } else {
      throw ConfigError("unknown set type '" + type + "'");
    }
  }
  if (sets.empty()) throw ConfigError("at least one set required");
  return std::make_shared<ProductSet>(std::move(sets));
}

StepperKind parse_mode(const std::string& mode) {
  if (mode == "none") return StepperKind::Nominal;
  if (mode == "basic") return StepperKind::BasicLineSearch;
  if (mode == "projected") return StepperKind::ProjectedLineSearch;
  throw ConfigError("mode must be one of none, basic, projected");
}

struct PySolveInfo {
  Vector solution;
  long iterations = 0;
  bool converged = false;
  std::string monitor;
  double residual = 0.0;
  long ls_triggered = 0;
  long ls_accepted = 0;
  long candidates = 0;
};

PySolveInfo to_info(const SolveResult& res) {
  PySolveInfo info;
  info.solution = res.solution;
  info.iterations = res.iterations;
  info.converged = res.converged;
  info.monitor = res.monitor;
  info.residual = res.solution_merit;
  info.ls_triggered = res.stats.ls_triggered;
  info.ls_accepted = res.stats.ls_accepted;
  info.candidates = res.stats.candidates_evaluated;
  return info;
}

SolveResult run_two_set(const std::shared_ptr<const AffineSubspace>& affine, const SetPtr& second,
                        double alpha1, double alpha2, std::optional<double> alpha,
                        const std::string& mode, double tol, long max_iter, double eps,
                        std::optional<Vector> x0) {
  GapConfig cfg;
  cfg.alphas = {alpha1, alpha2};
  cfg.alpha = alpha ? *alpha : outer_alpha(alpha1, alpha2);
  GapOperator op({affine, second}, cfg);
  SolveOptions opts;
  opts.stepper = parse_mode(mode);
  opts.max_iter = max_iter;
  opts.line_search.epsilon = eps;
  opts.record_history = false;
  const Criterion crit = feasibility_criterion({affine, second}, tol);
  const Vector start = x0 ? *x0 : Vector::Zero(op.dim());
  return solve(op, start, crit, opts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Alternating relaxed projections for convex feasibility and cone programs";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
  py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_RuntimeError);

  py::class_<PySolveInfo>(m, "SolveInfo")
      .def_readonly("solution", &PySolveInfo::solution)
      .def_readonly("iterations", &PySolveInfo::iterations)
      .def_readonly("converged", &PySolveInfo::converged)
      .def_readonly("monitor", &PySolveInfo::monitor)
      .def_readonly("residual", &PySolveInfo::residual)
      .def_readonly("ls_triggered", &PySolveInfo::ls_triggered)
      .def_readonly("ls_accepted", &PySolveInfo::ls_accepted)
      .def_readonly("candidates", &PySolveInfo::candidates)
      .def("__repr__", [](const PySolveInfo& info) {
        return "SolveInfo(converged=" + std::string(info.converged ? "True" : "False") +
               ", iterations=" + std::to_string(info.iterations) + ")";
      });

  m.def(
      "beta", [](const std::vector<double>& alphas) { return beta(alphas); },
      py::arg("alphas"),
      "Averagedness parameter of the composed relaxed projections.");

  m.def(
      "parameter_regime",
      [](double alpha, const std::vector<double>& alphas) {
        GapConfig cfg;
        cfg.alpha = alpha;
        cfg.alphas = alphas;
        return to_string(validate(cfg));
      },
      py::arg("alpha"), py::arg("alphas"),
      "Name of the admissible parameter regime, or raises ConfigError.");

  m.def(
      "averagedness_constant",
      [](double alpha, const std::vector<double>& alphas) {
        GapConfig cfg;
        cfg.alpha = alpha;
        cfg.alphas = alphas;
        return averagedness_constant(cfg);
      },
      py::arg("alpha"), py::arg("alphas"));

  m.def("outer_alpha", &outer_alpha, py::arg("alpha1"), py::arg("alpha2"),
        "Default outer step: 0.85/beta, or 0.85 for the reflection pair.");

  m.def(
      "project", [](const std::string& type, const Vector& x) {
        return build_product({{type, x.size()}})->project(x);
      },
      py::arg("set_type"), py::arg("x"),
      "Projection onto a primitive set (zero, nonneg, soc, free).");

  m.def(
      "project_affine",
      [](const Matrix& a, const Vector& b, const Vector& x) {
        return AffineSubspace(a, b).project(x);
      },
      py::arg("a"), py::arg("b"), py::arg("x"), "Projection onto {x : a x = b}.");

  m.def(
      "normal_matrix",
      [](Index rows, Index cols, std::uint64_t seed) {
        return NormalSampler(seed).matrix(rows, cols);
      },
      py::arg("rows"), py::arg("cols"), py::arg("seed"),
      "Seeded standard-normal matrix from the benchmark generator.");

  m.def(
      "solve_feasibility",
      [](const Matrix& a, const Vector& b,
         const std::vector<std::pair<std::string, Index>>& sets, double alpha1, double alpha2,
         std::optional<double> alpha, const std::string& mode, double tol, long max_iter,
         double eps, std::optional<Vector> x0) {
        auto affine = std::make_shared<AffineSubspace>(a, b);
        return to_info(run_two_set(affine, build_product(sets), alpha1, alpha2, alpha, mode,
                                   tol, max_iter, eps, std::move(x0)));
      },
      py::arg("a"), py::arg("b"), py::arg("sets"), py::arg("alpha1") = 1.95,
      py::arg("alpha2") = 1.95, py::arg("alpha") = std::nullopt, py::arg("mode") = "projected",
      py::arg("tol") = 1e-10, py::arg("max_iter") = 1000000, py::arg("eps") = 0.01,
      py::arg("x0") = std::nullopt,
      "Find a point of {x : a x = b} intersected with a product of sets.");

  m.def(
      "solve_cone_program",
      [](const Matrix& a, const Vector& b, const Vector& c,
         const std::vector<std::pair<std::string, Index>>& cones, double alpha1, double alpha2,
         std::optional<double> alpha, const std::string& mode, double tol, long max_iter,
         double eps) {
        ConeProgram p;
        p.a = a.sparseView();
        p.b = b;
        p.c = c;
        p.cone = build_product(cones);
        const EmbeddedFeasibility e = embed(p);
        const SolveResult res = run_two_set(e.affine, e.coneset, alpha1, alpha2, alpha, mode,
                                            tol, max_iter, eps, std::nullopt);
        const PrimalDualSolution sol = recover(e, res.solution);
        py::dict out;
        out["x"] = sol.x;
        out["s"] = sol.s;
        out["y"] = sol.y;
        out["objective"] = sol.objective;
        out["objective_gap"] = sol.objective_gap;
        out["primal_residual"] = sol.primal_residual;
        out["dual_residual"] = sol.dual_residual;
        out["info"] = to_info(res);
        return out;
      },
      py::arg("a"), py::arg("b"), py::arg("c"), py::arg("cones"), py::arg("alpha1") = 1.95,
      py::arg("alpha2") = 1.95, py::arg("alpha") = std::nullopt, py::arg("mode") = "projected",
      py::arg("tol") = 1e-8, py::arg("max_iter") = 1000000, py::arg("eps") = 0.01,
      "Solve min c'x s.t. a x + s = b, s in K through the primal-dual embedding.");
}
