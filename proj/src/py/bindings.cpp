#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "stefanopt/analysis.hpp"
#include "stefanopt/config.hpp"
#include "stefanopt/optimize.hpp"
#include "stefanopt/verify.hpp"

namespace py = pybind11;
using namespace stefanopt;

namespace {

ProblemData problem_from_json(const std::string& text) {
  nlohmann::json j;
  j["problem"] = nlohmann::json::parse(text);
  return parse_config(j).problem;
}

InterpMode mode_from_string(const std::string& mode) {
  if (mode == "constant") return InterpMode::constant;
  if (mode == "linear") return InterpMode::linear;
  throw std::invalid_argument("mode must be 'constant' or 'linear'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Method-of-lines optimal-control solver for the one-phase inverse Stefan problem";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<EvalError>(m, "EvalError");
  py::register_exception<ConfigError>(m, "ConfigError");

  py::class_<FunctionSpec>(m, "FunctionSpec")
      .def_static("parse", &FunctionSpec::parse, py::arg("text"), py::arg("arity"))
      .def("__call__", [](const FunctionSpec& f, double x) { return f(x); })
      .def("__call__", [](const FunctionSpec& f, double x, double t) { return f(x, t); })
      .def_property_readonly("arity", &FunctionSpec::arity)
      .def_property_readonly("source", &FunctionSpec::source)
      .def("canonical", &FunctionSpec::canonical);

  py::class_<ProblemData>(m, "ProblemData")
      .def_readonly("a0", &ProblemData::a0)
      .def_readonly("s0", &ProblemData::s0)
      .def_readonly("T", &ProblemData::T)
      .def_readonly("l", &ProblemData::l)
      .def_readonly("delta", &ProblemData::delta)
      .def_readonly("R", &ProblemData::R)
      .def_readwrite("beta0", &ProblemData::beta0)
      .def_readwrite("beta1", &ProblemData::beta1);
  m.def("problem_from_json", &problem_from_json, py::arg("text"),
        "Build a ProblemData from the JSON text of the config 'problem' section");

  py::class_<Violation>(m, "Violation")
      .def_readonly("assumption", &Violation::assumption)
      .def_readonly("worst", &Violation::worst)
      .def_readonly("x", &Violation::x)
      .def_readonly("t", &Violation::t);
  py::class_<ValidationReport>(m, "ValidationReport")
      .def_readonly("passed", &ValidationReport::passed)
      .def_readonly("violations", &ValidationReport::violations);
  m.def("validate_data", &validate_data, py::arg("pd"), py::arg("samples"),
        py::arg("ax_cap") = 1e3);

  m.def(
      "steklov_average",
      [](const FunctionSpec& fn, int k, double tau, py::object x) {
        if (x.is_none()) return steklov_average(fn, k, tau);
        return steklov_average(fn, x.cast<double>(), k, tau);
      },
      py::arg("fn"), py::arg("k"), py::arg("tau"), py::arg("x") = py::none());

  py::class_<DiscreteControl>(m, "DiscreteControl")
      .def(py::init([](std::vector<double> s, std::vector<double> g, double T) {
             return DiscreteControl::make(std::move(s), std::move(g), T);
           }),
           py::arg("s_vals"), py::arg("g_vals"), py::arg("T"))
      .def_readonly("s_vals", &DiscreteControl::s_vals)
      .def_readonly("g_vals", &DiscreteControl::g_vals)
      .def_readonly("T", &DiscreteControl::T)
      .def_property_readonly("n", &DiscreteControl::n)
      .def_property_readonly("tau", &DiscreteControl::tau);

  py::class_<ContinuousControl>(m, "ContinuousControl")
      .def_static(
          "analytic",
          [](std::function<double(double)> s, std::function<double(double)> g, double T,
             std::function<double(double)> sd, std::function<double(double)> sdd,
             std::function<double(double)> gd) {
            return ContinuousControl::analytic(std::move(s), std::move(g), T, std::move(sd),
                                               std::move(sdd), std::move(gd));
          },
          py::arg("s"), py::arg("g"), py::arg("T"), py::arg("s_deriv") = nullptr,
          py::arg("s_second") = nullptr, py::arg("g_deriv") = nullptr)
      .def_static("from_lift", &ContinuousControl::from_lift, py::arg("dc"))
      .def("s", [](const ContinuousControl& v, double t) { return v.s(t); })
      .def("s_deriv", [](const ContinuousControl& v, double t) { return v.s_deriv(t); })
      .def("g", [](const ContinuousControl& v, double t) { return v.g(t); })
      .def_readonly("T", &ContinuousControl::T)
      .def_readonly("s0", &ContinuousControl::s0);

  m.def("norm_w22",
        [](const std::vector<double>& s, double tau) { return norm_w22(s, tau); },
        py::arg("s_vals"), py::arg("tau"));
  m.def("norm_w21",
        [](const std::vector<double>& g, double tau) { return norm_w21(g, tau); },
        py::arg("g_vals"), py::arg("tau"));
  m.def("sample_qn", &sample_Qn, py::arg("v"), py::arg("n"));
  m.def("lift_pn", &lift_Pn, py::arg("dc"));
  m.def("continuous_w22_sq", &continuous_w22_sq, py::arg("v"), py::arg("panels") = 0);
  m.def("continuous_w21_sq", &continuous_w21_sq, py::arg("v"), py::arg("panels") = 0);

  py::class_<AdmissibilityReport>(m, "AdmissibilityReport")
      .def_readonly("in_set", &AdmissibilityReport::in_set)
      .def_readonly("w22_s", &AdmissibilityReport::w22_s)
      .def_readonly("w21_g", &AdmissibilityReport::w21_g)
      .def_readonly("bounds_ok", &AdmissibilityReport::bounds_ok)
      .def_readonly("norm_ok", &AdmissibilityReport::norm_ok);
  m.def("check_admissible",
        [](const DiscreteControl& dc, const ProblemData& pd, double eps) {
          return check_admissible(dc, pd, eps);
        },
        py::arg("dc"), py::arg("pd"), py::arg("epsilon") = 0.0);
  m.def("check_admissible_continuous",
        [](const ContinuousControl& v, const ProblemData& pd, double eps) {
          return check_admissible(v, pd, eps);
        },
        py::arg("v"), py::arg("pd"), py::arg("epsilon") = 0.0);
  m.def("lipschitz_check", &lipschitz_check, py::arg("dc"), py::arg("C_cap"));
  m.def("trace_averages", &trace_averages, py::arg("v"), py::arg("gamma"), py::arg("chi"),
        py::arg("k"), py::arg("tau"));

  m.def("stability_threshold", &stability_threshold, py::arg("M"), py::arg("a0"));
  m.def("sampled_coefficient_bound", &sampled_coefficient_bound, py::arg("pd"),
        py::arg("samples") = 24);

  py::class_<StateSlice>(m, "StateSlice")
      .def_readonly("k", &StateSlice::k)
      .def_readonly("s_k", &StateSlice::s_k)
      .def_readonly("nodal", &StateSlice::nodal)
      .def_property_readonly("nodes",
                             [](const StateSlice& s) { return s.mesh.nodes; });
  py::class_<DiscreteStateVector>(m, "DiscreteStateVector")
      .def_readonly("slices", &DiscreteStateVector::slices)
      .def_readonly("tau", &DiscreteStateVector::tau)
      .def_readonly("T", &DiscreteStateVector::T)
      .def_property_readonly("n", &DiscreteStateVector::n)
      .def("eval",
           [](const DiscreteStateVector& dsv, double x, double t, const std::string& mode) {
             return eval_interpolant(dsv, x, t, mode_from_string(mode));
           },
           py::arg("x"), py::arg("t"), py::arg("mode") = "linear");
  m.def("solve_state", &solve_state, py::arg("dc"), py::arg("pd"), py::arg("m"));

  py::class_<CostBreakdown>(m, "CostBreakdown")
      .def_readonly("total", &CostBreakdown::total)
      .def_readonly("flux_term", &CostBreakdown::flux_term)
      .def_readonly("phase_term", &CostBreakdown::phase_term);
  py::class_<CostTargets>(m, "CostTargets")
      .def(py::init([](std::vector<double> nu, std::vector<double> mu) {
             return CostTargets{std::move(nu), std::move(mu)};
           }),
           py::arg("nu"), py::arg("mu"))
      .def_readonly("nu", &CostTargets::nu)
      .def_readonly("mu", &CostTargets::mu);
  m.def("discrete_cost",
        [](const DiscreteStateVector& dsv, const DiscreteControl& dc, const ProblemData& pd,
           py::object targets) {
          if (targets.is_none()) return discrete_cost(dsv, dc, pd);
          return discrete_cost(dsv, dc, pd, targets.cast<const CostTargets&>());
        },
        py::arg("dsv"), py::arg("dc"), py::arg("pd"), py::arg("targets") = py::none());
  m.def("continuous_cost_estimate", &continuous_cost_estimate, py::arg("v"), py::arg("pd"),
        py::arg("n_fine"), py::arg("m"));

  py::enum_<OptMethod>(m, "OptMethod")
      .value("fd_gradient", OptMethod::fd_gradient)
      .value("nelder_mead", OptMethod::nelder_mead);
  py::class_<OptOptions>(m, "OptOptions")
      .def(py::init<>())
      .def_readwrite("max_iters", &OptOptions::max_iters)
      .def_readwrite("grad_step", &OptOptions::grad_step)
      .def_readwrite("step0", &OptOptions::step0)
      .def_readwrite("tol", &OptOptions::tol)
      .def_readwrite("penalty_weight", &OptOptions::penalty_weight)
      .def_readwrite("method", &OptOptions::method)
      .def_readwrite("seed", &OptOptions::seed)
      .def_readwrite("vary_s", &OptOptions::vary_s)
      .def_readwrite("vary_g", &OptOptions::vary_g);
  py::class_<HistoryRow>(m, "HistoryRow")
      .def_readonly("iter", &HistoryRow::iter)
      .def_readonly("cost", &HistoryRow::cost)
      .def_readonly("penalty", &HistoryRow::penalty)
      .def_readonly("step", &HistoryRow::step);
  py::class_<OptResult>(m, "OptResult")
      .def_readonly("best", &OptResult::best)
      .def_readonly("best_cost", &OptResult::best_cost)
      .def_readonly("history", &OptResult::history)
      .def_readonly("converged", &OptResult::converged)
      .def_readonly("iters", &OptResult::iters);
  m.def("project_box", &project_box, py::arg("dc"), py::arg("pd"));
  m.def("fd_gradient",
        [](const std::function<double(const DiscreteControl&)>& obj, const DiscreteControl& dc,
           double h, bool vary_s, bool vary_g) {
          return fd_gradient(obj, dc, h, vary_s, vary_g);
        },
        py::arg("objective"), py::arg("dc"), py::arg("h") = 1e-5, py::arg("vary_s") = true,
        py::arg("vary_g") = true);
  m.def("penalized_objective",
        [](const DiscreteControl& dc, const ProblemData& pd, int m_, double w,
           py::object targets) {
          if (targets.is_none()) return penalized_objective(dc, pd, m_, w);
          const auto& t = targets.cast<const CostTargets&>();
          return penalized_objective(dc, pd, m_, w, &t);
        },
        py::arg("dc"), py::arg("pd"), py::arg("m"), py::arg("penalty_weight"),
        py::arg("targets") = py::none());
  m.def("minimize",
        [](const ProblemData& pd, int n, int m_, const DiscreteControl& init,
           const OptOptions& opts, py::object targets) {
          if (targets.is_none()) return minimize(pd, n, m_, init, opts);
          const auto& t = targets.cast<const CostTargets&>();
          return minimize(pd, n, m_, init, opts, &t);
        },
        py::arg("pd"), py::arg("n"), py::arg("m"), py::arg("init"), py::arg("opts"),
        py::arg("targets") = py::none());

  py::class_<EnergyReport>(m, "EnergyReport")
      .def_readonly("lhs_first", &EnergyReport::lhs_first)
      .def_readonly("lhs_second_extra", &EnergyReport::lhs_second_extra)
      .def_readonly("rhs_data", &EnergyReport::rhs_data)
      .def_readonly("rhs_boundary_overlap", &EnergyReport::rhs_boundary_overlap)
      .def_readonly("ratio", &EnergyReport::ratio)
      .def_readonly("ratio_defined", &EnergyReport::ratio_defined);
  m.def("energy_report", &energy_report, py::arg("dsv"), py::arg("dc"), py::arg("pd"));
  m.def("quarter_norm",
        [](const std::vector<double>& samples, double tau) { return quarter_norm(samples, tau); },
        py::arg("samples"), py::arg("tau"));
  m.def("weak_residual",
        [](const DiscreteStateVector& dsv, const DiscreteControl& dc, const ProblemData& pd,
           const std::vector<std::string>& exprs) {
          std::vector<FunctionSpec> fns;
          fns.reserve(exprs.size());
          for (const auto& e : exprs) fns.push_back(FunctionSpec::parse(e, 2));
          return weak_residual(dsv, dc, pd, fns);
        },
        py::arg("dsv"), py::arg("dc"), py::arg("pd"), py::arg("test_exprs"));

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("n", &SweepRow::n)
      .def_readonly("m", &SweepRow::m)
      .def_readonly("cost", &SweepRow::cost)
      .def_readonly("energy_ratio", &SweepRow::energy_ratio)
      .def_readonly("trace_error_flux", &SweepRow::trace_error_flux)
      .def_readonly("trace_error_phase", &SweepRow::trace_error_phase)
      .def_readonly("lift_sup_error", &SweepRow::lift_sup_error)
      .def_readonly("ok", &SweepRow::ok)
      .def_readonly("error", &SweepRow::error);
  m.def("convergence_sweep",
        [](const ProblemData& pd, const ContinuousControl& truth, const std::vector<int>& ns,
           const std::function<int(int)>& m_of_n) {
          return convergence_sweep(pd, truth, ns, m_of_n).rows;
        },
        py::arg("pd"), py::arg("truth"), py::arg("n_list"), py::arg("m_of_n"));

  m.def("run_verify_suites",
        [](const ProblemData& pd, unsigned seed) {
          py::list out;
          for (const SuiteResult& r : run_verify_suites(pd, seed))
            out.append(py::make_tuple(r.name, r.passed, r.detail));
          return out;
        },
        py::arg("pd"), py::arg("seed") = 0);
}
