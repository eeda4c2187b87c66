// Python bindings.  Every operation speaks JSON text in the same artifact
// schema the command-line tool emits, so exact rationals cross the language
// boundary losslessly as "p/q" strings.  The `exact` submodule computes with
// rationals, `f64` with doubles; the Python package wraps both behind
// dict-in / dict-out helpers.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "epsinv/reports.hpp"
#include "epsinv/solver.hpp"

namespace py = pybind11;

namespace {

using epsinv::json;

template <class S>
S parse_scalar(const std::string& text) {
  return epsinv::scalar_from_json<S>(json(text));
}

template <class S>
epsinv::BranchSystem<S> load_system(const std::string& text) {
  return epsinv::system_from_json<S>(epsinv::parse_json_text(text));
}

template <class S>
epsinv::StepFunction<S> load_step(const std::string& text) {
  return epsinv::stepfunction_from_json<S>(epsinv::parse_json_text(text));
}

template <class S>
std::string validate_op(const std::string& system) {
  return epsinv::flags_to_json(load_system<S>(system).flags()).dump();
}

template <class S>
std::string apply_op(const std::string& system, const std::string& f,
                     std::size_t power) {
  auto P = epsinv::make_fp_operator(load_system<S>(system));
  return epsinv::stepfunction_to_json(
             epsinv::iterate(P, load_step<S>(f), power))
      .dump();
}

template <class S>
std::string solve_op(const std::string& system, const std::string& g,
                     const std::string& method, const std::string& solve_mode,
                     const std::string& tol, std::size_t max_iters,
                     bool strict_zero_integral) {
  epsinv::SolveOptions<S> opts;
  if (!tol.empty()) opts.tol = parse_scalar<S>(tol);
  opts.max_iters = max_iters;
  opts.mode = solve_mode == "unique" ? epsinv::SolveMode::unique
                                     : epsinv::SolveMode::family;
  opts.strict_zero_integral = strict_zero_integral;
  auto P = epsinv::make_fp_operator(load_system<S>(system));
  auto rhs = load_step<S>(g);
  auto result = method == "cesaro" ? epsinv::solve_cesaro(P, rhs, opts)
                                   : epsinv::solve_neumann(P, rhs, opts);
  return epsinv::solveresult_to_json(result).dump();
}

template <class S>
std::string attractor_op(const std::string& system, std::size_t depth,
                         std::size_t part_cap, bool include_sets) {
  auto trace = epsinv::attractor_iterate(load_system<S>(system), depth, part_cap);
  return epsinv::attractor_artifact(trace, include_sets).dump();
}

template <class S>
std::string cylinder_op(const std::string& measure,
                        const std::vector<std::size_t>& symbols) {
  auto m = epsinv::cylinder_spec_from_json<S>(epsinv::parse_json_text(measure));
  epsinv::Word w{symbols};
  auto cell = m.cylinder(w);
  return json{{"word", w.symbols},
              {"lo", epsinv::scalar_to_json(cell.lo)},
              {"hi", epsinv::scalar_to_json(cell.hi)},
              {"nu0", epsinv::scalar_to_json(m.nu0(w))}}
      .dump();
}

template <class S>
std::string measure_verify_op(const std::string& measure, std::uint64_t seed,
                              std::size_t count, std::size_t grid,
                              std::size_t depth) {
  auto m = epsinv::cylinder_spec_from_json<S>(epsinv::parse_json_text(measure));
  return epsinv::measure_verification(m, seed, count, grid, depth).dump();
}

template <class S>
std::string build_g_orthogonal_op(const std::string& system,
                                  const std::string& g0,
                                  const std::string& epsilon) {
  auto sys = load_system<S>(system);
  auto g = epsinv::build_g_orthogonal(sys, load_step<S>(g0),
                                      parse_scalar<S>(epsilon));
  return epsinv::stepfunction_to_json(g).dump();
}

template <class S>
std::string build_g_piecewise_op(const std::string& system,
                                 const std::vector<std::string>& gammas) {
  auto sys = load_system<S>(system);
  std::vector<S> values;
  values.reserve(gammas.size());
  for (const auto& t : gammas) values.push_back(parse_scalar<S>(t));
  auto [g, density] = epsinv::build_g_piecewise(sys, values);
  return json{{"g", epsinv::stepfunction_to_json(g)},
              {"density", epsinv::stepfunction_to_json(density.density())}}
      .dump();
}

template <class S>
void bind_backend(py::module_& m) {
  m.def("validate", &validate_op<S>, py::arg("system"),
        "structural flags of a branch system");
  m.def("apply_operator", &apply_op<S>, py::arg("system"), py::arg("f"),
        py::arg("power") = 1, "apply a power of the transfer operator");
  m.def("solve", &solve_op<S>, py::arg("system"), py::arg("g"),
        py::arg("method") = "neumann", py::arg("solve_mode") = "family",
        py::arg("tol") = "", py::arg("max_iters") = 10000,
        py::arg("strict_zero_integral") = false,
        "solve phi = P phi + g by series summation");
  m.def("attractor", &attractor_op<S>, py::arg("system"), py::arg("depth"),
        py::arg("part_cap") = 1000000, py::arg("include_sets") = false,
        "iterate branch images and trace level measures");
  m.def("cylinder", &cylinder_op<S>, py::arg("measure"), py::arg("word"),
        "cylinder interval and mass for one branch word");
  m.def("measure_verify", &measure_verify_op<S>, py::arg("measure"),
        py::arg("seed") = 1, py::arg("count") = 100, py::arg("grid") = 256,
        py::arg("depth") = 6,
        "density criterion, seeded set-criterion battery, refinement bracket");
  m.def("build_g_orthogonal", &build_g_orthogonal_op<S>, py::arg("system"),
        py::arg("g0"), py::arg("epsilon"),
        "extend a seed so the transfer operator annihilates it");
  m.def("build_g_piecewise", &build_g_piecewise_op<S>, py::arg("system"),
        py::arg("gammas"),
        "branchwise-constant annihilated g and its invariant density");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Transfer operators of piecewise affine interval maps: series solvers, "
      "attractor traces, and epsilon-invariant measures.  All operations "
      "exchange JSON text; rational scalars travel as \"p/q\" strings.";
  auto base = py::register_exception<epsinv::Error>(m, "Error");
  py::register_exception<epsinv::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<epsinv::RangeError>(m, "RangeError", base.ptr());
  py::register_exception<epsinv::InvalidInput>(m, "InvalidInput", base.ptr());
  py::register_exception<epsinv::InvalidSystem>(m, "InvalidSystem", base.ptr());
  py::register_exception<epsinv::HypothesisViolated>(m, "HypothesisViolated",
                                                     base.ptr());
  py::register_exception<epsinv::CapExceeded>(m, "CapExceeded", base.ptr());
  py::register_exception<epsinv::NonFiniteSample>(m, "NonFiniteSample",
                                                  base.ptr());

  auto exact = m.def_submodule("exact", "exact rational arithmetic");
  bind_backend<epsinv::Rational>(exact);
  auto f64 = m.def_submodule("f64", "double precision arithmetic");
  bind_backend<double>(f64);
}
