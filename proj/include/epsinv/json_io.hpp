#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "epsinv/attractor.hpp"
#include "epsinv/branch_system.hpp"
#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/measures.hpp"
#include "epsinv/scalar.hpp"
#include "epsinv/solver.hpp"
#include "epsinv/step_function.hpp"

namespace epsinv {

using nlohmann::json;

// Every scalar is serialized as a string: "p/q" in exact mode, 17 significant
// digits in double mode.  Both survive a round trip bit-for-bit, and the
// resulting JSON is byte-identical across runs (keys are stored sorted).
template <class S>
json scalar_to_json(const S& x) {
  return scalar_traits<S>::to_string(x);
}

template <class S>
S scalar_from_json(const json& j) {
  try {
    if (j.is_string()) return scalar_traits<S>::parse(j.get<std::string>());
    if (j.is_number_integer())
      return S(static_cast<long long>(j.get<std::int64_t>()));
    if (j.is_number()) {
      // Plain JSON floats are read through their shortest decimal form, which
      // in exact mode yields the rational the user typed (e.g. 0.1 -> 1/10).
      return scalar_traits<S>::parse(j.dump());
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InvalidInput(std::string("bad scalar: ") + e.what());
  }
  throw InvalidInput("scalar must be a string or number: " + j.dump());
}

template <class S>
json intervalset_to_json(const IntervalSet<S>& set) {
  json parts = json::array();
  for (const auto& p : set.parts())
    parts.push_back(json::array({scalar_to_json(p.lo), scalar_to_json(p.hi)}));
  return json{{"parts", std::move(parts)}};
}

template <class S>
IntervalSet<S> intervalset_from_json(const json& j) {
  if (!j.is_object() || !j.contains("parts") || !j["parts"].is_array())
    throw InvalidInput("interval set needs a \"parts\" array");
  std::vector<Interval<S>> parts;
  for (const auto& p : j["parts"]) {
    if (!p.is_array() || p.size() != 2)
      throw InvalidInput("interval part must be a [lo, hi] pair");
    parts.push_back({scalar_from_json<S>(p[0]), scalar_from_json<S>(p[1])});
  }
  return IntervalSet<S>::from_parts(std::move(parts));
}

template <class S>
json stepfunction_to_json(const StepFunction<S>& f) {
  json cuts = json::array(), vals = json::array();
  for (const auto& b : f.breakpoints()) cuts.push_back(scalar_to_json(b));
  for (const auto& v : f.values()) vals.push_back(scalar_to_json(v));
  return json{{"breakpoints", std::move(cuts)}, {"values", std::move(vals)}};
}

template <class S>
StepFunction<S> stepfunction_from_json(const json& j) {
  if (!j.is_object() || !j.contains("breakpoints") || !j.contains("values") ||
      !j["breakpoints"].is_array() || !j["values"].is_array())
    throw InvalidInput(
        "step function needs \"breakpoints\" and \"values\" arrays");
  std::vector<S> cuts, vals;
  for (const auto& b : j["breakpoints"]) cuts.push_back(scalar_from_json<S>(b));
  for (const auto& v : j["values"]) vals.push_back(scalar_from_json<S>(v));
  return StepFunction<S>::from_breakpoints(std::move(cuts), std::move(vals));
}

template <class S>
json system_to_json(const BranchSystem<S>& system) {
  json branches = json::array();
  for (const auto& b : system.branches())
    branches.push_back(json{{"alpha", scalar_to_json(b.alpha)},
                            {"beta", scalar_to_json(b.beta)}});
  return json{{"branches", std::move(branches)}};
}

template <class S>
BranchSystem<S> system_from_json(const json& j) {
  if (j.is_object() && j.value("general", false))
    throw InvalidInput(
        "general (non-affine) branches have no JSON form; use the library API");
  if (!j.is_object() || !j.contains("branches") || !j["branches"].is_array())
    throw InvalidInput("branch system needs a \"branches\" array");
  std::vector<AffineBranch<S>> branches;
  for (const auto& b : j["branches"]) {
    if (!b.is_object() || !b.contains("alpha") || !b.contains("beta"))
      throw InvalidInput("branch needs \"alpha\" and \"beta\"");
    branches.push_back(
        {scalar_from_json<S>(b["alpha"]), scalar_from_json<S>(b["beta"])});
  }
  return BranchSystem<S>::from_branches(std::move(branches));
}

inline json flags_to_json(const SystemFlags& flags) {
  return json{{"c1_ok", flags.c1_ok},
              {"c2_ok", flags.c2_ok},
              {"fprime_ok", flags.fprime_ok}};
}

template <class S>
json solveresult_to_json(const SolveResult<S>& result) {
  return json{{"phi", stepfunction_to_json(result.phi)},
              {"status", to_string(result.status)},
              {"residual", scalar_to_json(result.residual)},
              {"iterations", result.iterations},
              {"family", result.family}};
}

template <class S>
SolveResult<S> solveresult_from_json(const json& j) {
  if (!j.is_object() || !j.contains("phi") || !j.contains("status") ||
      !j.contains("residual") || !j.contains("iterations") || !j.contains("family"))
    throw InvalidInput("solve result is missing fields");
  SolveResult<S> result;
  result.phi = stepfunction_from_json<S>(j["phi"]);
  std::string status = j["status"].get<std::string>();
  if (status == "converged") {
    result.status = SolveStatus::converged;
  } else if (status == "no_solution_detected") {
    result.status = SolveStatus::no_solution_detected;
  } else if (status == "max_iters") {
    result.status = SolveStatus::max_iters;
  } else {
    throw InvalidInput("unknown solve status: " + status);
  }
  result.residual = scalar_from_json<S>(j["residual"]);
  result.iterations = j["iterations"].get<std::size_t>();
  result.family = j["family"].get<bool>();
  return result;
}

// Cylinder measure spec {"alphas": [...], "epsilon": ..., "p": 1, "q": 2}
// (p and q are 1-based branch indices).
template <class S>
json cylinder_spec_to_json(const CylinderMeasure<S>& m) {
  json alphas = json::array();
  for (const auto& a : m.alphas()) alphas.push_back(scalar_to_json(a));
  return json{{"alphas", std::move(alphas)},
              {"epsilon", scalar_to_json(m.epsilon())},
              {"p", m.p()},
              {"q", m.q()}};
}

template <class S>
CylinderMeasure<S> cylinder_spec_from_json(const json& j) {
  if (!j.is_object() || !j.contains("alphas") || !j["alphas"].is_array() ||
      !j.contains("epsilon") || !j.contains("p") || !j.contains("q"))
    throw InvalidInput(
        "cylinder spec needs \"alphas\", \"epsilon\", \"p\", \"q\"");
  std::vector<S> alphas;
  for (const auto& a : j["alphas"]) alphas.push_back(scalar_from_json<S>(a));
  return CylinderMeasure<S>(std::move(alphas), scalar_from_json<S>(j["epsilon"]),
                            j["p"].get<std::size_t>(), j["q"].get<std::size_t>());
}

template <class S>
json trace_to_json(const AttractorTrace<S>& trace, bool include_sets = false) {
  json levels = json::array();
  for (const auto& lv : trace.levels) {
    json entry{{"m", lv.m}, {"measure", scalar_to_json(lv.measure)}};
    if (include_sets) entry["set"] = intervalset_to_json(lv.set);
    levels.push_back(std::move(entry));
  }
  json ratios = json::array();
  for (const auto& r : trace.ratios) ratios.push_back(scalar_to_json(r));
  return json{{"levels", std::move(levels)}, {"ratios", std::move(ratios)}};
}

// CSV rows (m, measure) for external plotting.
template <class S>
std::string trace_to_csv(const AttractorTrace<S>& trace) {
  std::ostringstream out;
  out << "m,measure\n";
  for (const auto& lv : trace.levels)
    out << lv.m << "," << scalar_traits<S>::to_string(lv.measure) << "\n";
  return out.str();
}

template <class S>
json set_report_to_json(const SetCriterionReport<S>& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    entries.push_back(json{{"set", intervalset_to_json(e.set)},
                           {"discrepancy", scalar_to_json(e.discrepancy)},
                           {"bound", scalar_to_json(e.bound)},
                           {"ok", e.ok}});
  }
  json out{{"entries", std::move(entries)},
           {"all_ok", report.all_ok},
           {"worst_ratio", scalar_traits<double>::to_string(report.worst_ratio)}};
  if (report.worst_index) {
    out["worst_index"] = *report.worst_index;
    out["witness"] =
        intervalset_to_json(report.entries[*report.worst_index].set);
  }
  return out;
}

inline json parse_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InvalidInput("malformed JSON");
  return j;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_json_text(buffer.str());
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write file: " + path);
  out << text;
  if (!out) throw InvalidInput("write failed: " + path);
}

inline void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace epsinv
