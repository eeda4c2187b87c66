#pragma once

#include <cstdint>
#include <utility>

#include "epsinv/attractor.hpp"
#include "epsinv/json_io.hpp"
#include "epsinv/measures.hpp"
#include "epsinv/random_sets.hpp"

namespace epsinv {

// Attractor trace artifact; the decay verdict joins once three levels exist,
// since the heuristic is undefined on shorter traces.
template <class S>
json attractor_artifact(const AttractorTrace<S>& trace,
                        bool include_sets = false) {
  json artifact = trace_to_json(trace, include_sets);
  if (trace.levels.size() >= 3)
    artifact["verdict"] = to_string(measure_zero_verdict(trace));
  return artifact;
}

// Verification artifact for a cylinder measure: the density criterion, a
// seeded battery of the set criterion, and a bracket check that cylinder
// refinement pins the exact density value on every battery set.
template <class S>
json measure_verification(const CylinderMeasure<S>& measure, std::uint64_t seed,
                          std::size_t count, std::size_t grid,
                          std::size_t depth) {
  auto density = measure.density_equivalent();
  auto P = make_fp_operator(measure.system());
  Transformation<S> T(measure.system());
  bool density_ok =
      check_density_criterion(density.density(), P, measure.epsilon());
  auto battery = random_interval_battery<S>(seed, count, grid);
  auto report = check_set_criterion(density, T, measure.epsilon(), battery);

  bool consistent = true;
  S max_gap(0);
  for (const auto& A : battery) {
    auto [value, gap] = measure.nu_on_intervalset(A, depth);
    S exact = density.measure_of(A);
    if (!(approx_leq(value, exact) && approx_leq(exact, S(value + gap))))
      consistent = false;
    if (max_gap < gap) max_gap = gap;
  }
  return json{{"count", count},
              {"density_criterion_ok", density_ok},
              {"epsilon", scalar_to_json(measure.epsilon())},
              {"refinement", json{{"all_consistent", consistent},
                                  {"depth", depth},
                                  {"max_gap", scalar_to_json(max_gap)}}},
              {"seed", seed},
              {"set_criterion", set_report_to_json(report)}};
}

}  // namespace epsinv
