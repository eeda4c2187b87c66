#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "epsinv/branch_system.hpp"
#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/perron.hpp"
#include "epsinv/scalar.hpp"
#include "epsinv/step_function.hpp"

namespace epsinv {

template <class S>
struct AttractorLevel {
  std::size_t m = 0;
  IntervalSet<S> set;
  S measure{};
};

// The descending pre-attractor sets A_0 = [0,1), A_m = union of branch images
// of A_{m-1}, with their measures and successive measure ratios.
template <class S>
struct AttractorTrace {
  std::vector<AttractorLevel<S>> levels;
  std::vector<S> ratios;  // l(A_{m+1}) / l(A_m); 0 once the measure hits 0
};

enum class MeasureZeroVerdict { yes, no, inconclusive };

inline const char* to_string(MeasureZeroVerdict v) {
  switch (v) {
    case MeasureZeroVerdict::yes: return "yes";
    case MeasureZeroVerdict::no: return "no";
    default: return "inconclusive";
  }
}

// Iterates the set map one level at a time.  Part counts can grow like N^m,
// so growth is capped explicitly rather than silently approximated.
template <class S>
AttractorTrace<S> attractor_iterate(const BranchSystem<S>& system,
                                    std::size_t depth,
                                    std::size_t part_cap = 1000000) {
  if (!system.flags().c2_ok)
    throw InvalidSystem("attractor iteration needs pairwise disjoint branch images");
  AttractorTrace<S> trace;
  IntervalSet<S> start = IntervalSet<S>::full();
  S start_measure = start.measure();
  trace.levels.push_back({0, std::move(start), std::move(start_measure)});
  for (std::size_t m = 1; m <= depth; ++m) {
    IntervalSet<S> next;
    {
      const IntervalSet<S>& prev = trace.levels.back().set;
      bool first = true;
      for (const auto& b : system.branches()) {
        IntervalSet<S> img = prev.affine_image(b.alpha, b.beta);
        next = first ? std::move(img) : next.union_with(img);
        first = false;
      }
    }
    if (next.size() > part_cap)
      throw CapExceeded("attractor level exceeds interval part cap");
    S prev_measure = trace.levels.back().measure;
    S measure = next.measure();
    trace.ratios.push_back(approx_zero(prev_measure) ? S(0)
                                                     : S(measure / prev_measure));
    trace.levels.push_back({m, std::move(next), std::move(measure)});
  }
  return trace;
}

// Heuristic reading of the trace: "yes" when the deepest measure is already
// below tol or every ratio shows geometric decay; "no" when the measure never
// decreased at all; anything in between stays inconclusive.
template <class S>
MeasureZeroVerdict measure_zero_verdict(
    const AttractorTrace<S>& trace, const S& tol = S(1) / pow_int(S(10), 9),
    const S& ratio_bound = frac<S>(99, 100)) {
  if (trace.levels.size() < 3)
    throw InvalidInput("verdict needs at least 3 attractor levels");
  const S last = trace.levels.back().measure;
  if (last <= tol) return MeasureZeroVerdict::yes;
  bool all_decaying = true, none_decaying = true;
  for (const auto& r : trace.ratios) {
    if (!(r <= ratio_bound)) all_decaying = false;
    if (!approx_leq(S(1), r)) none_decaying = false;
  }
  if (all_decaying) return MeasureZeroVerdict::yes;
  if (none_decaying) return MeasureZeroVerdict::no;
  return MeasureZeroVerdict::inconclusive;
}

template <class S>
struct NormDecayRow {
  std::size_t m = 0;
  S iterated_norm{};    // l1 norm of P^m f
  S attractor_integral{};  // integral of f over A_m
  bool equal = false;
};

template <class S>
struct NormDecayReport {
  std::vector<NormDecayRow<S>> rows;
  bool all_equal = true;
};

// Checks the norm identity ||P^m f|| = integral of f over A_m level by level
// for nonnegative f; exact in rational mode.
template <class S>
NormDecayReport<S> norm_decay_check(const BranchSystem<S>& system,
                                    const StepFunction<S>& f, std::size_t depth,
                                    std::size_t part_cap = 1000000) {
  if (!approx_leq(S(0), f.min_value()))
    throw InvalidInput("norm identity needs a nonnegative function");
  AttractorTrace<S> trace = attractor_iterate(system, depth, part_cap);
  NormDecayReport<S> report;
  StepFunction<S> current = f;
  for (std::size_t m = 0; m <= depth; ++m) {
    NormDecayRow<S> row;
    row.m = m;
    row.iterated_norm = current.l1_norm();
    row.attractor_integral = f.integral(trace.levels[m].set);
    row.equal = approx_eq(row.iterated_norm, row.attractor_integral);
    report.all_equal = report.all_equal && row.equal;
    report.rows.push_back(std::move(row));
    if (m < depth) current = fp_apply(system, current);
  }
  return report;
}

// Sufficient condition for a measure-zero attractor in the affine setting:
// branch images with pairwise disjoint interiors (so they can be chained left
// to right inside [0,1]) whose union misses part of [0,1].  The uncovered gap
// forces the absolute slopes to sum below 1, hence geometric decay of l(A_m).
// Not claimed necessary.
template <class S>
bool affine_gap_condition(const BranchSystem<S>& system) {
  const auto& flags = system.flags();
  return flags.c2_ok && !flags.c1_ok;
}

}  // namespace epsinv
