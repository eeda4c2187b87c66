#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/scalar.hpp"

namespace epsinv {

// Piecewise-constant (step) function on [0,1), the working density class:
// cell i is [breakpoints[i], breakpoints[i+1]) with value values[i], and the
// final cell ends at 1.  Canonical form: breakpoints start at 0, strictly
// increase, and adjacent cells with equal values are merged.  All algebra is
// done on a merged grid with midpoint evaluation, which is exact for step
// functions.
template <class S>
class StepFunction {
 public:
  StepFunction() : breakpoints_{S(0)}, values_{S(0)} {}

  static StepFunction from_breakpoints(std::vector<S> breakpoints,
                                       std::vector<S> values) {
    const S tol = scalar_traits<S>::tolerance();
    if (breakpoints.empty() || breakpoints.size() != values.size())
      throw InvalidInput("breakpoints/values size mismatch");
    for (const auto& v : values)
      if (!scalar_traits<S>::finite(v))
        throw NonFiniteSample("step value is not finite");
    for (const auto& b : breakpoints)
      if (!scalar_traits<S>::finite(b))
        throw NonFiniteSample("breakpoint is not finite");
    if (!approx_zero(breakpoints.front()))
      throw InvalidInput("first breakpoint must be 0");
    breakpoints.front() = S(0);
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
      if (breakpoints[i] - breakpoints[i - 1] <= tol)
        throw InvalidInput("breakpoints must strictly increase");
    }
    if (breakpoints.back() >= S(1) - tol && breakpoints.size() > 1)
      throw InvalidInput("breakpoints must stay below 1");
    StepFunction out;
    out.breakpoints_.clear();
    out.values_.clear();
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
      if (!out.values_.empty() && approx_eq(out.values_.back(), values[i]))
        continue;  // merge equal-valued neighbours
      out.breakpoints_.push_back(breakpoints[i]);
      out.values_.push_back(values[i]);
    }
    return out;
  }

  static StepFunction constant(const S& c) {
    return from_breakpoints({S(0)}, {c});
  }

  static StepFunction indicator(const IntervalSet<S>& set) {
    std::vector<S> cuts{S(0)};
    for (const auto& p : set.parts()) {
      if (p.lo > S(0)) cuts.push_back(p.lo);
      if (p.hi < S(1)) cuts.push_back(p.hi);
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<S> vals;
    vals.reserve(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      S hi = (i + 1 < cuts.size()) ? cuts[i + 1] : S(1);
      S mid = (cuts[i] + hi) / S(2);
      vals.push_back(set.contains_point(mid) ? S(1) : S(0));
    }
    return from_breakpoints(std::move(cuts), std::move(vals));
  }

  const std::vector<S>& breakpoints() const { return breakpoints_; }
  const std::vector<S>& values() const { return values_; }
  std::size_t cell_count() const { return values_.size(); }

  S evaluate(const S& x) const {
    const S tol = scalar_traits<S>::tolerance();
    if (x < S(0) - tol || x >= S(1) + tol)
      throw DomainError("evaluation point outside [0,1)");
    return values_[cell_index(smin(smax(x, S(0)), S(1)))];
  }

  StepFunction add(const StepFunction& other) const {
    return combine(other, [](const S& a, const S& b) { return a + b; });
  }

  StepFunction subtract(const StepFunction& other) const {
    return combine(other, [](const S& a, const S& b) { return a - b; });
  }

  StepFunction multiply(const StepFunction& other) const {
    return combine(other, [](const S& a, const S& b) { return a * b; });
  }

  StepFunction scale(const S& c) const {
    std::vector<S> vals = values_;
    for (auto& v : vals) v = v * c;
    return from_breakpoints(breakpoints_, std::move(vals));
  }

  StepFunction abs_value() const {
    std::vector<S> vals = values_;
    for (auto& v : vals) v = sabs(v);
    return from_breakpoints(breakpoints_, std::move(vals));
  }

  S integral() const {
    S total(0);
    for (std::size_t i = 0; i < values_.size(); ++i)
      total += values_[i] * (cell_end(i) - breakpoints_[i]);
    return total;
  }

  S integral(const IntervalSet<S>& set) const {
    // Two-pointer sweep over cells and set parts, accumulating
    // value * overlap length.
    S total(0);
    std::size_t i = 0, j = 0;
    const auto& parts = set.parts();
    while (i < values_.size() && j < parts.size()) {
      S clo = breakpoints_[i], chi = cell_end(i);
      S lo = smax(clo, parts[j].lo);
      S hi = smin(chi, parts[j].hi);
      if (lo < hi) total += values_[i] * (hi - lo);
      if (chi < parts[j].hi) {
        ++i;
      } else {
        ++j;
      }
    }
    return total;
  }

  S l1_norm() const { return abs_value().integral(); }

  S sup_norm() const {
    S m(0);
    for (const auto& v : values_) m = smax(m, sabs(v));
    return m;
  }

  S min_value() const {
    S m = values_.front();
    for (const auto& v : values_) m = smin(m, v);
    return m;
  }

  bool ae_leq_abs(const S& bound) const {
    for (const auto& v : values_)
      if (!approx_leq(sabs(v), bound)) return false;
    return true;
  }

  // x -> f(a*x + b) on [0,1).  The affine argument must keep a.e. x inside
  // the unit interval; new breakpoints are the preimages of f's breakpoints.
  StepFunction compose_affine(const S& a, const S& b) const {
    if (approx_zero(a)) throw DomainError("affine composition with zero slope");
    const S tol = scalar_traits<S>::tolerance();
    S at0 = b, at1 = a + b;
    if (smin(at0, at1) < S(0) - tol || smax(at0, at1) > S(1) + tol)
      throw RangeError("affine composition leaves [0,1]");
    std::vector<S> cuts{S(0)};
    for (const auto& c : breakpoints_) {
      S t = (c - b) / a;
      if (t > tol && t < S(1) - tol) cuts.push_back(t);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](const S& u, const S& v) {
                             return approx_eq(u, v);
                           }),
               cuts.end());
    std::vector<S> vals;
    vals.reserve(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      S hi = (i + 1 < cuts.size()) ? cuts[i + 1] : S(1);
      S arg = a * ((cuts[i] + hi) / S(2)) + b;
      vals.push_back(values_[cell_index(smin(smax(arg, S(0)), S(1)))]);
    }
    return from_breakpoints(std::move(cuts), std::move(vals));
  }

  // Conservative grid-size control for the inexact mode: resample onto a
  // uniform grid using per-cell averages, which preserves the total integral.
  StepFunction resample_average(std::size_t cells) const {
    if (cells == 0) throw InvalidInput("resample with zero cells");
    std::vector<S> cuts, vals;
    cuts.reserve(cells);
    vals.reserve(cells);
    for (std::size_t j = 0; j < cells; ++j) {
      S lo = S(static_cast<long long>(j)) / S(static_cast<long long>(cells));
      S hi = S(static_cast<long long>(j + 1)) / S(static_cast<long long>(cells));
      IntervalSet<S> cell = IntervalSet<S>::from_parts({{lo, hi}});
      cuts.push_back(lo);
      vals.push_back(integral(cell) / (hi - lo));
    }
    return from_breakpoints(std::move(cuts), std::move(vals));
  }

  bool operator==(const StepFunction& other) const {
    if (values_.size() != other.values_.size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!approx_eq(breakpoints_[i], other.breakpoints_[i])) return false;
      if (!approx_eq(values_[i], other.values_[i])) return false;
    }
    return true;
  }

 private:
  std::size_t cell_index(const S& x) const {
    // Last breakpoint <= x; x == 1 lands in the final cell.
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  }

  S cell_end(std::size_t i) const {
    return (i + 1 < breakpoints_.size()) ? breakpoints_[i + 1] : S(1);
  }

  template <class Op>
  StepFunction combine(const StepFunction& other, Op op) const {
    std::vector<S> cuts;
    cuts.reserve(breakpoints_.size() + other.breakpoints_.size());
    std::merge(breakpoints_.begin(), breakpoints_.end(),
               other.breakpoints_.begin(), other.breakpoints_.end(),
               std::back_inserter(cuts));
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](const S& u, const S& v) {
                             return approx_eq(u, v);
                           }),
               cuts.end());
    std::vector<S> vals;
    vals.reserve(cuts.size());
    for (std::size_t i = 0; i < cuts.size(); ++i) {
      S hi = (i + 1 < cuts.size()) ? cuts[i + 1] : S(1);
      S mid = (cuts[i] + hi) / S(2);
      vals.push_back(op(values_[cell_index(mid)],
                        other.values_[other.cell_index(mid)]));
    }
    return from_breakpoints(std::move(cuts), std::move(vals));
  }

  std::vector<S> breakpoints_;
  std::vector<S> values_;
};

}  // namespace epsinv
