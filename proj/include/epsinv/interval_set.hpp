#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "epsinv/errors.hpp"
#include "epsinv/scalar.hpp"

namespace epsinv {

template <class S>
struct Interval {
  S lo;
  S hi;

  S length() const { return hi - lo; }
  bool operator==(const Interval&) const = default;
};

// Finite union of half-open subintervals [lo, hi) of the unit interval, kept
// canonical: sorted, pairwise disjoint, no empty parts, and adjacent parts
// merged.  Under this convention unions/intersections/complements are closed
// operations and measures add up exactly.
template <class S>
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet from_parts(std::vector<Interval<S>> parts) {
    for (auto& p : parts) {
      if (!scalar_traits<S>::finite(p.lo) || !scalar_traits<S>::finite(p.hi))
        throw NonFiniteSample("interval endpoint is not finite");
      if (!approx_leq(S(0), p.lo) || !approx_leq(p.hi, S(1)))
        throw DomainError("interval part leaves [0,1]");
      p.lo = smax(p.lo, S(0));
      p.hi = smin(p.hi, S(1));
    }
    std::sort(parts.begin(), parts.end(),
              [](const Interval<S>& a, const Interval<S>& b) {
                return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
              });
    IntervalSet out;
    for (const auto& p : parts) {
      if (approx_leq(p.hi, p.lo)) continue;  // degenerate
      if (!out.parts_.empty() && approx_leq(p.lo, out.parts_.back().hi)) {
        out.parts_.back().hi = smax(out.parts_.back().hi, p.hi);
      } else {
        out.parts_.push_back(p);
      }
    }
    return out;
  }

  static IntervalSet full() { return from_parts({{S(0), S(1)}}); }
  static IntervalSet empty_set() { return IntervalSet(); }

  const std::vector<Interval<S>>& parts() const { return parts_; }
  std::size_t size() const { return parts_.size(); }
  bool is_empty() const { return parts_.empty(); }

  S measure() const {
    S m(0);
    for (const auto& p : parts_) m += p.hi - p.lo;
    return m;
  }

  bool contains_point(const S& x) const {
    // Half-open membership: lo <= x < hi.
    auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                               [](const S& v, const Interval<S>& p) {
                                 return v < p.lo;
                               });
    if (it == parts_.begin()) return false;
    --it;
    return x >= it->lo && x < it->hi;
  }

  IntervalSet union_with(const IntervalSet& other) const {
    // Both inputs are canonical (sorted), so a linear merge beats re-sorting;
    // attractor levels union millions of parts.
    if (parts_.empty()) return other;
    if (other.parts_.empty()) return *this;
    // Fast path: one operand lies strictly after the other, as happens for
    // branch images of an ordered system — plain concatenation.
    if (!approx_leq(other.parts_.front().lo, parts_.back().hi))
      return concatenated(*this, other);
    if (!approx_leq(parts_.front().lo, other.parts_.back().hi))
      return concatenated(other, *this);
    IntervalSet out;
    out.parts_.reserve(parts_.size() + other.parts_.size());
    std::size_t i = 0, j = 0;
    auto push = [&](const Interval<S>& p) {
      if (!out.parts_.empty() && approx_leq(p.lo, out.parts_.back().hi)) {
        out.parts_.back().hi = smax(out.parts_.back().hi, p.hi);
      } else {
        out.parts_.push_back(p);
      }
    };
    while (i < parts_.size() || j < other.parts_.size()) {
      if (j >= other.parts_.size() ||
          (i < parts_.size() && parts_[i].lo <= other.parts_[j].lo)) {
        push(parts_[i++]);
      } else {
        push(other.parts_[j++]);
      }
    }
    return out;
  }

  IntervalSet intersect(const IntervalSet& other) const {
    std::vector<Interval<S>> out;
    std::size_t i = 0, j = 0;
    while (i < parts_.size() && j < other.parts_.size()) {
      const auto& a = parts_[i];
      const auto& b = other.parts_[j];
      S lo = smax(a.lo, b.lo);
      S hi = smin(a.hi, b.hi);
      if (lo < hi) out.push_back({lo, hi});
      // Advance whichever part ends first.
      if (a.hi < b.hi) {
        ++i;
      } else {
        ++j;
      }
    }
    return from_parts(std::move(out));
  }

  IntervalSet complement() const {
    std::vector<Interval<S>> out;
    S cursor(0);
    for (const auto& p : parts_) {
      if (!approx_leq(p.lo, cursor)) out.push_back({cursor, p.lo});
      cursor = p.hi;
    }
    if (!approx_leq(S(1), cursor)) out.push_back({cursor, S(1)});
    return from_parts(std::move(out));
  }

  IntervalSet set_difference(const IntervalSet& other) const {
    return intersect(other.complement());
  }

  bool contains(const IntervalSet& other) const {
    return intersect(other) == other;
  }

  // Image under x -> a*x + b, which maps intervals to intervals.  The image
  // must stay inside [0,1]; a decreasing map reverses endpoints, and the
  // result is re-expressed half-open (the discrepancy is a finite point set,
  // invisible to every measure we compute).
  IntervalSet affine_image(const S& a, const S& b) const {
    if (approx_zero(a)) throw DomainError("affine image with zero slope");
    if (parts_.empty()) return IntervalSet();
    // A strictly monotone affine map keeps a canonical part list canonical
    // (reversed when the slope is negative), so no re-sort is needed.
    if constexpr (scalar_traits<S>::exact) {
      // Exactness also rules out new degenerate or touching parts, and the
      // image extremes come from the extreme endpoints alone, so the whole
      // part loop is pure arithmetic.
      IntervalSet out;
      out.parts_.resize(parts_.size());
      if (a > S(0)) {
        for (std::size_t i = 0; i < parts_.size(); ++i)
          out.parts_[i] = {a * parts_[i].lo + b, a * parts_[i].hi + b};
      } else {
        for (std::size_t i = 0; i < parts_.size(); ++i) {
          const auto& p = parts_[parts_.size() - 1 - i];
          out.parts_[i] = {a * p.hi + b, a * p.lo + b};
        }
      }
      if (out.parts_.front().lo < S(0) || out.parts_.back().hi > S(1))
        throw RangeError("affine image leaves [0,1]");
      return out;
    } else {
      IntervalSet out;
      out.parts_.reserve(parts_.size());
      auto push = [&](S u, S v) {
        if (!approx_leq(S(0), u) || !approx_leq(v, S(1)))
          throw RangeError("affine image leaves [0,1]");
        Interval<S> p{smax(u, S(0)), smin(v, S(1))};
        if (approx_leq(p.hi, p.lo)) return;
        if (!out.parts_.empty() && approx_leq(p.lo, out.parts_.back().hi)) {
          out.parts_.back().hi = smax(out.parts_.back().hi, p.hi);
        } else {
          out.parts_.push_back(std::move(p));
        }
      };
      if (a > S(0)) {
        for (const auto& p : parts_) push(a * p.lo + b, a * p.hi + b);
      } else {
        for (auto it = parts_.rbegin(); it != parts_.rend(); ++it)
          push(a * it->hi + b, a * it->lo + b);
      }
      return out;
    }
  }

  bool operator==(const IntervalSet& other) const {
    if (parts_.size() != other.parts_.size()) return false;
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (!approx_eq(parts_[i].lo, other.parts_[i].lo)) return false;
      if (!approx_eq(parts_[i].hi, other.parts_[i].hi)) return false;
    }
    return true;
  }

 private:
  static IntervalSet concatenated(const IntervalSet& first,
                                  const IntervalSet& second) {
    IntervalSet out;
    out.parts_.reserve(first.parts_.size() + second.parts_.size());
    out.parts_.insert(out.parts_.end(), first.parts_.begin(), first.parts_.end());
    out.parts_.insert(out.parts_.end(), second.parts_.begin(), second.parts_.end());
    return out;
  }

  std::vector<Interval<S>> parts_;
};

}  // namespace epsinv
