#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/scalar.hpp"

namespace epsinv {

// One affine branch f(x) = alpha*x + beta mapping [0,1] into itself with
// nonzero slope.  The slope doubles as the branch derivative.
template <class S>
struct AffineBranch {
  S alpha;
  S beta;

  S apply(const S& x) const { return alpha * x + beta; }
  S inverse(const S& x) const { return (x - beta) / alpha; }

  // Endpoint images; lo/hi of the branch image regardless of orientation.
  S at0() const { return beta; }
  S at1() const { return alpha + beta; }
  S image_lo() const { return smin(at0(), at1()); }
  S image_hi() const { return smax(at0(), at1()); }
};

struct SystemFlags {
  bool c2_ok = false;      // open branch images pairwise disjoint
  bool c1_ok = false;      // closed branch images cover [0,1]
  bool fprime_ok = false;  // absolute slopes sum to 1

  bool full() const { return c2_ok && c1_ok && fprime_ok; }
};

// A finite family of affine branches f_1,...,f_N of the unit interval.  The
// flags record which structural conditions hold; operations state which flags
// they require.  Immutable after construction.
template <class S>
class BranchSystem {
 public:
  static BranchSystem from_branches(std::vector<AffineBranch<S>> branches) {
    const S tol = scalar_traits<S>::tolerance();
    if (branches.empty()) throw InvalidInput("branch system needs >= 1 branch");
    for (const auto& b : branches) {
      if (!scalar_traits<S>::finite(b.alpha) || !scalar_traits<S>::finite(b.beta))
        throw NonFiniteSample("branch coefficient is not finite");
      if (approx_zero(b.alpha)) throw InvalidInput("branch slope must be nonzero");
      if (b.image_lo() < S(0) - tol || b.image_hi() > S(1) + tol)
        throw InvalidInput("branch image leaves [0,1]");
    }
    return BranchSystem(std::move(branches));
  }

  // The canonical full family for given nonzero slopes summing to 1 in
  // absolute value: intercepts are chosen so the branch images tile [0,1)
  // left to right, each branch keeping its requested orientation.
  static BranchSystem full_affine(const std::vector<S>& alphas) {
    if (alphas.empty()) throw InvalidInput("need at least one slope");
    S total(0);
    for (const auto& a : alphas) {
      if (approx_zero(a)) throw InvalidInput("slope must be nonzero");
      total += sabs(a);
    }
    if (!approx_eq(total, S(1)))
      throw InvalidInput("absolute slopes must sum to 1");
    std::vector<AffineBranch<S>> branches;
    branches.reserve(alphas.size());
    S prefix(0);
    for (const auto& a : alphas) {
      prefix += sabs(a);
      // beta_n = sum_{k<=n} |alpha_k| - (|alpha_n| + alpha_n)/2: equals the
      // left end of the n-th slot for increasing branches, the right end for
      // decreasing ones.
      S beta = prefix - (sabs(a) + a) / S(2);
      branches.push_back({a, beta});
    }
    return BranchSystem(std::move(branches));
  }

  std::size_t branch_count() const { return branches_.size(); }
  const AffineBranch<S>& branch(std::size_t i) const { return branches_.at(i); }
  const std::vector<AffineBranch<S>>& branches() const { return branches_; }

  IntervalSet<S> image(std::size_t i) const {
    return IntervalSet<S>::full().affine_image(branches_.at(i).alpha,
                                               branches_.at(i).beta);
  }

  IntervalSet<S> image_union() const {
    IntervalSet<S> u;
    for (std::size_t i = 0; i < branches_.size(); ++i)
      u = u.union_with(image(i));
    return u;
  }

  // [0,1) minus the open branch images — where the transformation sends
  // points to 0.
  IntervalSet<S> residual_set() const { return image_union().complement(); }

  const SystemFlags& flags() const { return flags_; }

 private:
  explicit BranchSystem(std::vector<AffineBranch<S>> branches)
      : branches_(std::move(branches)) {
    flags_.fprime_ok = [&] {
      S total(0);
      for (const auto& b : branches_) total += sabs(b.alpha);
      return approx_eq(total, S(1));
    }();
    flags_.c1_ok = (image_union() == IntervalSet<S>::full());
    flags_.c2_ok = [&] {
      for (std::size_t i = 0; i < branches_.size(); ++i)
        for (std::size_t j = i + 1; j < branches_.size(); ++j)
          if (!image(i).intersect(image(j)).is_empty()) return false;
      return true;
    }();
  }

  std::vector<AffineBranch<S>> branches_;
  SystemFlags flags_;
};

template <class S>
SystemFlags validate(const BranchSystem<S>& system) {
  return system.flags();
}

// The transformation induced by a branch family: S(x) = f_n^{-1}(x) when x
// lies strictly inside a branch image, 0 on the residual set.  Disjoint open
// images (c2) make this single-valued.
template <class S>
class Transformation {
 public:
  explicit Transformation(BranchSystem<S> system) : system_(std::move(system)) {
    if (!system_.flags().c2_ok)
      throw InvalidSystem("transformation needs pairwise disjoint branch images");
  }

  const BranchSystem<S>& system() const { return system_; }

  S s_apply(const S& x) const {
    const S tol = scalar_traits<S>::tolerance();
    if (x < S(0) - tol || x >= S(1) + tol)
      throw DomainError("transformation argument outside [0,1)");
    for (const auto& b : system_.branches()) {
      // Strictly inside the open image; boundary points fall through to 0.
      if (b.image_lo() < x && x < b.image_hi()) return b.inverse(x);
    }
    return S(0);
  }

  // Preimage of an interval set: the union of branch images of A, plus the
  // residual set when 0 lies in A (the residual set maps to 0 wholesale).
  IntervalSet<S> s_preimage(const IntervalSet<S>& A) const {
    IntervalSet<S> out;
    for (const auto& b : system_.branches())
      out = out.union_with(A.affine_image(b.alpha, b.beta));
    if (A.contains_point(S(0))) out = out.union_with(system_.residual_set());
    return out;
  }

 private:
  BranchSystem<S> system_;
};

// Non-affine strictly monotone branch for the approximate (double-only)
// operator path.  Callables must be pure; validation is a spot check on a
// uniform grid since strict monotonicity is not decidable from a callable.
struct GeneralBranch {
  std::function<double(double)> eval;
  std::function<double(double)> deriv;
  bool increasing = true;
};

class GeneralBranchSystem {
 public:
  static GeneralBranchSystem from_branches(std::vector<GeneralBranch> branches,
                                           std::size_t grid = 1024) {
    if (branches.empty()) throw InvalidInput("branch system needs >= 1 branch");
    if (grid < 2) throw InvalidInput("validation grid needs >= 2 points");
    for (const auto& b : branches) {
      if (!b.eval || !b.deriv) throw InvalidInput("general branch needs callables");
      double prev = b.eval(0.0);
      check_sample(prev);
      for (std::size_t k = 1; k <= grid; ++k) {
        double x = static_cast<double>(k) / static_cast<double>(grid);
        double y = b.eval(x);
        check_sample(y);
        if (y < -1e-9 || y > 1.0 + 1e-9)
          throw InvalidInput("general branch leaves [0,1]");
        if (b.increasing ? (y <= prev) : (y >= prev))
          throw InvalidInput("general branch is not strictly monotone on grid");
        double d = b.deriv(x - 0.5 / static_cast<double>(grid));
        check_sample(d);
        if (b.increasing ? (d <= 0.0) : (d >= 0.0))
          throw InvalidInput("general branch derivative sign mismatch");
        prev = y;
      }
    }
    return GeneralBranchSystem(std::move(branches));
  }

  std::size_t branch_count() const { return branches_.size(); }
  const GeneralBranch& branch(std::size_t i) const { return branches_.at(i); }

  // Open images pairwise disjoint, decided from endpoint samples.
  bool c2_ok() const {
    std::vector<std::pair<double, double>> spans;
    for (const auto& b : branches_) {
      double u = b.eval(0.0), v = b.eval(1.0);
      spans.emplace_back(std::min(u, v), std::max(u, v));
    }
    for (std::size_t i = 0; i < spans.size(); ++i)
      for (std::size_t j = i + 1; j < spans.size(); ++j) {
        double lo = std::max(spans[i].first, spans[j].first);
        double hi = std::min(spans[i].second, spans[j].second);
        if (hi - lo > 1e-9) return false;
      }
    return true;
  }

 private:
  static void check_sample(double v) {
    if (!scalar_traits<double>::finite(v))
      throw NonFiniteSample("general branch sample is not finite");
  }

  explicit GeneralBranchSystem(std::vector<GeneralBranch> branches)
      : branches_(std::move(branches)) {}

  std::vector<GeneralBranch> branches_;
};

}  // namespace epsinv
