#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "epsinv/branch_system.hpp"
#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/scalar.hpp"
#include "epsinv/step_function.hpp"

namespace epsinv {

// Grid-size control between operator iterations.  Only the inexact scalar
// mode ever coarsens; exact mode keeps every cell.
struct CoarsenPolicy {
  bool enabled = true;
  std::size_t trigger_cells = 65536;
  std::size_t target_cells = 4096;
};

enum class OperatorKind { affine_fp, general_fp, custom };

// Type-erased linear operator on step functions, carrying the two descriptor
// facts the solvers rely on: what kind of operator it is and whether it fixes
// the constant 1 (full transfer operators do; gap operators contract it).
template <class S>
struct OperatorHandle {
  std::function<StepFunction<S>(const StepFunction<S>&)> apply;
  OperatorKind kind = OperatorKind::custom;
  bool preserves_one = false;
  // Present for affine transfer operators; shared so the apply closure stays
  // valid across handle copies.
  std::shared_ptr<const BranchSystem<S>> system;
};

// Transfer operator application: (Pf)(x) = sum_n |alpha_n| * f(f_n(x)).
// Exact on step functions for affine branches.  Branch terms are summed in
// ascending branch order so inexact runs are reproducible.
template <class S>
StepFunction<S> fp_apply(const BranchSystem<S>& system, const StepFunction<S>& f) {
  if (!system.flags().c2_ok)
    throw InvalidSystem("transfer operator needs pairwise disjoint branch images");
  StepFunction<S> acc;
  for (const auto& b : system.branches())
    acc = acc.add(f.compose_affine(b.alpha, b.beta).scale(sabs(b.alpha)));
  return acc;
}

template <class S>
OperatorHandle<S> make_fp_operator(BranchSystem<S> system) {
  if (!system.flags().c2_ok)
    throw InvalidSystem("transfer operator needs pairwise disjoint branch images");
  OperatorHandle<S> handle;
  handle.kind = OperatorKind::affine_fp;
  handle.preserves_one = system.flags().c1_ok && system.flags().fprime_ok;
  handle.system = std::make_shared<const BranchSystem<S>>(std::move(system));
  handle.apply = [sys = handle.system](const StepFunction<S>& f) {
    return fp_apply(*sys, f);
  };
  return handle;
}

// Approximate transfer operator for non-affine branches: midpoint samples of
// sum_n |f_n'(x)| * f(f_n(x)) on a uniform M-cell grid.  Double mode only;
// the error vanishes as M grows for piecewise-continuous integrands.
inline StepFunction<double> fp_apply_general(const GeneralBranchSystem& system,
                                             const StepFunction<double>& f,
                                             std::size_t M) {
  if (M < 1) throw InvalidInput("grid size must be >= 1");
  if (!system.c2_ok())
    throw InvalidSystem("transfer operator needs pairwise disjoint branch images");
  std::vector<double> cuts, vals;
  cuts.reserve(M);
  vals.reserve(M);
  for (std::size_t j = 0; j < M; ++j) {
    double x = (static_cast<double>(j) + 0.5) / static_cast<double>(M);
    double total = 0.0;
    for (std::size_t n = 0; n < system.branch_count(); ++n) {
      const auto& b = system.branch(n);
      double d = b.deriv(x);
      double y = b.eval(x);
      if (!scalar_traits<double>::finite(d) || !scalar_traits<double>::finite(y))
        throw NonFiniteSample("general branch sample is not finite");
      total += std::abs(d) * f.evaluate(std::min(std::max(y, 0.0), 1.0));
    }
    cuts.push_back(static_cast<double>(j) / static_cast<double>(M));
    vals.push_back(total);
  }
  return StepFunction<double>::from_breakpoints(std::move(cuts), std::move(vals));
}

// P^m f with P^0 = identity; coarsening applied between iterations in
// inexact mode per policy.
template <class S>
StepFunction<S> iterate(const OperatorHandle<S>& P, StepFunction<S> f,
                        std::size_t m, const CoarsenPolicy& policy = {}) {
  for (std::size_t k = 0; k < m; ++k) {
    f = P.apply(f);
    if (!scalar_traits<S>::exact && policy.enabled &&
        f.cell_count() > policy.trigger_cells) {
      f = f.resample_average(policy.target_cells);
    }
  }
  return f;
}

// Defect of the duality relation int_A Pf = int_{S^-1(A)} f; identically zero
// for full affine systems in exact mode.
template <class S>
S adjoint_check(const BranchSystem<S>& system, const StepFunction<S>& f,
                const IntervalSet<S>& A) {
  if (!system.flags().c2_ok || !system.flags().c1_ok)
    throw InvalidSystem("duality check needs disjoint branch images covering [0,1]");
  Transformation<S> T(system);
  S lhs = fp_apply(system, f).integral(A);
  S rhs = f.integral(T.s_preimage(A));
  return sabs(S(lhs - rhs));
}

template <class S>
struct MarkovSampleCheck {
  bool nonnegative_input = false;
  bool positive_output = false;
  S output_norm{};
  S expected_norm{};
  bool norm_identity_ok = false;

  bool ok() const {
    return nonnegative_input && positive_output && norm_identity_ok;
  }
};

template <class S>
struct MarkovReport {
  std::vector<MarkovSampleCheck<S>> samples;
  bool all_ok = true;
};

// Markov-property audit: positivity of Pf and the norm identity for each
// nonnegative sample.  Full systems must preserve the L1 norm; affine gap
// systems must instead satisfy ||Pf|| = integral of f over the first-level
// image union.
template <class S>
MarkovReport<S> markov_check(const OperatorHandle<S>& P,
                             const std::vector<StepFunction<S>>& samples) {
  MarkovReport<S> report;
  for (const auto& f : samples) {
    MarkovSampleCheck<S> check;
    check.nonnegative_input = approx_leq(S(0), f.min_value());
    if (check.nonnegative_input) {
      StepFunction<S> pf = P.apply(f);
      check.positive_output = approx_leq(S(0), pf.min_value());
      check.output_norm = pf.l1_norm();
      if (P.kind == OperatorKind::affine_fp && P.system &&
          !(P.system->flags().c1_ok && P.system->flags().fprime_ok)) {
        check.expected_norm = f.integral(P.system->image_union());
      } else {
        check.expected_norm = f.l1_norm();
      }
      check.norm_identity_ok = approx_eq(check.output_norm, check.expected_norm);
    }
    report.all_ok = report.all_ok && check.ok();
    report.samples.push_back(std::move(check));
  }
  return report;
}

}  // namespace epsinv
