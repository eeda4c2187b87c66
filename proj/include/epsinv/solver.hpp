#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epsinv/errors.hpp"
#include "epsinv/perron.hpp"
#include "epsinv/scalar.hpp"
#include "epsinv/step_function.hpp"

namespace epsinv {

enum class SolveMethod { neumann, cesaro };

// family: solutions come as {phi + c}; requires an operator fixing constants.
// unique: caller asserts the contraction regime (P^m f -> 0), single solution.
enum class SolveMode { family, unique };

enum class SolveStatus { converged, no_solution_detected, max_iters };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::no_solution_detected: return "no_solution_detected";
    default: return "max_iters";
  }
}

template <class S>
struct SolveOptions {
  S tol = S(1) / pow_int(S(10), 10);
  std::size_t stall_window = 5;
  std::size_t max_iters = 10000;
  CoarsenPolicy coarsen;
  SolveMode mode = SolveMode::family;
  // With strict checking a right-hand side with nonzero mean is rejected;
  // otherwise it is only recorded in the result.
  bool strict_zero_integral = false;
  S divergence_cap = pow_int(S(10), 9);
};

template <class S>
struct SolveResult {
  StepFunction<S> phi;  // the particular (c = 0) solution representative
  SolveStatus status = SolveStatus::max_iters;
  S residual{};
  std::size_t iterations = 0;
  bool family = false;
  bool zero_integral_ok = true;
  // l1 norms of the series terms P^k g (Neumann) / of the successive
  // increments (Cesaro), for tail diagnostics.
  std::vector<S> term_norms;
  // Geometric tail bound sup|g| * theta^(m+1) / (1-theta) for affine systems
  // whose absolute slopes sum to theta < 1.
  std::optional<S> tail_bound;
};

// Necessary condition for solvability: the right-hand side must integrate
// to zero.
template <class S>
bool check_zero_integral(const StepFunction<S>& g) {
  return approx_zero(g.integral());
}

// Defect of the fixed-point equation phi = P phi + g, the a posteriori
// certificate every solver result is measured by.
template <class S>
S residual(const OperatorHandle<S>& P, const StepFunction<S>& phi,
           const StepFunction<S>& g) {
  return phi.subtract(P.apply(phi)).subtract(g).l1_norm();
}

namespace detail {

template <class S>
void note_zero_integral(const StepFunction<S>& g, const SolveOptions<S>& opts,
                        SolveResult<S>& result) {
  result.zero_integral_ok = check_zero_integral(g);
  if (!result.zero_integral_ok && opts.strict_zero_integral)
    throw InvalidInput("right-hand side must have zero integral");
}

template <class S>
std::optional<S> geometric_tail(const OperatorHandle<S>& P,
                                const StepFunction<S>& g, std::size_t m) {
  if (!P.system) return std::nullopt;
  S theta(0);
  for (const auto& b : P.system->branches()) theta += sabs(b.alpha);
  if (!(theta < S(1))) return std::nullopt;
  return S(g.sup_norm() * pow_int(theta, static_cast<unsigned>(m + 1)) /
           (S(1) - theta));
}

template <class S>
StepFunction<S> maybe_coarsen(StepFunction<S> f, const CoarsenPolicy& policy) {
  if (!scalar_traits<S>::exact && policy.enabled &&
      f.cell_count() > policy.trigger_cells)
    f = f.resample_average(policy.target_cells);
  return f;
}

}  // namespace detail

// Series solution phi = sum_{k>=0} P^k g, accumulated until the terms stall
// below tol for stall_window consecutive steps AND the residual certifies the
// partial sum (within 3*tol; the extra factor covers one operator application
// of the stalled tail).  Divergence is reported heuristically via a norm cap.
template <class S>
SolveResult<S> solve_neumann(const OperatorHandle<S>& P, const StepFunction<S>& g,
                             const SolveOptions<S>& opts = {}) {
  if (opts.mode == SolveMode::family && !P.preserves_one)
    throw HypothesisViolated(
        "solution-family mode needs an operator fixing constants");
  SolveResult<S> result;
  detail::note_zero_integral(g, opts, result);
  result.family = (opts.mode == SolveMode::family);

  StepFunction<S> term = g;
  StepFunction<S> acc = g;
  result.term_norms.push_back(term.l1_norm());
  std::size_t stall = 0;
  bool decided = false;
  std::size_t m = 0;
  while (m < opts.max_iters) {
    ++m;
    term = detail::maybe_coarsen(P.apply(term), opts.coarsen);
    acc = detail::maybe_coarsen(acc.add(term), opts.coarsen);
    S tn = term.l1_norm();
    result.term_norms.push_back(tn);
    stall = (tn <= opts.tol) ? stall + 1 : 0;
    if (stall >= opts.stall_window) {
      S res = residual(P, acc, g);
      if (res <= S(3) * opts.tol) {
        result.status = SolveStatus::converged;
        result.residual = res;
        decided = true;
        break;
      }
      stall = 0;  // stalled terms but unconvincing residual: keep summing
    }
    if (tn > opts.divergence_cap || acc.l1_norm() > opts.divergence_cap) {
      result.status = SolveStatus::no_solution_detected;
      decided = true;
      break;
    }
  }
  result.iterations = m;
  result.phi = std::move(acc);
  if (!decided || result.status != SolveStatus::converged)
    result.residual = residual(P, result.phi, g);
  result.tail_bound = detail::geometric_tail(P, g, m);
  return result;
}

// Cesaro-weighted series W_m = sum_{k<m} ((m-k)/m) P^k g, computed through
// the running average of Neumann partial sums (one operator application per
// step).  Requires an operator fixing constants.
template <class S>
SolveResult<S> solve_cesaro(const OperatorHandle<S>& P, const StepFunction<S>& g,
                            const SolveOptions<S>& opts = {}) {
  if (!P.preserves_one)
    throw HypothesisViolated(
        "Cesaro averaging needs an operator fixing constants");
  SolveResult<S> result;
  detail::note_zero_integral(g, opts, result);
  result.family = true;

  StepFunction<S> term = g;       // P^j g
  StepFunction<S> partial = g;    // T_j = sum_{k<=j} P^k g
  StepFunction<S> acc = g;        // sum of T_0..T_{j}
  StepFunction<S> w = g;          // W_1 = acc / 1
  std::size_t stall = 0;
  bool decided = false;
  std::size_t m = 1;
  while (m < opts.max_iters) {
    ++m;
    term = detail::maybe_coarsen(P.apply(term), opts.coarsen);
    partial = detail::maybe_coarsen(partial.add(term), opts.coarsen);
    acc = detail::maybe_coarsen(acc.add(partial), opts.coarsen);
    StepFunction<S> w_next = acc.scale(S(1) / S(static_cast<long long>(m)));
    S inc = w_next.subtract(w).l1_norm();
    result.term_norms.push_back(inc);
    w = std::move(w_next);
    stall = (inc <= opts.tol) ? stall + 1 : 0;
    if (stall >= opts.stall_window) {
      S res = residual(P, w, g);
      if (res <= S(3) * opts.tol) {
        result.status = SolveStatus::converged;
        result.residual = res;
        decided = true;
        break;
      }
      stall = 0;
    }
    if (w.l1_norm() > opts.divergence_cap) {
      result.status = SolveStatus::no_solution_detected;
      decided = true;
      break;
    }
  }
  result.iterations = m;
  result.phi = std::move(w);
  if (!decided || result.status != SolveStatus::converged)
    result.residual = residual(P, result.phi, g);
  result.tail_bound = detail::geometric_tail(P, g, m);
  return result;
}

// Word-expansion oracle for affine branches: the depth-d truncation
//   g + sum_{m<=d} sum_{words (n_1..n_m)} (prod |alpha_{n_k}|) * (g o f_{n_1}
//   o ... o f_{n_m}),
// which telescopes to sum_{k<=d} P^k g.  Words are enumerated in lexicographic
// order; the composite of a word is itself affine, so each term is exact.
template <class S>
StepFunction<S> closed_form_affine(const std::vector<S>& alphas,
                                   const std::vector<S>& betas,
                                   const StepFunction<S>& g, std::size_t depth,
                                   std::size_t word_cap = 10000000) {
  if (alphas.empty() || alphas.size() != betas.size())
    throw InvalidInput("alphas/betas size mismatch");
  const std::size_t N = alphas.size();
  const S tol = scalar_traits<S>::tolerance();
  for (std::size_t n = 0; n < N; ++n) {
    if (approx_zero(alphas[n])) throw InvalidInput("slope must be nonzero");
    S lo = smin(betas[n], S(alphas[n] + betas[n]));
    S hi = smax(betas[n], S(alphas[n] + betas[n]));
    if (lo < S(0) - tol || hi > S(1) + tol)
      throw InvalidInput("branch image leaves [0,1]");
  }
  // Total word count sum_{m<=depth} N^m against the cap.
  std::size_t total = 0, level = 1;
  for (std::size_t m = 1; m <= depth; ++m) {
    if (level > word_cap / N) throw CapExceeded("word expansion too large");
    level *= N;
    total += level;
    if (total > word_cap) throw CapExceeded("word expansion too large");
  }

  StepFunction<S> acc = g;
  std::vector<std::size_t> word;
  for (std::size_t m = 1; m <= depth; ++m) {
    word.assign(m, 0);
    while (true) {
      // Composite f_{n_1} o ... o f_{n_m}, folded innermost-first; its slope
      // magnitude is exactly the word's weight prod |alpha_{n_k}|.
      S a(1), b(0);
      for (std::size_t i = m; i-- > 0;) {
        b = alphas[word[i]] * b + betas[word[i]];
        a = alphas[word[i]] * a;
      }
      acc = acc.add(g.compose_affine(a, b).scale(sabs(a)));
      // Lexicographic odometer over {0..N-1}^m.
      std::size_t pos = m;
      bool wrapped = true;
      while (pos-- > 0) {
        if (++word[pos] < N) {
          wrapped = false;
          break;
        }
        word[pos] = 0;
      }
      if (wrapped) break;
    }
  }
  return acc;
}

}  // namespace epsinv
