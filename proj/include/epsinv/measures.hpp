#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "epsinv/branch_system.hpp"
#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/perron.hpp"
#include "epsinv/scalar.hpp"
#include "epsinv/step_function.hpp"

namespace epsinv {

// Branch word (n_k, ..., n_1), outermost-applied symbol first, 1-based.
// Refining a cylinder appends an innermost symbol at the back.
struct Word {
  std::vector<std::size_t> symbols;
};

inline void validate_word(const Word& w, std::size_t branch_count) {
  if (w.symbols.empty()) throw InvalidInput("word must be nonempty");
  for (auto s : w.symbols)
    if (s < 1 || s > branch_count)
      throw InvalidInput("word symbol out of branch range");
}

// Absolutely continuous measure given by a nonnegative step density.
template <class S>
class DensityMeasure {
 public:
  explicit DensityMeasure(StepFunction<S> density) : density_(std::move(density)) {
    if (!approx_leq(S(0), density_.min_value()))
      throw InvalidInput("measure density must be nonnegative");
  }

  const StepFunction<S>& density() const { return density_; }
  S total() const { return density_.integral(); }
  S measure_of(const IntervalSet<S>& A) const { return density_.integral(A); }
  bool is_probability() const { return approx_eq(total(), S(1)); }

 private:
  StepFunction<S> density_;
};

// Cylinder I_w = [f_{n_k} o ... o f_{n_1}(0), f_{n_k} o ... o f_{n_1}(1)) for
// a full system of increasing affine branches.
template <class S>
Interval<S> cylinder_interval(const BranchSystem<S>& system, const Word& w) {
  if (!system.flags().full())
    throw InvalidSystem("cylinders need a full branch system");
  for (const auto& b : system.branches())
    if (!(b.alpha > S(0)))
      throw InvalidSystem("cylinders need increasing branches");
  validate_word(w, system.branch_count());
  S u(0), v(1);
  // Innermost symbol (back of the word) is applied first.
  for (auto it = w.symbols.rbegin(); it != w.symbols.rend(); ++it) {
    const auto& b = system.branch(*it - 1);
    u = b.apply(u);
    v = b.apply(v);
  }
  return {u, v};
}

// The perturbed-cylinder measure: positive weights alpha_n summing to 1, an
// epsilon in [0,1], and two designated indices p != q.  The perturbation
// xi(n) moves mass epsilon*min(alpha_p, alpha_q) from the q-slot to the
// p-slot at every refinement level, keeping each level additive.
template <class S>
class CylinderMeasure {
 public:
  CylinderMeasure(std::vector<S> alphas, S epsilon, std::size_t p, std::size_t q)
      : alphas_(std::move(alphas)),
        epsilon_(std::move(epsilon)),
        p_(p),
        q_(q),
        system_(BranchSystem<S>::full_affine(alphas_)) {
    S total(0);
    for (const auto& a : alphas_) {
      if (!(a > S(0))) throw InvalidInput("weights must be positive");
      total += a;
    }
    if (!approx_eq(total, S(1))) throw InvalidInput("weights must sum to 1");
    if (epsilon_ < S(0) || epsilon_ > S(1))
      throw InvalidInput("epsilon must lie in [0,1]");
    if (p_ == q_ || p_ < 1 || q_ < 1 || p_ > alphas_.size() || q_ > alphas_.size())
      throw InvalidInput("p and q must be distinct branch indices");
    for (std::size_t n = 1; n <= alphas_.size(); ++n) {
      S wn = alphas_[n - 1] + xi(n);
      if (wn < S(0) || wn > S(1)) throw InvalidInput("perturbed weight leaves [0,1]");
    }
  }

  const std::vector<S>& alphas() const { return alphas_; }
  const S& epsilon() const { return epsilon_; }
  std::size_t p() const { return p_; }
  std::size_t q() const { return q_; }
  const BranchSystem<S>& system() const { return system_; }
  std::size_t branch_count() const { return alphas_.size(); }

  S xi(std::size_t n) const {
    if (n < 1 || n > alphas_.size()) throw InvalidInput("branch index out of range");
    if (n == p_) return S(epsilon_ * smin(alphas_[p_ - 1], alphas_[q_ - 1]));
    if (n == q_) return S(-epsilon_ * smin(alphas_[p_ - 1], alphas_[q_ - 1]));
    return S(0);
  }

  // nu0(I_w) = (alpha_{outermost} + xi(outermost)) * prod of the inner alphas.
  S nu0(const Word& w) const {
    validate_word(w, alphas_.size());
    S value = alphas_[w.symbols.front() - 1] + xi(w.symbols.front());
    for (std::size_t j = 1; j < w.symbols.size(); ++j)
      value *= alphas_[w.symbols[j] - 1];
    return value;
  }

  Interval<S> cylinder(const Word& w) const {
    return cylinder_interval(system_, w);
  }

  // Inner approximation of nu(A) by depth-limited cylinders contained in A.
  // Additivity lets a fully contained cylinder be counted without refining;
  // the uncovered remainder is bounded via nu0(I) <= 2*length(I).
  std::pair<S, S> nu_on_intervalset(const IntervalSet<S>& A,
                                    std::size_t depth) const {
    if (depth < 1) throw InvalidInput("refinement depth must be >= 1");
    S value(0), covered(0);
    Word w;
    descend(A, w, depth, value, covered);
    S uncovered = A.measure() - covered;
    return {value, S(2) * uncovered};
  }

  // The same measure as a density: on each first-level interval I_n the
  // refinement multiplies lengths and nu0 values by identical factors, so the
  // density is the constant 1 + xi(n)/alpha_n there.
  DensityMeasure<S> density_equivalent() const {
    std::vector<S> cuts, vals;
    S left(0);
    for (std::size_t n = 1; n <= alphas_.size(); ++n) {
      cuts.push_back(left);
      vals.push_back(S(1) + xi(n) / alphas_[n - 1]);
      left += alphas_[n - 1];
    }
    return DensityMeasure<S>(
        StepFunction<S>::from_breakpoints(std::move(cuts), std::move(vals)));
  }

 private:
  void descend(const IntervalSet<S>& A, Word& w, std::size_t depth, S& value,
               S& covered) const {
    for (std::size_t n = 1; n <= alphas_.size(); ++n) {
      w.symbols.push_back(n);
      Interval<S> I = cylinder(w);
      IntervalSet<S> Iset = IntervalSet<S>::from_parts({I});
      IntervalSet<S> overlap = A.intersect(Iset);
      if (!overlap.is_empty()) {
        if (overlap == Iset) {
          value += nu0(w);
          covered += I.length();
        } else if (w.symbols.size() < depth) {
          descend(A, w, depth, value, covered);
        }
      }
      w.symbols.pop_back();
    }
  }

  std::vector<S> alphas_;
  S epsilon_;
  std::size_t p_;
  std::size_t q_;
  BranchSystem<S> system_;
};

// Density-level near-invariance (the pointwise criterion): |Pf - f| <= eps
// almost everywhere.
template <class S>
bool check_density_criterion(const StepFunction<S>& f, const OperatorHandle<S>& P,
                             const S& epsilon) {
  return P.apply(f).subtract(f).ae_leq_abs(epsilon);
}

template <class S>
struct SetCriterionEntry {
  IntervalSet<S> set;
  S discrepancy{};  // |nu(S^-1 A) - nu(A)|
  S bound{};        // epsilon * measure(A)
  bool ok = false;
};

template <class S>
struct SetCriterionReport {
  std::vector<SetCriterionEntry<S>> entries;
  bool all_ok = true;
  double worst_ratio = 0.0;  // discrepancy/bound maximum (inf if bound 0 fails)
  std::optional<std::size_t> worst_index;
};

// Set-level near-invariance: |nu(S^-1 A) - nu(A)| <= epsilon * measure(A)
// for each supplied set, with the worst witness reported.
template <class S>
SetCriterionReport<S> check_set_criterion(const DensityMeasure<S>& nu,
                                          const Transformation<S>& T,
                                          const S& epsilon,
                                          const std::vector<IntervalSet<S>>& sets) {
  SetCriterionReport<S> report;
  for (const auto& A : sets) {
    SetCriterionEntry<S> entry;
    entry.set = A;
    entry.discrepancy = sabs(S(nu.measure_of(T.s_preimage(A)) - nu.measure_of(A)));
    entry.bound = epsilon * A.measure();
    entry.ok = approx_leq(entry.discrepancy, entry.bound);
    double ratio;
    if (entry.bound > S(0)) {
      ratio = to_double(entry.discrepancy) / to_double(entry.bound);
    } else {
      ratio = approx_zero(entry.discrepancy)
                  ? 0.0
                  : std::numeric_limits<double>::infinity();
    }
    if (!report.worst_index || ratio > report.worst_ratio) {
      report.worst_ratio = ratio;
      report.worst_index = report.entries.size();
    }
    report.all_ok = report.all_ok && entry.ok;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

// Orthogonal extension: given 0 <= g0 <= eps on [0, f_N(0)), extend by
//   g = -(1/f_N') * sum_{n<N} |f_n'| * (g0 o f_n o f_N^{-1})
// on the remaining right interval, so that the transfer operator annihilates
// the result exactly.  Needs the last branch increasing with slope >= 1/2 and
// every earlier branch image to the left of f_N(0).
template <class S>
StepFunction<S> build_g_orthogonal(const BranchSystem<S>& system,
                                   const StepFunction<S>& g0, const S& epsilon) {
  const S tol = scalar_traits<S>::tolerance();
  if (!system.flags().full())
    throw HypothesisViolated("orthogonal extension needs a full branch system");
  const std::size_t N = system.branch_count();
  const auto& last = system.branch(N - 1);
  if (!(last.alpha > S(0)))
    throw HypothesisViolated("last branch must be increasing");
  if (last.alpha < frac<S>(1, 2) - tol)
    throw HypothesisViolated("last branch slope must be at least 1/2");
  const S split = last.at0();  // f_N(0), the right region's left endpoint
  for (std::size_t n = 0; n + 1 < N; ++n) {
    if (system.branch(n).image_hi() > split + tol)
      throw HypothesisViolated("early branch images must stay left of f_N(0)");
  }
  if (epsilon < S(0) - tol) throw HypothesisViolated("epsilon must be nonnegative");

  // Known region: validate 0 <= g0 <= eps there.
  if (split > tol) {
    IntervalSet<S> known = IntervalSet<S>::from_parts({{S(0), split}});
    auto clipped = g0.multiply(StepFunction<S>::indicator(known));
    if (!approx_leq(S(0), clipped.min_value()) || !clipped.ae_leq_abs(epsilon))
      throw HypothesisViolated("g0 must take values in [0, epsilon]");
  }

  // Tail maps m_n = f_n o f_N^{-1} on [split, 1); each is affine.
  std::vector<std::pair<S, S>> tail_maps;
  for (std::size_t n = 0; n + 1 < N; ++n) {
    const auto& b = system.branch(n);
    S a = b.alpha / last.alpha;
    S c = b.beta - b.alpha * last.beta / last.alpha;
    tail_maps.emplace_back(a, c);
  }

  std::vector<S> cuts{S(0)};
  for (const auto& c : g0.breakpoints())
    if (c > tol && c < split - tol) cuts.push_back(c);
  if (split > tol && split < S(1) - tol) cuts.push_back(split);
  for (const auto& [a, c] : tail_maps) {
    for (const auto& bp : g0.breakpoints()) {
      S t = (bp - c) / a;
      if (t > split + tol && t < S(1) - tol) cuts.push_back(t);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [](const S& u, const S& v) { return approx_eq(u, v); }),
             cuts.end());

  std::vector<S> vals;
  vals.reserve(cuts.size());
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    S hi = (i + 1 < cuts.size()) ? cuts[i + 1] : S(1);
    S mid = (cuts[i] + hi) / S(2);
    if (mid < split) {
      vals.push_back(g0.evaluate(mid));
    } else {
      S v(0);
      for (std::size_t n = 0; n + 1 < N; ++n) {
        const auto& [a, c] = tail_maps[n];
        v -= sabs(system.branch(n).alpha) / last.alpha *
             g0.evaluate(smin(smax(S(a * mid + c), S(0)), S(1)));
      }
      vals.push_back(v);
    }
  }
  StepFunction<S> g =
      StepFunction<S>::from_breakpoints(std::move(cuts), std::move(vals));

  // The construction guarantees annihilation; verify rather than trust.
  S defect = fp_apply(system, g).l1_norm();
  if (!approx_leq(defect, S(scalar_traits<S>::exact ? S(0) : frac<S>(1, 1000000000))))
    throw Error("orthogonal extension failed annihilation check");
  return g;
}

// Piecewise-constant construction: g = gamma_n on the n-th branch image.  The
// weighted mean sum |alpha_n| gamma_n must vanish, which makes Pg identically
// that mean, i.e. zero; the associated measure has density 1 + g.
template <class S>
std::pair<StepFunction<S>, DensityMeasure<S>> build_g_piecewise(
    const BranchSystem<S>& system, const std::vector<S>& gammas) {
  if (!system.flags().full())
    throw InvalidSystem("piecewise construction needs a full branch system");
  if (gammas.size() != system.branch_count())
    throw InvalidInput("one gamma per branch required");
  S mean(0);
  for (std::size_t n = 0; n < gammas.size(); ++n) {
    if (!scalar_traits<S>::finite(gammas[n]))
      throw NonFiniteSample("gamma is not finite");
    if (gammas[n] < S(-1)) throw InvalidInput("gamma below -1 breaks positivity");
    mean += sabs(system.branch(n).alpha) * gammas[n];
  }
  if (!approx_zero(mean))
    throw InvalidInput("weighted gammas must sum to zero");

  // Branch images tile [0,1); order cells by position, carrying each branch's
  // gamma.
  std::vector<std::pair<S, S>> cells;  // (left endpoint, value)
  for (std::size_t n = 0; n < system.branch_count(); ++n)
    cells.emplace_back(system.branch(n).image_lo(), gammas[n]);
  std::sort(cells.begin(), cells.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<S> cuts, vals;
  for (auto& [lo, v] : cells) {
    cuts.push_back(std::move(lo));
    vals.push_back(std::move(v));
  }
  cuts.front() = S(0);
  StepFunction<S> g = StepFunction<S>::from_breakpoints(std::move(cuts), std::move(vals));
  DensityMeasure<S> nu(g.add(StepFunction<S>::constant(S(1))));
  return {std::move(g), std::move(nu)};
}

// Convex mixture nu(A) = sum_i eps_i * mu(A cap A_i) over an invariant base
// measure mu; the result is (sum eps_i)-invariant.  The base must actually be
// fixed by P (within inv_tol).
template <class S>
DensityMeasure<S> convex_mix_measure(const OperatorHandle<S>& P,
                                     const DensityMeasure<S>& base,
                                     const std::vector<IntervalSet<S>>& sets,
                                     const std::vector<S>& eps_parts,
                                     const S& inv_tol = S(1) / pow_int(S(10), 10)) {
  if (sets.size() != eps_parts.size())
    throw InvalidInput("one epsilon part per set required");
  for (const auto& e : eps_parts)
    if (!(e > S(0))) throw InvalidInput("epsilon parts must be positive");
  S defect = P.apply(base.density()).subtract(base.density()).l1_norm();
  if (!approx_leq(defect, inv_tol))
    throw InvalidInput("base density is not operator-invariant");
  StepFunction<S> density = StepFunction<S>::constant(S(0));
  for (std::size_t i = 0; i < sets.size(); ++i) {
    density = density.add(
        base.density().multiply(StepFunction<S>::indicator(sets[i])).scale(eps_parts[i]));
  }
  return DensityMeasure<S>(std::move(density));
}

}  // namespace epsinv
