#pragma once

// Seeded draws shared by the property tests.  All randomness reduces
// mt19937_64 output with explicit modulo so batteries are identical across
// standard libraries (distribution objects are not pinned by the standard).

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "epsinv/branch_system.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/random_sets.hpp"
#include "epsinv/scalar.hpp"
#include "epsinv/step_function.hpp"

namespace testgen {

inline long long draw(std::mt19937_64& rng, long long lo, long long hi) {
  return lo + static_cast<long long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Step function with up to max_cells cells on the 1/64 grid, rational values
// p/q with p in [value_lo, value_hi], q in [1, 8].
template <class S>
epsinv::StepFunction<S> random_step(std::mt19937_64& rng, std::size_t max_cells = 8,
                                    long long value_lo = -8, long long value_hi = 8) {
  std::size_t cells = 1 + static_cast<std::size_t>(rng() % max_cells);
  std::vector<long long> cuts{0};
  while (cuts.size() < cells) cuts.push_back(draw(rng, 1, 63));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<S> bps, vals;
  for (long long c : cuts) {
    bps.push_back(epsinv::frac<S>(c, 64));
    vals.push_back(epsinv::frac<S>(draw(rng, value_lo, value_hi), draw(rng, 1, 8)));
  }
  return epsinv::StepFunction<S>::from_breakpoints(std::move(bps), std::move(vals));
}

template <class S>
epsinv::StepFunction<S> random_nonneg_step(std::mt19937_64& rng, std::size_t max_cells = 8) {
  return random_step<S>(rng, max_cells, 0, 8);
}

template <class S>
epsinv::StepFunction<S> random_zero_mean_step(std::mt19937_64& rng, std::size_t max_cells = 8) {
  auto f = random_step<S>(rng, max_cells);
  return f.subtract(epsinv::StepFunction<S>::constant(f.integral()));
}

// Signed slopes with |alpha_1| + ... + |alpha_N| = 1, each nonzero.
template <class S>
std::vector<S> random_signed_alphas(std::mt19937_64& rng, std::size_t N) {
  std::vector<long long> w(N);
  long long total = 0;
  for (auto& wi : w) {
    wi = draw(rng, 1, 8);
    total += wi;
  }
  std::vector<S> alphas(N);
  for (std::size_t i = 0; i < N; ++i) {
    alphas[i] = epsinv::frac<S>(w[i], total);
    if (rng() % 2) alphas[i] = -alphas[i];
  }
  return alphas;
}

template <class S>
epsinv::BranchSystem<S> random_full_affine(std::mt19937_64& rng, std::size_t N) {
  return epsinv::BranchSystem<S>::full_affine(random_signed_alphas<S>(rng, N));
}

// System with disjoint branch images that fail to cover [0,1): slopes sum to
// less than one in absolute value and at least one gap is forced.
template <class S>
epsinv::BranchSystem<S> random_gap_system(std::mt19937_64& rng, std::size_t N) {
  std::vector<long long> w(N), gap(N + 1);
  long long total = 0;
  for (auto& wi : w) {
    wi = draw(rng, 1, 8);
    total += wi;
  }
  long long gap_total = 0;
  for (auto& gi : gap) {
    gi = draw(rng, 0, 3);
    gap_total += gi;
  }
  if (gap_total == 0) {
    gap.back() = 1;
    gap_total = 1;
  }
  long long D = total + gap_total;
  std::vector<epsinv::AffineBranch<S>> branches;
  long long start = 0;
  for (std::size_t i = 0; i < N; ++i) {
    start += gap[i];
    S alpha = epsinv::frac<S>(w[i], D);
    if (rng() % 2) alpha = -alpha;
    // image span [start/D, (start+w_i)/D); beta places the span for either sign
    S beta = epsinv::frac<S>(start, D) + (epsinv::sabs(alpha) - alpha) / S(2);
    branches.push_back({alpha, beta});
    start += w[i];
  }
  return epsinv::BranchSystem<S>::from_branches(std::move(branches));
}

}  // namespace testgen
