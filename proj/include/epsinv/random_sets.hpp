#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "epsinv/errors.hpp"
#include "epsinv/interval_set.hpp"
#include "epsinv/scalar.hpp"

namespace epsinv {

// Seeded battery of interval sets drawn on a uniform grid, used by the
// set-criterion verifier.  All randomness goes through explicit modulo
// reduction of mt19937_64 draws so the same seed yields the same battery on
// every platform; distribution objects are avoided on purpose because their
// output is not pinned by the standard.
template <class S>
std::vector<IntervalSet<S>> random_interval_battery(std::uint64_t seed,
                                                    std::size_t count,
                                                    std::size_t grid = 256,
                                                    std::size_t max_parts = 4) {
  if (grid < 2) throw InvalidInput("interval battery needs a grid of at least 2 cells");
  if (max_parts < 1) throw InvalidInput("interval battery needs max_parts >= 1");
  std::mt19937_64 rng(seed);
  std::vector<IntervalSet<S>> out;
  out.reserve(count);
  while (out.size() < count) {
    std::size_t parts = 1 + static_cast<std::size_t>(rng() % max_parts);
    std::vector<std::size_t> cuts(2 * parts);
    for (auto& c : cuts) c = static_cast<std::size_t>(rng() % (grid + 1));
    std::sort(cuts.begin(), cuts.end());
    std::vector<Interval<S>> ivs;
    for (std::size_t i = 0; i + 1 < cuts.size(); i += 2) {
      if (cuts[i] < cuts[i + 1])
        ivs.push_back({frac<S>(static_cast<long long>(cuts[i]), static_cast<long long>(grid)),
                       frac<S>(static_cast<long long>(cuts[i + 1]), static_cast<long long>(grid))});
    }
    if (ivs.empty()) continue;  // every pair degenerate; redraw
    out.push_back(IntervalSet<S>::from_parts(std::move(ivs)));
  }
  return out;
}

}  // namespace epsinv
