#pragma once

#include <cstdint>
#include <limits>
#include <random>

#include "seqauction/canonical.hpp"

namespace seqauction {

// Unbiased integer in [0, n) by rejection from the raw 64-bit stream.
inline std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("draw_below: empty range");
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = max - max % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

struct RandomInstance {
  Rat b1, b2;
};

// Random budget p/q with denominator up to max_den and value in (0, 2].
inline Rat random_budget(std::mt19937_64& rng, unsigned max_den = 1000) {
  const auto den = static_cast<long>(draw_below(rng, max_den) + 1);
  const auto num = static_cast<long>(draw_below(rng, 2 * static_cast<std::uint64_t>(den)) + 1);
  return Rat(num, den);
}

inline RandomInstance random_instance(std::mt19937_64& rng, unsigned max_den = 1000) {
  return {random_budget(rng, max_den), random_budget(rng, max_den)};
}

// Instance whose canonical trace runs all k rounds without a coin flip.
// Tie regimes have positive measure (sequencing-tie windows), so this
// resamples rather than nudges.
inline RandomInstance random_deterministic_instance(Engine& eng, std::mt19937_64& rng, int k,
                                                    unsigned max_den = 1000) {
  for (int attempt = 0; attempt < 100000; ++attempt) {
    RandomInstance inst = random_instance(rng, max_den);
    if (canonical_trace(eng, inst.b1, inst.b2, k).kind == TraceKind::Deterministic) return inst;
  }
  throw std::logic_error("random_deterministic_instance: rejection loop stuck");
}

// Grid-aligned instance: both budgets are multiples of delta in (0, 2], the
// budget ratio stays more than 4*delta away from every ratio threshold of
// the k-item level, and the canonical trace is deterministic.
inline RandomInstance random_grid_instance(Engine& eng, std::mt19937_64& rng, int k,
                                           const Rat& delta) {
  if (!(delta > 0) || !(delta < 1)) throw std::invalid_argument("random_grid_instance: bad step");
  const Rat ticks_rat = 2 / delta;
  const auto ticks = static_cast<std::uint64_t>(numerator(ticks_rat) / denominator(ticks_rat));
  if (ticks < 2) throw std::invalid_argument("random_grid_instance: step too coarse");
  const LevelFn& f = eng.level(k);
  const Rat margin = 4 * delta;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const Rat b1 = Rat(static_cast<long>(draw_below(rng, ticks) + 1)) * delta;
    const Rat b2 = Rat(static_cast<long>(draw_below(rng, ticks) + 1)) * delta;
    const Rat r = b1 / b2;
    bool clear = true;
    for (const Rat& t : f.edges) {
      const Rat d = r > t ? r - t : t - r;
      if (!(d > margin)) {
        clear = false;
        break;
      }
    }
    if (!clear) continue;
    if (canonical_trace(eng, b1, b2, k).kind != TraceKind::Deterministic) continue;
    return {b1, b2};
  }
  throw std::logic_error("random_grid_instance: rejection loop stuck");
}

}  // namespace seqauction
