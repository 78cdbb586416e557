#pragma once

#include <cmath>
#include <deque>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seqauction/piecewise.hpp"

namespace seqauction {

struct ClinchRound {
  int winner = 0;
  Rat price;
};

struct ClinchingTrace {
  std::vector<ClinchRound> rounds;
  int items1 = 0;
  int items2 = 0;
  Rat final_b1, final_b2;
};

// k rounds; each item goes to the agent with the strictly higher remaining
// budget (an exact budget tie goes to agent 2) at price min(budgets)/items-left.
inline ClinchingTrace clinching_trace(const Rat& b1, const Rat& b2, int k) {
  if (k < 1) throw std::invalid_argument("clinching_trace: need at least one item");
  if (b1 <= 0 || b2 <= 0) throw std::invalid_argument("clinching_trace: budgets must be positive");
  ClinchingTrace out;
  Rat cb1 = b1, cb2 = b2;
  for (int m = k; m >= 1; --m) {
    const bool first = cb1 > cb2;
    const Rat price = (first ? cb2 : cb1) / m;
    if (first) {
      cb1 -= price;
      ++out.items1;
    } else {
      cb2 -= price;
      ++out.items2;
    }
    out.rounds.push_back({first ? 1 : 2, price});
  }
  out.final_b1 = cb1;
  out.final_b2 = cb2;
  return out;
}

inline std::pair<int, int> clinching_items(const Rat& b1, const Rat& b2, int k) {
  const ClinchingTrace t = clinching_trace(b1, b2, k);
  return {t.items1, t.items2};
}

// H_k; agent 1 sweeps all k items exactly when B1 > H_k * B2.
inline Rat clinch_threshold(int k) {
  if (k < 1) throw std::invalid_argument("clinch_threshold: need at least one item");
  Rat h(0);
  for (int j = 1; j <= k; ++j) h += Rat(1, j);
  return h;
}

// Large-k closed-form estimate of agent 1's item fraction at wealth share p.
// The single floating-point computation in the library; informational only.
inline double fraction_approx(double p) {
  return 1.0 - std::exp((2.0 * p - 1.0) / (p - 1.0)) / 2.0;
}

struct CurvePoint {
  Rat p;             // agent 1's share of total wealth
  Rat item_fraction; // exact clinching items1 / k
  double approx;
};

inline std::vector<CurvePoint> fraction_curve(int k, int samples) {
  if (k < 1) throw std::invalid_argument("fraction_curve: need at least one item");
  if (samples < 2) throw std::invalid_argument("fraction_curve: need at least two samples");
  std::vector<CurvePoint> out;
  out.reserve(samples);
  for (int j = 1; j <= samples; ++j) {
    const Rat p(j, samples + 1);
    const auto [i1, i2] = clinching_items(p, 1 - p, k);
    (void)i2;
    out.push_back({p, Rat(i1, k), fraction_approx(double(j) / double(samples + 1))});
  }
  return out;
}

struct SymbolicClinchRound {
  int winner = 0;
  LinForm price;  // a*B1 + b with B2 fixed at 1
};

struct ClinchPhase {
  Rat lo, hi;
  std::vector<SymbolicClinchRound> rounds;
};

// Exact phase decomposition of the k-item clinching auction over B1 in (0, 1)
// at B2 = 1. Remaining budgets stay linear in B1 within a phase; the interval
// splits wherever the higher-budget comparison changes sign mid-run.
inline std::vector<ClinchPhase> clinching_phase_table(int k) {
  if (k < 1) throw std::invalid_argument("clinching_phase_table: need at least one item");
  std::deque<std::pair<Rat, Rat>> work;
  work.emplace_back(Rat(0), Rat(1));
  std::vector<ClinchPhase> phases;
  long guard = 0;
  while (!work.empty()) {
    internal_check(++guard < 100000, "clinching table: refinement did not terminate");
    auto [lo, hi] = work.front();
    work.pop_front();
    if (!(lo < hi)) continue;
    const Rat mid = mediant(lo, hi);
    LinForm f1{Rat(1), Rat(0)};
    LinForm f2{Rat(0), Rat(1)};
    std::vector<SymbolicClinchRound> rounds;
    bool split = false;
    for (int m = k; m >= 1; --m) {
      const LinForm diff{f1.a - f2.a, f1.b - f2.b};
      if (diff.a != 0) {
        const Rat root = -diff.b / diff.a;
        if (lo < root && root < hi) {
          work.emplace_back(lo, root);
          work.emplace_back(root, hi);
          split = true;
          break;
        }
      }
      const bool first = diff.a * mid + diff.b > 0;
      const LinForm& loser = first ? f2 : f1;
      const LinForm price{loser.a / m, loser.b / m};
      if (first) {
        f1 = {f1.a - price.a, f1.b - price.b};
      } else {
        f2 = {f2.a - price.a, f2.b - price.b};
      }
      rounds.push_back({first ? 1 : 2, price});
    }
    if (!split) phases.push_back({lo, hi, std::move(rounds)});
  }
  std::sort(phases.begin(), phases.end(),
            [](const ClinchPhase& a, const ClinchPhase& b) { return a.lo < b.lo; });
  internal_check(!phases.empty() && phases.front().lo == 0 && phases.back().hi == 1,
                 "clinching table: phases do not span (0, 1)");
  for (std::size_t i = 1; i < phases.size(); ++i)
    internal_check(phases[i - 1].hi == phases[i].lo, "clinching table: phases do not tile");
  return phases;
}

}  // namespace seqauction
