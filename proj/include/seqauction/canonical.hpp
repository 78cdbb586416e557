#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seqauction/bid.hpp"
#include "seqauction/coinflip.hpp"
#include "seqauction/engine.hpp"

namespace seqauction {

// Unique split k1 + k2 = k with k1/(k2+1) <= b1/b2 < (k1+1)/k2; the brackets
// tile (0, inf), closed on the left. boundary marks the left endpoint itself.
struct ItemSplit {
  int k1 = 0;
  int k2 = 0;
  bool boundary = false;
};

inline ItemSplit item_split(const Rat& b1, const Rat& b2, int k) {
  if (k < 1) throw std::invalid_argument("item_split: need at least one item");
  if (b1 <= 0 || b2 <= 0) throw std::invalid_argument("item_split: budgets must be positive");
  const Rat r = b1 / b2;
  for (int k1 = 0; k1 <= k; ++k1) {
    const int k2 = k - k1;
    const Rat lo(k1, k2 + 1);
    if (r < lo) continue;
    if (k2 > 0 && !(r < Rat(k1 + 1, k2))) continue;
    return {k1, k2, k1 > 0 && r == lo};
  }
  throw std::logic_error("item_split: brackets failed to cover the ratio");
}

enum class CaseKind { TwoPhase, TieTypeI, TieTypeIIA, TieTypeIIB };

struct AllocationCase {
  CaseKind kind = CaseKind::TwoPhase;
  // TwoPhase: who wins the opening run and how the items divide
  int first_winner = 0;
  int k_first = 0;
  int k_second = 0;
  // tie cases: per-agent item shares and the shared per-item price
  int k1 = 0;
  int k2 = 0;
  Rat pstar;
  int leader = 0;  // TieTypeIIB only
};

// Decides how the k-item auction at (b1, b2) resolves: an exact ladder
// boundary gives the coin-ladder tie, the matched-multiples ratio gives the
// deterministic even tie, and otherwise the first round's effective prices
// decide between a leader-style tie and the two-phase deterministic path.
inline AllocationCase classify(Engine& eng, const Rat& b1, const Rat& b2, int k) {
  const ItemSplit sp = item_split(b1, b2, k);
  const Rat r = b1 / b2;
  AllocationCase out;
  out.k1 = sp.k1;
  out.k2 = sp.k2;
  if (sp.boundary) {
    out.kind = CaseKind::TieTypeI;
    out.pstar = b1 / sp.k1;
    return out;
  }
  if (sp.k1 >= 1 && sp.k2 >= 1 && r * (sp.k2 + 1) == sp.k1 + 1) {
    out.kind = CaseKind::TieTypeIIA;
    out.pstar = b1 / (sp.k1 + 1);
    return out;
  }
  const RoundResolution rr = eng.resolve(b1, b2, k);
  if (rr.tie) {
    out.kind = CaseKind::TieTypeIIB;
    out.pstar = rr.price;
    if (rr.price * (sp.k1 + 1) == b1) {
      out.leader = 1;
    } else if (rr.price * (sp.k2 + 1) == b2) {
      out.leader = 2;
    } else {
      throw std::logic_error("classify: tie price matches neither leader form");
    }
    return out;
  }
  out.kind = CaseKind::TwoPhase;
  out.first_winner = rr.winner;
  out.k_first = (rr.winner == 1) ? sp.k1 : sp.k2;
  out.k_second = (rr.winner == 1) ? sp.k2 : sp.k1;
  return out;
}

// Closed form for the coin-ladder tie: both budgets are exact multiples
// (m1 = k1, m2 = k2 + 1) of the ladder price, a fair coin decides each round,
// and a drained agent cedes the remaining items for free.
inline std::pair<LexUtility, LexUtility> tie_ladder_closed_form(const Rat& b1, const Rat& b2,
                                                                int k1, int k2) {
  const int m1 = k1;
  const int m2 = k2 + 1;
  LexUtility u1{Rat(m1 - 1) + phi(m2 - 1, m1 - 1),
                phi(m1 - 1, m2 - 1) * b1 - phi(m1 - 2, m2) * b2};
  LexUtility u2{Rat(m2 - 1) + phi(m1 - 1, m2 - 1),
                phi(m2 - 1, m1 - 1) * b2 - phi(m2 - 2, m1) * b1};
  return {u1, u2};
}

// Brute-force expectation of the same ladder, branching every coin toss.
// n1, n2 are the remaining budget multiples of pstar.
inline std::pair<LexUtility, LexUtility> tie_ladder_enumeration(const Rat& pstar, int n1, int n2,
                                                                int items) {
  if (items == 0) return {{Rat(0), n1 * pstar}, {Rat(0), n2 * pstar}};
  if (n1 == 0) return {{Rat(0), Rat(0)}, {Rat(items), n2 * pstar}};
  if (n2 == 0) return {{Rat(items), n1 * pstar}, {Rat(0), Rat(0)}};
  auto [w1, w2] = tie_ladder_enumeration(pstar, n1 - 1, n2, items - 1);
  w1.items += 1;
  auto [l1, l2] = tie_ladder_enumeration(pstar, n1, n2 - 1, items - 1);
  l2.items += 1;
  return {half_sum(w1, l1), half_sum(w2, l2)};
}

// Enumeration of the matched-multiples tie (n_i = k_i + 1 multiples of pstar):
// coin rounds at pstar until one side holds a single multiple, after which the
// other side buys everything left at pstar each. Every leaf must agree; the
// caller checks the returned value against the closed form for both branch
// orders via the `second_branch_first` flag.
inline std::pair<LexUtility, LexUtility> tie_matched_enumeration(const Rat& pstar, int n1, int n2,
                                                                 int items, bool second_branch_first) {
  internal_check(n1 + n2 - items == 2, "matched tie: multiples drifted off the invariant");
  if (items == 0) return {{Rat(0), n1 * pstar}, {Rat(0), n2 * pstar}};
  if (n1 == 1) return {{Rat(0), pstar}, {Rat(items), (n2 - items) * pstar}};
  if (n2 == 1) return {{Rat(items), (n1 - items) * pstar}, {Rat(0), pstar}};
  const int first = second_branch_first ? 2 : 1;
  std::pair<LexUtility, LexUtility> a, b;
  if (first == 1) {
    a = tie_matched_enumeration(pstar, n1 - 1, n2, items - 1, second_branch_first);
    a.first.items += 1;
    b = tie_matched_enumeration(pstar, n1, n2 - 1, items - 1, second_branch_first);
    b.second.items += 1;
  } else {
    b = tie_matched_enumeration(pstar, n1, n2 - 1, items - 1, second_branch_first);
    b.second.items += 1;
    a = tie_matched_enumeration(pstar, n1 - 1, n2, items - 1, second_branch_first);
    a.first.items += 1;
  }
  internal_check(a.first == b.first && a.second == b.second,
                 "matched tie: branch values disagree");
  return a;
}

inline std::pair<LexUtility, LexUtility> tie_expected_utility(Engine& eng, const Rat& b1,
                                                              const Rat& b2, int k) {
  const AllocationCase ac = classify(eng, b1, b2, k);
  switch (ac.kind) {
    case CaseKind::TieTypeI:
      return tie_ladder_closed_form(b1, b2, ac.k1, ac.k2);
    case CaseKind::TieTypeIIA:
    case CaseKind::TieTypeIIB: {
      LexUtility u1{Rat(ac.k1), b1 - ac.k1 * ac.pstar};
      LexUtility u2{Rat(ac.k2), b2 - ac.k2 * ac.pstar};
      return {u1, u2};
    }
    case CaseKind::TwoPhase:
      break;
  }
  throw std::invalid_argument("tie_expected_utility: the instance resolves deterministically");
}

enum class TraceKind { Deterministic, Tie };

struct TraceRound {
  int winner = 0;
  Rat price;
  Bid bid1, bid2;
};

struct OutcomeTrace {
  TraceKind kind = TraceKind::Deterministic;
  AllocationCase allocation;       // classification at the starting budgets
  std::vector<TraceRound> rounds;  // all k rounds, or the prefix before a tie
  // Tie traces: the state where bidding turns into the repeated coin-flip
  // process, plus its classification (carries p_star, leader, item split).
  // Matches the root state when the tie is immediate; a two-phase opening can
  // also funnel into a sequencing-tie window a few rounds down.
  Rat tie_b1, tie_b2;
  int tie_items = 0;
  AllocationCase tie_case;
  LexUtility u1, u2;       // exact expected utilities
  Rat final_b1, final_b2;  // realized for deterministic traces, expected money otherwise
};

// Full canonical play-out. Deterministic rounds replay one by one, the winner
// bidding the loser's effective price with the bump and paying it; once a
// round ties (possibly at the root), the trace keeps the deterministic prefix
// and describes the tie process instead of picking a branch.
inline OutcomeTrace canonical_trace(Engine& eng, const Rat& b1, const Rat& b2, int k) {
  OutcomeTrace out;
  out.allocation = classify(eng, b1, b2, k);
  Rat cb1 = b1, cb2 = b2;
  int won1 = 0;
  for (int m = k; m >= 1; --m) {
    const RoundResolution rr = eng.resolve(cb1, cb2, m);
    if (rr.tie) {
      out.kind = TraceKind::Tie;
      out.tie_b1 = cb1;
      out.tie_b2 = cb2;
      out.tie_items = m;
      out.tie_case = classify(eng, cb1, cb2, m);
      internal_check(out.tie_case.kind != CaseKind::TwoPhase,
                     "canonical_trace: tied round classified as two-phase");
      internal_check(out.tie_case.pstar == rr.price,
                     "canonical_trace: tie price disagrees with the classification");
      const auto [t1, t2] = tie_expected_utility(eng, cb1, cb2, m);
      const int won2 = k - m - won1;
      out.u1 = {Rat(won1) + t1.items, t1.money};
      out.u2 = {Rat(won2) + t2.items, t2.money};
      out.final_b1 = t1.money;
      out.final_b2 = t2.money;
      return out;
    }
    TraceRound tr;
    tr.winner = rr.winner;
    tr.price = rr.price;
    if (rr.winner == 1) {
      tr.bid1 = {rr.price, true};
      tr.bid2 = {rr.price, false};
      cb1 -= rr.price;
      ++won1;
    } else {
      tr.bid2 = {rr.price, true};
      tr.bid1 = {rr.price, false};
      cb2 -= rr.price;
    }
    out.rounds.push_back(tr);
  }
  out.final_b1 = cb1;
  out.final_b2 = cb2;
  out.u1 = {Rat(won1), cb1};
  out.u2 = {Rat(k - won1), cb2};
  return out;
}

// === symbolic phase structure over the budget ratio ===

struct PhaseRound {
  int winner = 0;
  LinForm price;  // a*B1 + b*B2, one form per phase

  friend bool operator==(const PhaseRound&, const PhaseRound&) = default;
};

struct TracePhase {
  Rat lo, hi;  // open ratio window in r = B1/B2
  std::vector<PhaseRound> rounds;  // realized sequence; tie phases show the leader-first branch
  bool tie = false;
  int tie_round = 0;  // first coin-flip round, 1-based
};

// Phase decomposition of the canonical outcome over r = B1/B2 in (0, 1): within
// each window the winner sequence is fixed and every round price is one linear
// form of the starting budgets. Windows are grown from sampled round resolutions
// whose certificates are symbolized and constrained, so the boundaries come out
// exact; sampling a breakpoint only splits the window. Adjacent windows with
// identical rows merge, which leaves precisely the ratios where the realized
// trace changes shape.
inline std::vector<TracePhase> trace_phase_table(Engine& eng, int k) {
  if (k < 1) throw std::invalid_argument("trace_phase_table: need at least one item");
  struct Span {
    Rat lo, hi;
  };
  std::vector<TracePhase> rows;
  std::vector<Span> work{{Rat(0), Rat(1)}};
  long guard = 0;
  while (!work.empty()) {
    internal_check(++guard < 100000, "trace_phase_table: refinement did not terminate");
    const Span span = work.back();
    work.pop_back();
    const Rat r = mediant(span.lo, span.hi);
    detail::Window win{span.lo, span.hi};
    TracePhase row;
    bool split = false;
    LinForm f1{Rat(1), Rat(0)};
    LinForm f2{Rat(0), Rat(1)};
    for (int m = k; m >= 1; --m) {
      const Rat b1 = f1.a * r + f1.b;
      const Rat b2 = f2.a * r + f2.b;
      const LevelFn& cont = eng.level(m - 1);
      const detail::CrossingCert c1 = detail::solve_crossing(cont, b1, b2);
      const detail::CrossingCert c2 = detail::solve_crossing(cont, b2, b1);
      // validity constraints arrive in each agent's own ratio; clearing the
      // positive denominator turns A*(bs/bo) + C > 0 into a root-linear cut
      const auto s1 = detail::symbolize(cont, c1, [&](const Rat& A, const Rat& C) {
        win.add_pos(A * f1.a + C * f2.a, A * f1.b + C * f2.b);
      });
      const auto s2 = detail::symbolize(cont, c2, [&](const Rat& A, const Rat& C) {
        win.add_pos(A * f2.a + C * f1.a, A * f2.b + C * f1.b);
      });
      if (!s1 || !s2 || win.empty) {
        split = true;
        break;
      }
      const LinForm P1{s1->a * f1.a + s1->b * f2.a, s1->a * f1.b + s1->b * f2.b};
      const LinForm P2{s2->a * f2.a + s2->b * f1.a, s2->a * f2.b + s2->b * f1.b};
      if (c1.price == c2.price) {
        // only a shared-price window survives; isolated ties split away
        const AllocationCase ac = classify(eng, b1, b2, m);
        if (ac.kind != CaseKind::TieTypeIIB || !(P1 == P2)) {
          split = true;
          break;
        }
        const LinForm& fl = ac.leader == 1 ? f1 : f2;
        const int mult = (ac.leader == 1 ? ac.k1 : ac.k2) + 1;
        if (!(LinForm{P1.a * mult, P1.b * mult} == fl)) {
          split = true;
          break;
        }
        if (!row.tie) {
          row.tie = true;
          row.tie_round = k - m + 1;
        }
        row.rounds.push_back({ac.leader, P1});
        LinForm& fw = ac.leader == 1 ? f1 : f2;
        fw = {fw.a - P1.a, fw.b - P1.b};
        continue;
      }
      const int w = c1.price > c2.price ? 1 : 2;
      const LinForm& pw = w == 1 ? P1 : P2;
      const LinForm& pl = w == 1 ? P2 : P1;
      win.add_pos(pw.a - pl.a, pw.b - pl.b);
      if (win.empty) {
        split = true;
        break;
      }
      row.rounds.push_back({w, pl});
      LinForm& fw = w == 1 ? f1 : f2;
      fw = {fw.a - pl.a, fw.b - pl.b};
    }
    if (split || win.empty) {
      work.push_back({span.lo, r});
      work.push_back({r, span.hi});
      continue;
    }
    row.lo = win.lo;
    row.hi = win.hi;
    rows.push_back(std::move(row));
    if (span.lo < win.lo) work.push_back({span.lo, win.lo});
    if (win.hi < span.hi) work.push_back({win.hi, span.hi});
  }
  std::sort(rows.begin(), rows.end(),
            [](const TracePhase& x, const TracePhase& y) { return x.lo < y.lo; });
  internal_check(!rows.empty() && rows.front().lo == 0,
                 "trace_phase_table: phases do not start at ratio zero");
  std::vector<TracePhase> merged;
  merged.push_back(rows.front());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    TracePhase& prev = merged.back();
    internal_check(prev.hi == rows[i].lo, "trace_phase_table: phases do not tile the ratio axis");
    if (prev.rounds == rows[i].rounds && prev.tie == rows[i].tie &&
        prev.tie_round == rows[i].tie_round) {
      prev.hi = rows[i].hi;
    } else {
      merged.push_back(rows[i]);
    }
  }
  internal_check(merged.back().hi == 1, "trace_phase_table: phases do not reach ratio one");
  return merged;
}

}  // namespace seqauction
