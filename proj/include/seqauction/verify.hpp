#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "seqauction/canonical.hpp"
#include "seqauction/engine.hpp"

namespace seqauction {

// ===========================================================================
// One-shot deviation audit
// ===========================================================================
//
// Replays the canonical outcome round by round and, at every round, lets one
// agent replace its canonical bid with an arbitrary alternative while the
// opponent sticks to the canonical bid and play continues canonically
// afterwards.  The candidate set per round is the breakpoint grid of the
// win/lose comparison at the current state, midpoints of adjacent
// breakpoints, zero, and the opponent's amount with and without the bump.
// For equilibrium play no candidate may yield a lexicographic gain.

enum class GainSign { Negative, Zero, Positive };

struct DeviationCheck {
  int round = 0;  // 1-based position in the trace
  int agent = 0;
  Bid bid;
  LexUtility deviation_utility;
  LexUtility equilibrium_utility;
  GainSign gain_sign = GainSign::Zero;
};

struct DeviationReport {
  Rat b1, b2;
  int k = 0;
  std::vector<DeviationCheck> checks;
  GainSign worst_gain_sign = GainSign::Negative;
};

namespace detail {

inline GainSign sign_of_gain(const LexUtility& dev, const LexUtility& eq) {
  const int c = lex_compare(dev, eq);
  if (c > 0) return GainSign::Positive;
  if (c < 0) return GainSign::Negative;
  return GainSign::Zero;
}

// One-sided limit of f at the budget ratio bs/bo: side < 0 approaches from
// below, side > 0 from above.  Coincides with f.eval away from the ratio
// thresholds; at a threshold it picks the adjacent piece instead of the
// tie-regime value.
inline LexUtility eval_beside(const LevelFn& f, const Rat& bs, const Rat& bo, int side) {
  if (bs < 0 || bo < 0) throw std::invalid_argument("eval_beside: negative budget");
  if (bo == 0 || bs == 0) return f.eval(bs, bo);
  const Rat r = bs / bo;
  const auto it = std::lower_bound(f.edges.begin(), f.edges.end(), r);
  if (it == f.edges.end() || *it != r) return f.eval(bs, bo);
  const std::size_t piece =
      static_cast<std::size_t>(it - f.edges.begin()) + (side > 0 ? 1 : 0);
  const PieceVal& pv = f.pieces[piece];
  return {pv.items, eval_lin(pv.money, bs, bo)};
}

// Value for the deviating agent when it bids `mine` against the opponent's
// canonical bid `theirs`, with continuation values f for the deviator.
//
// A matched pair of bumped bids is the limit of both agents bidding just
// above the common amount, so its coin flip averages the one-sided limits of
// the winning and losing branches rather than the values at the amount
// itself.  (At a ratio threshold those differ; using the threshold value
// would let the loser ride the tie-regime jump.)
inline LexUtility deviation_value(const LevelFn& f, const Rat& b_self, const Rat& b_other,
                                  const Bid& mine, const Bid& theirs) {
  const int c = bid_compare(mine, theirs);
  const LexUtility win = [&] {
    LexUtility u = f.eval(b_self - mine.amount, b_other);
    u.items += 1;
    return u;
  }();
  if (c > 0) return win;
  const Rat paid = theirs.amount;
  const Rat left = b_other > paid ? b_other - paid : Rat(0);
  const LexUtility lose = f.eval(b_self, left);
  if (c < 0) return lose;
  if (mine.plus) {
    LexUtility wlim = eval_beside(f, b_self - mine.amount, b_other, -1);
    wlim.items += 1;
    const LexUtility llim = eval_beside(f, b_self, left, +1);
    return half_sum(wlim, llim);
  }
  return half_sum(win, lose);
}

}  // namespace detail

inline DeviationReport one_shot_deviation_check(Engine& eng, const Rat& b1, const Rat& b2,
                                                int k, int bound = 6) {
  if (k > bound) throw std::invalid_argument("deviation audit: too many items for exhaustive scan");
  const OutcomeTrace trace = canonical_trace(eng, b1, b2, k);
  if (trace.kind != TraceKind::Deterministic)
    throw std::invalid_argument("deviation audit: trace resolves by coin flip");

  DeviationReport rep;
  rep.b1 = b1;
  rep.b2 = b2;
  rep.k = k;

  Rat cb1 = b1, cb2 = b2;
  for (int j = 0; j < k; ++j) {
    const TraceRound& tr = trace.rounds[static_cast<std::size_t>(j)];
    const int m = k - j;
    const LevelFn& cont = eng.level(m - 1);
    const RoundResolution rr = resolve_round(cont, cb1, cb2);
    const std::pair<LexUtility, LexUtility> eq = round_values(cont, cb1, cb2, rr);

    for (int agent = 1; agent <= 2; ++agent) {
      const Rat& bs = agent == 1 ? cb1 : cb2;
      const Rat& bo = agent == 1 ? cb2 : cb1;
      const Bid& theirs = agent == 1 ? tr.bid2 : tr.bid1;
      const LexUtility& eq_u = agent == 1 ? eq.first : eq.second;

      std::vector<Rat> amounts = critical_breakpoints(cont, bs, bo);
      const std::size_t base = amounts.size();  // midpoints of the original grid only
      for (std::size_t i = 0; i + 1 < base; ++i)
        amounts.push_back((amounts[i] + amounts[i + 1]) / 2);
      amounts.push_back(Rat(0));
      amounts.push_back(theirs.amount);

      for (const Rat& a : amounts) {
        if (a < 0 || a > bs) continue;
        for (const bool plus : {false, true}) {
          if (plus && !(a < bs)) continue;  // bump needs strict headroom
          const Bid mine{a, plus};
          const LexUtility dev = detail::deviation_value(cont, bs, bo, mine, theirs);
          DeviationCheck chk;
          chk.round = j + 1;
          chk.agent = agent;
          chk.bid = mine;
          chk.deviation_utility = dev;
          chk.equilibrium_utility = eq_u;
          chk.gain_sign = detail::sign_of_gain(dev, eq_u);
          rep.checks.push_back(chk);
          if (static_cast<int>(chk.gain_sign) > static_cast<int>(rep.worst_gain_sign))
            rep.worst_gain_sign = chk.gain_sign;
        }
      }
    }

    if (tr.winner == 1)
      cb1 -= tr.price;
    else
      cb2 -= tr.price;
  }
  return rep;
}

// ===========================================================================
// Discretized backward induction
// ===========================================================================
//
// Independent finite-grid solver: budgets and bids live on a uniform money
// grid of step delta, and each state of the k-round game is solved by direct
// backward induction over integer grid indices.  Item counts are tracked in
// units of 1/2^k item and money in units of delta/2^k so that coin-flip
// averaging stays exact in int64.  The continuous engine must agree with the
// grid solution up to O(delta) away from tie regimes.

struct GridRoundRow {
  int winner = 0;
  Rat price;
  Bid bid1, bid2;
};

struct GridSolution {
  int k = 0;
  Rat delta;
  std::vector<GridRoundRow> rounds;  // realized root trace; empty tail after a tie
  LexUtility u1, u2;                 // root values
  bool tie_encountered = false;      // a coin flip occurred at the root or on the path
};

namespace detail {

struct GridLevel {
  // Values and cutoffs indexed by state s = x * (n2 + 1) + y, where x and y
  // are the two budgets in delta units.
  std::vector<std::int64_t> i1, m1, i2, m2;
  std::vector<std::int32_t> c1, c2;
};

struct GridVal {
  std::int64_t items;
  std::int64_t money;
};

inline bool grid_lex_ge(const GridVal& a, const GridVal& b) {
  if (a.items != b.items) return a.items > b.items;
  return a.money >= b.money;
}

}  // namespace detail

inline GridSolution grid_backward_induction(const Rat& b1, const Rat& b2, int k,
                                            const Rat& delta, int bound = 3) {
  if (!(b1 > 0) || !(b2 > 0)) throw std::invalid_argument("grid solver: budgets must be positive");
  if (k < 1 || k > bound) throw std::invalid_argument("grid solver: item count out of range");
  if (!(delta > 0)) throw std::invalid_argument("grid solver: step must be positive");
  const Rat q1 = b1 / delta, q2 = b2 / delta;
  if (denominator(q1) != 1 || denominator(q2) != 1)
    throw std::invalid_argument("grid solver: budgets must be multiples of the step");
  const auto n1 = static_cast<std::int64_t>(numerator(q1));
  const auto n2 = static_cast<std::int64_t>(numerator(q2));
  const std::int64_t unit = std::int64_t{1} << k;  // one item, in item units
  const std::int64_t w = n2 + 1;
  const std::size_t states = static_cast<std::size_t>((n1 + 1) * w);

  std::vector<detail::GridLevel> levels(static_cast<std::size_t>(k) + 1);
  {
    detail::GridLevel& base = levels[0];
    base.i1.assign(states, 0);
    base.i2.assign(states, 0);
    base.m1.resize(states);
    base.m2.resize(states);
    for (std::int64_t x = 0; x <= n1; ++x)
      for (std::int64_t y = 0; y <= n2; ++y) {
        const std::size_t s = static_cast<std::size_t>(x * w + y);
        base.m1[s] = x * unit;
        base.m2[s] = y * unit;
      }
  }

  for (int m = 1; m <= k; ++m) {
    const detail::GridLevel& prev = levels[static_cast<std::size_t>(m - 1)];
    detail::GridLevel& cur = levels[static_cast<std::size_t>(m)];
    cur.i1.resize(states);
    cur.m1.resize(states);
    cur.i2.resize(states);
    cur.m2.resize(states);
    cur.c1.resize(states);
    cur.c2.resize(states);

    const auto val1 = [&](std::int64_t x, std::int64_t y) {
      const std::size_t s = static_cast<std::size_t>(x * w + y);
      return detail::GridVal{prev.i1[s], prev.m1[s]};
    };
    const auto val2 = [&](std::int64_t x, std::int64_t y) {
      const std::size_t s = static_cast<std::size_t>(x * w + y);
      return detail::GridVal{prev.i2[s], prev.m2[s]};
    };
    const auto win1 = [&](std::int64_t x, std::int64_t y, std::int64_t a) {
      detail::GridVal v = val1(x - a, y);
      v.items += unit;
      return v;
    };
    const auto lose1 = [&](std::int64_t x, std::int64_t y, std::int64_t a) {
      return val1(x, y > a ? y - a : 0);
    };
    const auto win2 = [&](std::int64_t x, std::int64_t y, std::int64_t a) {
      detail::GridVal v = val2(x, y - a);
      v.items += unit;
      return v;
    };
    const auto lose2 = [&](std::int64_t x, std::int64_t y, std::int64_t a) {
      return val2(x > a ? x - a : 0, y);
    };

    for (std::int64_t x = 0; x <= n1; ++x) {
      for (std::int64_t y = 0; y <= n2; ++y) {
        const std::size_t s = static_cast<std::size_t>(x * w + y);
        std::int64_t c1 = 0;
        for (std::int64_t a = x; a >= 0; --a)
          if (detail::grid_lex_ge(win1(x, y, a), lose1(x, y, a))) {
            c1 = a;
            break;
          }
        std::int64_t c2 = 0;
        for (std::int64_t a = y; a >= 0; --a)
          if (detail::grid_lex_ge(win2(x, y, a), lose2(x, y, a))) {
            c2 = a;
            break;
          }
        cur.c1[s] = static_cast<std::int32_t>(c1);
        cur.c2[s] = static_cast<std::int32_t>(c2);

        detail::GridVal v1{}, v2{};
        if (c1 == c2) {
          const detail::GridVal w1 = win1(x, y, c1), l1 = lose1(x, y, c1);
          const detail::GridVal w2 = win2(x, y, c2), l2 = lose2(x, y, c2);
          internal_check(((w1.items + l1.items) % 2 | (w1.money + l1.money) % 2 |
                          (w2.items + l2.items) % 2 | (w2.money + l2.money) % 2) == 0,
                         "grid solver: coin flip average is not on the value grid");
          v1 = {(w1.items + l1.items) / 2, (w1.money + l1.money) / 2};
          v2 = {(w2.items + l2.items) / 2, (w2.money + l2.money) / 2};
        } else if (c1 > c2) {
          v1 = win1(x, y, c2);
          v2 = lose2(x, y, c2);
        } else {
          v2 = win2(x, y, c1);
          v1 = lose1(x, y, c1);
        }
        cur.i1[s] = v1.items;
        cur.m1[s] = v1.money;
        cur.i2[s] = v2.items;
        cur.m2[s] = v2.money;
      }
    }

    // One-step consistency: re-derive each state value from the stored
    // cutoffs and the previous level, written against the stored arrays.
    for (std::int64_t x = 0; x <= n1; ++x)
      for (std::int64_t y = 0; y <= n2; ++y) {
        const std::size_t s = static_cast<std::size_t>(x * w + y);
        const std::int64_t c1 = cur.c1[s], c2 = cur.c2[s];
        detail::GridVal r1{}, r2{};
        if (c1 == c2) {
          const detail::GridVal w1 = win1(x, y, c1), l1 = lose1(x, y, c1);
          const detail::GridVal w2 = win2(x, y, c2), l2 = lose2(x, y, c2);
          r1 = {(w1.items + l1.items) / 2, (w1.money + l1.money) / 2};
          r2 = {(w2.items + l2.items) / 2, (w2.money + l2.money) / 2};
        } else if (c1 > c2) {
          r1 = win1(x, y, c2);
          r2 = lose2(x, y, c2);
        } else {
          r2 = win2(x, y, c1);
          r1 = lose1(x, y, c1);
        }
        internal_check(r1.items == cur.i1[s] && r1.money == cur.m1[s] &&
                           r2.items == cur.i2[s] && r2.money == cur.m2[s],
                       "grid solver: one-step consistency violated");
      }
  }

  GridSolution sol;
  sol.k = k;
  sol.delta = delta;
  const auto to_items = [&](std::int64_t v) { return Rat(v, unit); };
  const auto to_money = [&](std::int64_t v) { return Rat(v) * delta / unit; };
  {
    const detail::GridLevel& top = levels[static_cast<std::size_t>(k)];
    const std::size_t root = static_cast<std::size_t>(n1 * w + n2);
    sol.u1 = {to_items(top.i1[root]), to_money(top.m1[root])};
    sol.u2 = {to_items(top.i2[root]), to_money(top.m2[root])};
  }

  std::int64_t x = n1, y = n2;
  for (int m = k; m >= 1; --m) {
    const detail::GridLevel& lev = levels[static_cast<std::size_t>(m)];
    const std::size_t s = static_cast<std::size_t>(x * w + y);
    const std::int64_t c1 = lev.c1[s], c2 = lev.c2[s];
    if (c1 == c2) {
      sol.tie_encountered = true;
      break;
    }
    GridRoundRow row;
    row.winner = c1 > c2 ? 1 : 2;
    const std::int64_t price = c1 > c2 ? c2 : c1;
    row.price = Rat(price) * delta;
    row.bid1 = {Rat(c1 > c2 ? price : c1) * delta, row.winner == 1};
    row.bid2 = {Rat(c1 > c2 ? c2 : price) * delta, row.winner == 2};
    sol.rounds.push_back(row);
    if (row.winner == 1)
      x -= price;
    else
      y -= price;
  }
  return sol;
}

// ===========================================================================
// Cross-checking the continuous solution against the grid
// ===========================================================================

struct GridComparison {
  bool winner_match = true;
  Rat max_price_gap;           // max |continuous price - grid price| over rounds
  std::pair<Rat, Rat> utility_gap;  // per agent: max(|d items|, |d money|)
  bool tie_encountered = false;
};

inline GridComparison compare_canonical_vs_grid(Engine& eng, const Rat& b1, const Rat& b2,
                                                int k, const Rat& delta) {
  const GridSolution grid = grid_backward_induction(b1, b2, k, delta);
  const OutcomeTrace cont = canonical_trace(eng, b1, b2, k);

  GridComparison cmp;
  cmp.tie_encountered = grid.tie_encountered || cont.kind == TraceKind::Tie;
  if (cmp.tie_encountered) {
    cmp.winner_match = false;
    return cmp;
  }
  if (grid.rounds.size() != cont.rounds.size()) {
    cmp.winner_match = false;
    return cmp;
  }
  const auto abs_rat = [](const Rat& v) { return v < 0 ? -v : v; };
  for (std::size_t j = 0; j < grid.rounds.size(); ++j) {
    if (grid.rounds[j].winner != cont.rounds[j].winner) cmp.winner_match = false;
    const Rat gap = abs_rat(grid.rounds[j].price - cont.rounds[j].price);
    if (gap > cmp.max_price_gap) cmp.max_price_gap = gap;
  }
  const auto bump = [&](Rat& slot, const Rat& gap) {
    if (gap > slot) slot = gap;
  };
  bump(cmp.utility_gap.first, abs_rat(grid.u1.items - cont.u1.items));
  bump(cmp.utility_gap.first, abs_rat(grid.u1.money - cont.u1.money));
  bump(cmp.utility_gap.second, abs_rat(grid.u2.items - cont.u2.items));
  bump(cmp.utility_gap.second, abs_rat(grid.u2.money - cont.u2.money));
  return cmp;
}

}  // namespace seqauction
