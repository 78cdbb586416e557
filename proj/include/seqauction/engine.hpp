#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "seqauction/piecewise.hpp"

namespace seqauction {

enum class CrossKind { Indifference, WinDiscontinuity, Nonexistent };
enum class WinPreference { StrictWin, Indifferent };

struct CriticalPriceResult {
  Rat price;
  CrossKind kind = CrossKind::Nonexistent;
  WinPreference preference_at_price = WinPreference::StrictWin;
};

namespace detail {

constexpr int kClampPiece = -2;  // the flat L segment where the opponent is already drained

// Where the round-k crossing problem W(p) vs L(p) can change shape: domain
// ends, the L clamp point, and pullbacks of every edge of the continuation
// value through both arguments.
inline std::vector<Rat> crossing_breakpoints(const LevelFn& f, const Rat& bs, const Rat& bo) {
  std::vector<Rat> pts;
  pts.push_back(Rat(0));
  pts.push_back(bs);
  if (bo > 0) {
    if (bo < bs) pts.push_back(bo);
    const Rat rho = bs / bo;
    for (const Rat& t : f.edges) {
      if (t < rho) pts.push_back(bs - t * bo);
      if (t > rho) {
        Rat p = bo - bs / t;
        if (p > 0 && p < bs) pts.push_back(p);
      }
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct CrossingCert {
  enum class Type { InteriorRoot, WJump, LJump, Cap, Degenerate };
  Type type = Type::Degenerate;
  Rat price;
  LexUtility w_at;  // value of winning at price, atom-aware
  LexUtility l_at;  // value of losing at price, atom-aware
  int w_piece = -1;
  int l_piece = -1;  // kClampPiece when the L side is clamped there
  int edge = -1;     // continuation edge index for WJump/LJump
};

inline LexUtility w_value(const LevelFn& f, const Rat& bs, const Rat& bo, const Rat& p) {
  LexUtility u = f.eval(bs - p, bo);
  u.items += 1;
  return u;
}

inline LexUtility l_value(const LevelFn& f, const Rat& bs, const Rat& bo, const Rat& p) {
  if (p >= bo) return {Rat(f.k), bs};
  return f.eval(bs, bo - p);
}

// Exact crossing of W(p) = bump + U(B_s - p, B_o) against the clamped
// L(p) = U(B_s, max(B_o - p, 0)) over p in [0, B_s]. W strictly decreases and
// L does not decrease, so the sign has a single change; we bracket it over the
// breakpoints and either solve the matching linear money forms or certify the
// crossing at a breakpoint / at the cap.
inline CrossingCert solve_crossing(const LevelFn& f, const Rat& bs, const Rat& bo) {
  internal_check(bs >= 0 && bo >= 0, "solve_crossing: negative budget");
  CrossingCert cert;
  const std::vector<Rat> pts = crossing_breakpoints(f, bs, bo);
  const int n = static_cast<int>(pts.size());

  std::vector<int> sign(n);
  for (int i = 0; i < n; ++i)
    sign[i] = lex_compare(w_value(f, bs, bo, pts[i]), l_value(f, bs, bo, pts[i]));
  int first_neg = n;
  for (int i = 0; i < n; ++i) {
    if (sign[i] < 0) {
      first_neg = i;
      break;
    }
  }
  for (int i = first_neg + 1; i < n; ++i)
    internal_check(sign[i] < 0, "solve_crossing: sign not monotone at breakpoints");
  internal_check(first_neg != 0, "solve_crossing: losing preferred at price 0");

  if (first_neg == n) {
    // W stays ahead through the cap
    cert.price = bs;
    cert.w_at = w_value(f, bs, bo, bs);
    cert.l_at = l_value(f, bs, bo, bs);
    if (cert.w_at == cert.l_at) {
      cert.type = CrossingCert::Type::Degenerate;
      return cert;
    }
    cert.type = CrossingCert::Type::Cap;
    if (bo > bs) {
      const Rat q = bs / (bo - bs);
      if (f.edge_index(q) >= 0) {
        cert.type = CrossingCert::Type::Degenerate;
        return cert;
      }
      cert.l_piece = f.piece_index(q);
      internal_check(f.pieces[cert.l_piece].items == 0, "solve_crossing: cap against item-bearing piece");
    } else {
      internal_check(f.k == 0, "solve_crossing: cap in clamped region above level 0");
      cert.l_piece = kClampPiece;
    }
    return cert;
  }

  const Rat& pL = pts[first_neg - 1];
  const Rat& pR = pts[first_neg];
  internal_check(bo > 0, "solve_crossing: interior sign change with drained opponent");

  // one-sided limits just to the right of pL
  const Rat rw = (bs - pL) / bo;
  const int w_edge = f.edge_index(rw);
  const int w_right_piece = (w_edge >= 0) ? w_edge : f.piece_index(rw);
  LexUtility w_rl{f.pieces[w_right_piece].items + 1,
                  eval_lin(f.pieces[w_right_piece].money, bs - pL, bo)};

  LexUtility l_rl;
  int l_edge = -1;
  bool l_clamped_right = false;
  if (pL >= bo) {
    l_rl = {Rat(f.k), bs};
    l_clamped_right = true;
  } else {
    const Rat rl = bs / (bo - pL);
    l_edge = f.edge_index(rl);
    const int l_right_piece = (l_edge >= 0) ? l_edge + 1 : f.piece_index(rl);
    l_rl = {f.pieces[l_right_piece].items, eval_lin(f.pieces[l_right_piece].money, bs, bo - pL)};
  }

  if (lex_compare(w_rl, l_rl) <= 0) {
    // crossing sits exactly at pL
    cert.price = pL;
    cert.w_at = w_value(f, bs, bo, pL);
    cert.l_at = l_value(f, bs, bo, pL);
    internal_check(cert.w_at >= cert.l_at, "solve_crossing: losing strictly preferred at crossing");
    const bool has_w = w_edge >= 0;
    const bool has_l = (pL < bo && l_edge >= 0);
    const bool at_clamp = (pL == bo);
    const bool at_zero = (pL == 0);
    const int provenance = int(has_w) + int(has_l) + int(at_clamp) + int(at_zero);
    if (provenance != 1) {
      cert.type = CrossingCert::Type::Degenerate;
      return cert;
    }
    if (has_w) {
      cert.type = CrossingCert::Type::WJump;
      cert.edge = w_edge;
      if (pL > bo) {
        cert.l_piece = kClampPiece;
      } else {
        const Rat rl = bs / (bo - pL);
        if (f.edge_index(rl) >= 0) {
          cert.type = CrossingCert::Type::Degenerate;
          return cert;
        }
        cert.l_piece = f.piece_index(rl);
      }
      return cert;
    }
    if (has_l) {
      internal_check(cert.w_at == cert.l_at, "solve_crossing: strict preference at an L-side jump");
      cert.type = CrossingCert::Type::LJump;
      cert.edge = l_edge;
      if (f.edge_index(rw) >= 0) {
        cert.type = CrossingCert::Type::Degenerate;
        return cert;
      }
      cert.w_piece = f.piece_index(rw);
      return cert;
    }
    // clamp kink or domain end: isolated coincidences
    cert.type = CrossingCert::Type::Degenerate;
    return cert;
  }

  // strict sign change inside (pL, pR): equal item masses, linear money root
  const Rat pm = mediant(pL, pR);
  const Rat rwm = (bs - pm) / bo;
  internal_check(f.edge_index(rwm) < 0, "solve_crossing: interval midpoint on a W edge");
  const int wpi = f.piece_index(rwm);
  const Rat a_w = f.pieces[wpi].money.a;
  const Rat b_w = f.pieces[wpi].money.b;
  const Rat iw = f.pieces[wpi].items + 1;

  bool clamp = (pL >= bo);
  Rat a_l, b_l, il;
  int lpi = kClampPiece;
  if (clamp) {
    a_l = 1;
    b_l = 0;
    il = Rat(f.k);
  } else {
    const Rat rlm = bs / (bo - pm);
    internal_check(f.edge_index(rlm) < 0, "solve_crossing: interval midpoint on an L edge");
    lpi = f.piece_index(rlm);
    a_l = f.pieces[lpi].money.a;
    b_l = f.pieces[lpi].money.b;
    il = f.pieces[lpi].items;
  }
  internal_check(iw == il, "solve_crossing: unequal item masses across an interior sign change");

  const Rat den = b_l - a_w;
  internal_check(den != 0, "solve_crossing: degenerate money slopes");
  const Rat phat = (a_l * bs + b_l * bo - a_w * bs - b_w * bo) / den;
  internal_check(pL < phat && phat < pR, "solve_crossing: interior root escaped its bracket");

  cert.type = CrossingCert::Type::InteriorRoot;
  cert.price = phat;
  cert.w_piece = wpi;
  cert.l_piece = lpi;
  cert.w_at = {iw, a_w * (bs - phat) + b_w * bo};
  cert.l_at = cert.w_at;
  return cert;
}

}  // namespace detail

inline CriticalPriceResult to_critical_price(const detail::CrossingCert& c, const Rat& bs) {
  CriticalPriceResult r;
  r.price = c.price;
  const bool equal = (c.w_at == c.l_at);
  r.preference_at_price = equal ? WinPreference::Indifferent : WinPreference::StrictWin;
  if (equal) {
    r.kind = CrossKind::Indifference;
  } else if (c.type == detail::CrossingCert::Type::Cap ||
             (c.type == detail::CrossingCert::Type::Degenerate && c.price == bs)) {
    r.kind = CrossKind::Nonexistent;
  } else {
    r.kind = CrossKind::WinDiscontinuity;
  }
  return r;
}

// All prices where the win/lose comparison against f can change shape; the
// deviation auditor uses these as its candidate grid.
inline std::vector<Rat> critical_breakpoints(const LevelFn& f, const Rat& bs, const Rat& bo) {
  return detail::crossing_breakpoints(f, bs, bo);
}

// One canonical round at budgets (b1, b2) on top of the continuation values f.
// Equal effective prices tie (fair coin at the shared price); otherwise the
// agent whose crossing sits strictly higher wins at the other's price.
struct RoundResolution {
  bool tie = false;
  int winner = 0;
  Rat price;
  detail::CrossingCert c1, c2;
};

inline RoundResolution resolve_round(const LevelFn& prev, const Rat& b1, const Rat& b2) {
  RoundResolution r;
  r.c1 = detail::solve_crossing(prev, b1, b2);
  r.c2 = detail::solve_crossing(prev, b2, b1);
  if (r.c1.price == r.c2.price) {
    r.tie = true;
    r.price = r.c1.price;
  } else if (r.c1.price > r.c2.price) {
    r.winner = 1;
    r.price = r.c2.price;
  } else {
    r.winner = 2;
    r.price = r.c1.price;
  }
  return r;
}

// Exact utilities of the resolved round with canonical continuation.
inline std::pair<LexUtility, LexUtility> round_values(const LevelFn& prev, const Rat& b1,
                                                      const Rat& b2, const RoundResolution& r) {
  if (r.tie) return {half_sum(r.c1.w_at, r.c1.l_at), half_sum(r.c2.w_at, r.c2.l_at)};
  if (r.winner == 1) {
    LexUtility u1 = prev.eval(b1 - r.price, b2);
    u1.items += 1;
    return {u1, prev.eval(b2, b1 - r.price)};
  }
  LexUtility u2 = prev.eval(b2 - r.price, b1);
  u2.items += 1;
  return {prev.eval(b1, b2 - r.price), u2};
}

namespace detail {

// Open ratio window over which a sampled resolution certificate stays valid;
// every validity condition is linear in r, imposed as A*r + C > 0.
struct Window {
  Rat lo, hi;
  bool empty = false;

  void add_pos(const Rat& A, const Rat& C) {
    if (empty) return;
    if (A == 0) {
      if (C <= 0) empty = true;
      return;
    }
    const Rat bound = -C / A;
    if (A > 0) {
      if (bound > lo) lo = bound;
    } else {
      if (bound < hi) hi = bound;
    }
    if (!(lo < hi)) empty = true;
  }
};

// X >= Y for values with constant item masses and money linear in rho.
template <typename AddFn>
void add_lex_ge(const Rat& items_x, const LinForm& fx, const Rat& items_y, const LinForm& fy,
                AddFn&& add) {
  if (items_x > items_y) return;
  internal_check(items_x == items_y, "window: lex comparison impossible at its own sample");
  const Rat A = fx.a - fy.a;
  const Rat C = fx.b - fy.b;
  if (A == 0 && C == 0) return;
  add(A, C);
}

// ratio = rho / (d0 + d1*rho) constrained into the open piece interval,
// including positivity of the denominator.
template <typename AddFn>
void add_mobius_membership(const LevelFn& f, int piece, const Rat& d0, const Rat& d1, AddFn&& add) {
  add(d1, d0);
  const Rat t_lo = f.piece_lo(piece);
  add(1 - t_lo * d1, -t_lo * d0);
  if (!f.piece_hi_inf(piece)) {
    const Rat t_hi = f.piece_hi(piece);
    add(t_hi * d1 - 1, t_hi * d0);
  }
}

// ratio = u*rho + v constrained into the open piece interval.
template <typename AddFn>
void add_direct_membership(const LevelFn& f, int piece, const Rat& u, const Rat& v, AddFn&& add) {
  add(u, v - f.piece_lo(piece));
  if (!f.piece_hi_inf(piece)) add(-u, f.piece_hi(piece) - v);
}

// Turns a sampled certificate into its symbolic price form (own orientation,
// price = a*B_self + b*B_other) while emitting the linear validity window
// constraints through add(A, C) meaning A*rho + C > 0 in the agent's own ratio.
template <typename AddFn>
std::optional<LinForm> symbolize(const LevelFn& f, const CrossingCert& c, AddFn&& add) {
  using Type = CrossingCert::Type;
  switch (c.type) {
    case Type::InteriorRoot: {
      const Rat a_w = f.pieces[c.w_piece].money.a;
      const Rat b_w = f.pieces[c.w_piece].money.b;
      const bool clamp = (c.l_piece == kClampPiece);
      const Rat a_l = clamp ? Rat(1) : f.pieces[c.l_piece].money.a;
      const Rat b_l = clamp ? Rat(0) : f.pieces[c.l_piece].money.b;
      const Rat den = b_l - a_w;
      internal_check(den != 0, "symbolize: degenerate money slopes");
      const Rat alpha = (a_l - a_w) / den;
      const Rat beta = (b_l - b_w) / den;
      add(alpha, beta);          // price > 0
      add(1 - alpha, -beta);     // price < B_self
      add_direct_membership(f, c.w_piece, 1 - alpha, -beta, add);
      if (clamp) {
        add(alpha, beta - 1);    // price > B_other
      } else {
        add_mobius_membership(f, c.l_piece, 1 - beta, -alpha, add);
      }
      return LinForm{alpha, beta};
    }
    case Type::WJump: {
      const Rat t = f.edges[c.edge];
      add(Rat(1), -t);  // price > 0
      const PieceVal& above = f.pieces[c.edge + 1];
      const PieceVal& below = f.pieces[c.edge];
      const Rat w_ll_items = above.items + 1;
      const LinForm w_ll_money{Rat(0), above.money.a * t + above.money.b};
      const Rat w_rl_items = below.items + 1;
      const LinForm w_rl_money{Rat(0), below.money.a * t + below.money.b};
      Rat l_items;
      LinForm l_money;
      if (c.l_piece == kClampPiece) {
        add(Rat(1), -t - 1);  // price > B_other
        l_items = Rat(f.k);
        l_money = {Rat(1), Rat(0)};
      } else {
        add_mobius_membership(f, c.l_piece, 1 + t, Rat(-1), add);
        const PieceVal& lp = f.pieces[c.l_piece];
        l_items = lp.items;
        l_money = {lp.money.a - lp.money.b, lp.money.b * (1 + t)};
      }
      add_lex_ge(w_ll_items, w_ll_money, l_items, l_money, add);
      add_lex_ge(l_items, l_money, w_rl_items, w_rl_money, add);
      return LinForm{Rat(1), -t};
    }
    case Type::LJump: {
      const Rat t = f.edges[c.edge];
      const Rat inv_t = Rat(1) / t;
      add(-inv_t, Rat(1));     // price > 0
      add(1 + inv_t, Rat(-1));  // price < B_self
      add_direct_membership(f, c.w_piece, 1 + inv_t, Rat(-1), add);
      const PieceVal& wp = f.pieces[c.w_piece];
      const Rat w_items = wp.items + 1;
      const LinForm w_money{wp.money.a * (1 + inv_t), wp.money.b - wp.money.a};
      const PieceVal& below = f.pieces[c.edge];
      const PieceVal& above = f.pieces[c.edge + 1];
      const LinForm l_ll{below.money.a + below.money.b * inv_t, Rat(0)};
      const LinForm l_rl{above.money.a + above.money.b * inv_t, Rat(0)};
      add_lex_ge(w_items, w_money, below.items, l_ll, add);
      add_lex_ge(above.items, l_rl, w_items, w_money, add);
      return LinForm{-inv_t, Rat(1)};
    }
    case Type::Cap: {
      if (c.l_piece == kClampPiece) {
        add(Rat(1), Rat(-1));  // B_self > B_other
      } else {
        add(Rat(-1), Rat(1));  // B_self < B_other
        add_mobius_membership(f, c.l_piece, Rat(1), Rat(-1), add);
        internal_check(f.pieces[c.l_piece].items == 0, "symbolize: cap against item-bearing piece");
      }
      return LinForm{Rat(1), Rat(0)};
    }
    case Type::Degenerate:
      return std::nullopt;
  }
  return std::nullopt;
}

struct EmittedPiece {
  Rat lo, hi;
  bool hi_inf = false;
  PieceVal val;
};

inline void sort_merge_verify(std::vector<EmittedPiece>& v, const Rat& domain_lo, bool closes_at_inf,
                              const Rat& domain_hi) {
  internal_check(!v.empty(), "level build: empty piece pool");
  std::sort(v.begin(), v.end(), [](const EmittedPiece& a, const EmittedPiece& b) { return a.lo < b.lo; });
  internal_check(v.front().lo == domain_lo, "level build: pool does not start at its domain");
  std::vector<EmittedPiece> merged;
  merged.push_back(v.front());
  for (std::size_t i = 1; i < v.size(); ++i) {
    EmittedPiece& prev = merged.back();
    internal_check(!prev.hi_inf && prev.hi == v[i].lo, "level build: pool does not tile its domain");
    if (prev.val == v[i].val) {
      prev.hi = v[i].hi;
      prev.hi_inf = v[i].hi_inf;
    } else {
      merged.push_back(v[i]);
    }
  }
  if (closes_at_inf)
    internal_check(merged.back().hi_inf, "level build: pool does not reach infinity");
  else
    internal_check(!merged.back().hi_inf && merged.back().hi == domain_hi,
                   "level build: pool does not reach its domain end");
  v = std::move(merged);
}

// Builds the (k+1)-item level from the k-item level: worklist over open ratio
// intervals in (0, 1); each sample is solved exactly, its resolution is
// symbolized into price/value forms plus a validity window, the window is
// emitted for both orientations at once, and leftovers re-enter the queue.
// Degenerate samples become edges and the interval splits around them.
inline LevelFn build_level(const LevelFn& prev) {
  const int k = prev.k + 1;
  std::vector<Rat> seeds;
  for (int j = 1; j <= k; ++j) {
    const Rat t(j, k - j + 1);
    if (t < 1) seeds.push_back(t);
  }
  for (int j = 0; j <= k; ++j) {
    const Rat t(j + 1, k - j + 1);
    if (t < 1) seeds.push_back(t);
  }
  for (const Rat& t : prev.edges)
    if (t < 1) seeds.push_back(t);
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::deque<std::pair<Rat, Rat>> work;
  Rat cursor(0);
  for (const Rat& s : seeds) {
    work.emplace_back(cursor, s);
    cursor = s;
  }
  work.emplace_back(cursor, Rat(1));

  std::vector<EmittedPiece> low, high;
  long iterations = 0;
  while (!work.empty()) {
    internal_check(++iterations < 200000, "level build: refinement did not terminate");
    auto [lo, hi] = work.front();
    work.pop_front();
    if (!(lo < hi)) continue;
    const Rat rhat = mediant(lo, hi);

    const CrossingCert c1 = solve_crossing(prev, rhat, Rat(1));
    const CrossingCert c2 = solve_crossing(prev, Rat(1), rhat);

    Window w{lo, hi};
    auto add1 = [&w](const Rat& A, const Rat& C) { w.add_pos(A, C); };
    auto add2 = [&w](const Rat& A, const Rat& C) { w.add_pos(C, A); };  // rho = 1/r
    auto split_here = [&]() {
      work.emplace_back(lo, rhat);
      work.emplace_back(rhat, hi);
    };

    const auto p1 = symbolize(prev, c1, add1);
    const auto p2own = symbolize(prev, c2, add2);
    if (!p1 || !p2own) {
      split_here();
      continue;
    }
    const LinForm P1 = *p1;                        // in (B1, B2)
    const LinForm P2{p2own->b, p2own->a};          // swapped into (B1, B2)

    // value of the continuation at budgets given as forms in (B1, B2);
    // emits membership/positivity constraints, nullopt forces a split
    auto lookup = [&](const LinForm& X, const LinForm& Y) -> std::optional<std::pair<Rat, LinForm>> {
      const Rat xv = X.a * rhat + X.b;
      const Rat yv = Y.a * rhat + Y.b;
      if (xv == 0 || yv == 0) return std::nullopt;
      internal_check(xv > 0 && yv > 0, "level build: negative composed budget");
      w.add_pos(X.a, X.b);
      w.add_pos(Y.a, Y.b);
      const bool constant_ratio = (X.a * Y.b == X.b * Y.a);
      const Rat q = xv / yv;
      const int ei = prev.edge_index(q);
      if (constant_ratio) {
        if (ei >= 0) {
          const AtomVal& at = prev.atoms[ei];
          return std::make_pair(at.items, LinForm{at.money_at_unit * Y.a, at.money_at_unit * Y.b});
        }
        const PieceVal& pc = prev.pieces[prev.piece_index(q)];
        return std::make_pair(pc.items,
                              LinForm{pc.money.a * X.a + pc.money.b * Y.a,
                                      pc.money.a * X.b + pc.money.b * Y.b});
      }
      if (ei >= 0) return std::nullopt;
      const int pi = prev.piece_index(q);
      const Rat t_lo = prev.piece_lo(pi);
      w.add_pos(X.a - t_lo * Y.a, X.b - t_lo * Y.b);
      if (!prev.piece_hi_inf(pi)) {
        const Rat t_hi = prev.piece_hi(pi);
        w.add_pos(t_hi * Y.a - X.a, t_hi * Y.b - X.b);
      }
      const PieceVal& pc = prev.pieces[pi];
      return std::make_pair(pc.items, LinForm{pc.money.a * X.a + pc.money.b * Y.a,
                                              pc.money.a * X.b + pc.money.b * Y.b});
    };
    auto bump = [](std::optional<std::pair<Rat, LinForm>> v) {
      if (v) v->first += 1;
      return v;
    };

    const LinForm kB1{Rat(1), Rat(0)};
    const LinForm kB2{Rat(0), Rat(1)};
    std::optional<std::pair<Rat, LinForm>> u1, u2;
    if (c1.price > c2.price) {
      w.add_pos(P1.a - P2.a, P1.b - P2.b);
      const LinForm rest{1 - P2.a, -P2.b};  // B1 - price
      u1 = bump(lookup(rest, kB2));
      u2 = lookup(kB2, rest);
    } else if (c2.price > c1.price) {
      w.add_pos(P2.a - P1.a, P2.b - P1.b);
      const LinForm rest{-P1.a, 1 - P1.b};  // B2 - price
      u2 = bump(lookup(rest, kB1));
      u1 = lookup(kB1, rest);
    } else {
      if (!(P1 == P2)) {
        split_here();
        continue;
      }
      const LinForm rest1{1 - P1.a, -P1.b};
      const LinForm rest2{-P1.a, 1 - P1.b};
      const auto w1 = bump(lookup(rest1, kB2));
      const auto l1 = lookup(kB1, rest2);
      const auto w2 = bump(lookup(rest2, kB1));
      const auto l2 = lookup(kB2, rest1);
      if (w1 && l1 && w2 && l2) {
        u1 = std::make_pair((w1->first + l1->first) / 2,
                            LinForm{(w1->second.a + l1->second.a) / 2,
                                    (w1->second.b + l1->second.b) / 2});
        u2 = std::make_pair((w2->first + l2->first) / 2,
                            LinForm{(w2->second.a + l2->second.a) / 2,
                                    (w2->second.b + l2->second.b) / 2});
      }
    }
    if (!u1 || !u2) {
      split_here();
      continue;
    }
    if (w.empty || !(w.lo < rhat) || !(rhat < w.hi)) {
      // some validity constraint is tight exactly at the sample: the sample
      // is a boundary ratio, so make it an interval endpoint and re-solve
      split_here();
      continue;
    }

    low.push_back({w.lo, w.hi, false, PieceVal{u1->first, u1->second}});
    EmittedPiece hp;
    hp.lo = Rat(1) / w.hi;
    if (w.lo == 0) {
      hp.hi_inf = true;
    } else {
      hp.hi = Rat(1) / w.lo;
    }
    hp.val = PieceVal{u2->first, LinForm{u2->second.b, u2->second.a}};  // own orientation B2
    high.push_back(hp);

    if (lo < w.lo) work.emplace_back(lo, w.lo);
    if (w.hi < hi) work.emplace_back(w.hi, hi);
  }

  sort_merge_verify(low, Rat(0), false, Rat(1));
  sort_merge_verify(high, Rat(1), true, Rat(0));

  LevelFn out;
  out.k = k;
  for (std::size_t i = 0; i + 1 < low.size(); ++i) out.edges.push_back(low[i].hi);
  out.edges.push_back(Rat(1));
  for (std::size_t i = 0; i + 1 < high.size(); ++i) out.edges.push_back(high[i].hi);
  for (const auto& p : low) out.pieces.push_back(p.val);
  for (const auto& p : high) out.pieces.push_back(p.val);
  internal_check(out.pieces.size() == out.edges.size() + 1, "level build: piece/edge mismatch");

  for (const Rat& t : out.edges) {
    const RoundResolution r = resolve_round(prev, t, Rat(1));
    const auto [v1, v2] = round_values(prev, t, Rat(1), r);
    (void)v2;
    out.atoms.push_back({v1.items, v1.money});
  }
  return out;
}

}  // namespace detail

// Owns the level tables and answers all exact queries. Building a level
// mutates the cache, so construct/warm it before any concurrent reads.
class Engine {
 public:
  Engine() { levels_.push_back(make_level0()); }

  const LevelFn& level(int k) {
    if (k < 0) throw std::invalid_argument("level: negative item count");
    while (static_cast<int>(levels_.size()) <= k)
      levels_.push_back(detail::build_level(levels_.back()));
    return levels_[k];
  }

  LexUtility utility(int agent, const Rat& b_self, const Rat& b_other, int k) {
    require_agent(agent);
    if (b_self < 0 || b_other < 0) throw std::invalid_argument("utility: negative budget");
    return level(k).eval(b_self, b_other);
  }

  LexUtility winning_utility(int agent, const Rat& b_self, const Rat& b_other, int k, const Rat& p) {
    require_agent(agent);
    require_round(k);
    if (p < 0 || p > b_self) throw std::domain_error("winning_utility: price outside [0, B_self]");
    LexUtility u = level(k - 1).eval(b_self - p, b_other);
    u.items += 1;
    return u;
  }

  LexUtility losing_utility(int agent, const Rat& b_self, const Rat& b_other, int k, const Rat& p) {
    require_agent(agent);
    require_round(k);
    if (p < 0 || p > b_other) throw std::domain_error("losing_utility: price outside [0, B_other]");
    return level(k - 1).eval(b_self, b_other - p);
  }

  CriticalPriceResult critical_price(int agent, const Rat& b_self, const Rat& b_other, int k) {
    require_agent(agent);
    require_round(k);
    if (b_self <= 0 || b_other <= 0) throw std::invalid_argument("critical_price: budgets must be positive");
    return to_critical_price(detail::solve_crossing(level(k - 1), b_self, b_other), b_self);
  }

  RoundResolution resolve(const Rat& b1, const Rat& b2, int k) {
    require_round(k);
    return resolve_round(level(k - 1), b1, b2);
  }

 private:
  static void require_agent(int agent) {
    if (agent != 1 && agent != 2) throw std::invalid_argument("agent must be 1 or 2");
  }
  static void require_round(int k) {
    if (k < 1) throw std::invalid_argument("need at least one item in play");
  }

  std::vector<LevelFn> levels_;
};

}  // namespace seqauction
