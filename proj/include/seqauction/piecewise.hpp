#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "seqauction/lex_utility.hpp"

namespace seqauction {

// Money component as a linear form a*B_self + b*B_other.
struct LinForm {
  Rat a;
  Rat b;

  friend bool operator==(const LinForm&, const LinForm&) = default;
};

inline Rat eval_lin(const LinForm& f, const Rat& bs, const Rat& bo) { return f.a * bs + f.b * bo; }

// Value over one open ratio interval: constant item mass, linear money.
struct PieceVal {
  Rat items;
  LinForm money;

  friend bool operator==(const PieceVal&, const PieceVal&) = default;
};

// Exact value at an edge ratio, stored at budgets (t, 1); scales with B_other.
struct AtomVal {
  Rat items;
  Rat money_at_unit;
};

// The k-item equilibrium value as a piecewise conical function of the budget
// ratio r = B_self/B_other on (0, inf). pieces[i] covers the open interval
// (edges[i-1], edges[i]) with edges[-1] = 0 and edges[n] = +inf; atoms[i] holds
// the exact value at r == edges[i] (tie expectations at jumps, limits at kinks).
struct LevelFn {
  int k = 0;
  std::vector<Rat> edges;
  std::vector<PieceVal> pieces;  // size edges.size() + 1
  std::vector<AtomVal> atoms;    // size edges.size()

  // index into edges if r is exactly an edge, else -1
  int edge_index(const Rat& r) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), r);
    if (it != edges.end() && *it == r) return static_cast<int>(it - edges.begin());
    return -1;
  }

  // index of the open piece containing r; r must not be an edge
  int piece_index(const Rat& r) const {
    auto it = std::lower_bound(edges.begin(), edges.end(), r);
    return static_cast<int>(it - edges.begin());
  }

  // open interval covered by pieces[i]: (lo, hi), hi_inf when unbounded
  Rat piece_lo(int i) const { return i == 0 ? Rat(0) : edges[i - 1]; }
  bool piece_hi_inf(int i) const { return i == static_cast<int>(edges.size()); }
  Rat piece_hi(int i) const { return piece_hi_inf(i) ? Rat(0) : edges[i]; }

  LexUtility eval(const Rat& bs, const Rat& bo) const {
    if (bs < 0 || bo < 0) throw std::invalid_argument("LevelFn::eval: negative budget");
    if (bo == 0) return {Rat(k), bs};
    if (bs == 0) return {Rat(0), Rat(0)};
    const Rat r = bs / bo;
    const int ei = edge_index(r);
    if (ei >= 0) return {atoms[ei].items, atoms[ei].money_at_unit * bo};
    const PieceVal& p = pieces[piece_index(r)];
    return {p.items, eval_lin(p.money, bs, bo)};
  }
};

inline LevelFn make_level0() {
  LevelFn f;
  f.k = 0;
  f.pieces.push_back({Rat(0), {Rat(1), Rat(0)}});
  return f;
}

}  // namespace seqauction
