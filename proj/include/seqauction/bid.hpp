#pragma once

#include "seqauction/rational.hpp"

namespace seqauction {

// A sealed first-price bid. plus marks the bump variant b+: it beats a plain
// bid of the same amount but still pays only the amount. The bump at an
// agent's full budget is not part of the bid space.
struct Bid {
  Rat amount;
  bool plus = false;

  friend bool operator==(const Bid&, const Bid&) = default;
};

inline int bid_compare(const Bid& a, const Bid& b) {
  if (a.amount != b.amount) return a.amount < b.amount ? -1 : 1;
  if (a.plus != b.plus) return a.plus ? 1 : -1;
  return 0;
}

inline bool operator<(const Bid& a, const Bid& b) { return bid_compare(a, b) < 0; }
inline bool operator>(const Bid& a, const Bid& b) { return bid_compare(a, b) > 0; }

}  // namespace seqauction
