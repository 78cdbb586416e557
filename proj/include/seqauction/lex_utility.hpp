#pragma once

#include "seqauction/rational.hpp"

namespace seqauction {

// Utility in the value-dominant regime: any amount of item mass outweighs any
// amount of leftover money, so comparison is lexicographic (items, money).
struct LexUtility {
  Rat items;
  Rat money;

  friend bool operator==(const LexUtility&, const LexUtility&) = default;
};

inline int lex_compare(const LexUtility& a, const LexUtility& b) {
  if (a.items != b.items) return a.items < b.items ? -1 : 1;
  if (a.money != b.money) return a.money < b.money ? -1 : 1;
  return 0;
}

inline bool operator<(const LexUtility& a, const LexUtility& b) { return lex_compare(a, b) < 0; }
inline bool operator>(const LexUtility& a, const LexUtility& b) { return lex_compare(a, b) > 0; }
inline bool operator<=(const LexUtility& a, const LexUtility& b) { return lex_compare(a, b) <= 0; }
inline bool operator>=(const LexUtility& a, const LexUtility& b) { return lex_compare(a, b) >= 0; }

inline LexUtility operator+(const LexUtility& a, const LexUtility& b) {
  return {a.items + b.items, a.money + b.money};
}

// Fair-coin expectation of two outcomes.
inline LexUtility half_sum(const LexUtility& a, const LexUtility& b) {
  return {(a.items + b.items) / 2, (a.money + b.money) / 2};
}

}  // namespace seqauction
