#pragma once

#include <cstdint>
#include <stdexcept>

#include "seqauction/rational.hpp"

namespace seqauction {

inline Int binomial(int n, int k) {
  if (k < 0 || k > n) return Int(0);
  Int r = 1;
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

// phi(m, n) = sum_{j=0}^{m} C(n+j, n) / 2^(n+j+1), phi(-1, n) = 0.
// Probability that a fair coin shows n+1 tails before m+1 heads; the weight
// the tie utilities put on the opponent going broke first.
inline Rat phi(int m, int n) {
  if (m < -1 || n < 0) throw std::domain_error("phi: need m >= -1 and n >= 0");
  if (m == -1) return Rat(0);
  Rat total = 0;
  Int binom = 1;                 // C(n+j, n), starting at j = 0
  Int pow2 = Int(1) << (n + 1);  // 2^(n+j+1)
  for (int j = 0; j <= m; ++j) {
    if (j > 0) {
      binom = binom * (n + j) / j;
      pow2 <<= 1;
    }
    total += Rat(binom, pow2);
  }
  return total;
}

// Same quantity by brute force over all 2^(m+n+1) coin sequences. The race is
// always decided within m+n+1 flips, so finite enumeration is exact.
inline Rat phi_enumerated(int m, int n) {
  if (m < -1 || n < 0) throw std::domain_error("phi_enumerated: need m >= -1 and n >= 0");
  if (m == -1) return Rat(0);
  if (m + n > 24) throw std::domain_error("phi_enumerated: m + n too large to enumerate");
  const int len = m + n + 1;
  const std::uint64_t total = std::uint64_t(1) << len;
  std::uint64_t hits = 0;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    int heads = 0;
    int tails = 0;
    for (int i = 0; i < len; ++i) {
      if ((mask >> i) & 1u) {
        if (++heads == m + 1) break;
      } else if (++tails == n + 1) {
        ++hits;
        break;
      }
    }
  }
  return Rat(Int(hits), Int(total));
}

}  // namespace seqauction
