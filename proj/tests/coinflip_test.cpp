#include <gtest/gtest.h>

#include <stdexcept>

#include "seqauction/coinflip.hpp"
#include "seqauction/rational.hpp"

using namespace seqauction;

// === binomial ===

TEST(BinomialTest, SmallValues) {
  EXPECT_EQ(binomial(0, 0), Int(1));
  EXPECT_EQ(binomial(5, 2), Int(10));
  EXPECT_EQ(binomial(10, 10), Int(1));
  EXPECT_EQ(binomial(25, 13), Int(5200300));
}

TEST(BinomialTest, PascalRule) {
  for (int n = 1; n <= 20; ++n)
    for (int k = 1; k < n; ++k)
      EXPECT_EQ(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
}

// === the ruin probability phi ===

TEST(PhiTest, PinnedValues) {
  EXPECT_EQ(phi(0, 0), Rat(1, 2));
  EXPECT_EQ(phi(1, 0), Rat(3, 4));
  EXPECT_EQ(phi(-1, 5), Rat(0));
  EXPECT_EQ(phi(0, 1), Rat(1, 4));
}

TEST(PhiTest, EnumerationPinnedValues) {
  EXPECT_EQ(phi_enumerated(0, 0), Rat(1, 2));
  EXPECT_EQ(phi_enumerated(1, 0), Rat(3, 4));
  EXPECT_EQ(phi_enumerated(0, 1), Rat(1, 4));
  EXPECT_EQ(phi_enumerated(-1, 3), Rat(0));
}

TEST(PhiTest, ClosedFormMatchesEnumeration) {
  for (int m = 0; m <= 12; ++m)
    for (int n = 0; m + n <= 12; ++n)
      EXPECT_EQ(phi(m, n), phi_enumerated(m, n)) << "m=" << m << " n=" << n;
}

TEST(PhiTest, ComplementSymmetry) {
  for (int m = 0; m <= 12; ++m)
    for (int n = 0; n <= 12; ++n)
      EXPECT_EQ(phi(m, n) + phi(n, m), Rat(1)) << "m=" << m << " n=" << n;
}

// phi(m, n) - phi(m-1, n+1) = C(n+m+1, n+1) / 2^(m+n+1)
TEST(PhiTest, DifferenceIdentity) {
  for (int m = 1; m <= 12; ++m)
    for (int n = 0; n <= 12; ++n) {
      const Rat step{binomial(n + m + 1, n + 1), Int(1) << (m + n + 1)};
      EXPECT_EQ(phi(m, n) - phi(m - 1, n + 1), step) << "m=" << m << " n=" << n;
    }
}

TEST(PhiTest, MonotoneInBothArguments) {
  for (int m = 0; m <= 10; ++m)
    for (int n = 0; n <= 10; ++n) {
      if (m >= 1) EXPECT_GE(phi(m, n), phi(m - 1, n));
      if (n >= 1) EXPECT_LE(phi(m, n), phi(m, n - 1));
    }
}

TEST(PhiTest, ValuesStayInsideTheUnitInterval) {
  for (int m = 0; m <= 12; ++m)
    for (int n = 0; n <= 12; ++n) {
      EXPECT_GT(phi(m, n), Rat(0));
      EXPECT_LT(phi(m, n), Rat(1));
    }
}

TEST(PhiTest, DomainErrors) {
  EXPECT_THROW(phi(-2, 0), std::domain_error);
  EXPECT_THROW(phi(0, -1), std::domain_error);
  EXPECT_THROW(phi_enumerated(-2, 0), std::domain_error);
  EXPECT_THROW(phi_enumerated(0, -1), std::domain_error);
}

TEST(PhiTest, EnumerationRefusesHugeInputs) {
  // the exhaustive walk is 2^(m+n+1) sequences; the guard keeps it sane
  EXPECT_THROW(phi_enumerated(20, 20), std::domain_error);
  EXPECT_THROW(phi_enumerated(13, 12), std::domain_error);
  EXPECT_NO_THROW(phi_enumerated(10, 10));
}
