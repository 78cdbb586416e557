#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "seqauction/random_instances.hpp"
#include "seqauction/verify.hpp"

using namespace seqauction;

// === one-shot deviation audit ===

TEST(DeviationAuditTest, NoProfitableDeviationOnPinnedInstances) {
  Engine eng;
  for (const auto& [b1, b2, k] : {std::tuple{Rat(3, 4), Rat(1), 2},
                                  std::tuple{Rat(7, 20), Rat(1), 3},
                                  std::tuple{Rat(19, 20), Rat(1), 3},
                                  std::tuple{Rat(1, 5), Rat(1), 3}}) {
    const auto rep = one_shot_deviation_check(eng, b1, b2, k);
    EXPECT_NE(rep.worst_gain_sign, GainSign::Positive);
    EXPECT_FALSE(rep.checks.empty());
    for (const auto& c : rep.checks) {
      EXPECT_GE(c.round, 1);
      EXPECT_LE(c.round, k);
      EXPECT_TRUE(c.agent == 1 || c.agent == 2);
      EXPECT_NE(c.gain_sign, GainSign::Positive);
      EXPECT_LE(c.deviation_utility, c.equilibrium_utility);
    }
  }
}

TEST(DeviationAuditTest, StayingOnThePathIsAmongTheChecks) {
  Engine eng;
  const auto rep = one_shot_deviation_check(eng, Rat(3, 4), Rat(1), 2);
  // the equilibrium bid itself shows up and gains exactly zero
  bool found_zero = false;
  for (const auto& c : rep.checks) found_zero |= c.gain_sign == GainSign::Zero;
  EXPECT_TRUE(found_zero);
}

TEST(DeviationAuditTest, RefusesCoinFlipTraces) {
  Engine eng;
  EXPECT_THROW(one_shot_deviation_check(eng, Rat(1, 2), Rat(1), 2), std::invalid_argument);
  EXPECT_THROW(one_shot_deviation_check(eng, Rat(67, 97), Rat(91, 162), 4), std::invalid_argument);
}

TEST(DeviationAuditTest, RefusesOversizedScans) {
  Engine eng;
  EXPECT_THROW(one_shot_deviation_check(eng, Rat(3, 4), Rat(1), 7), std::invalid_argument);
  EXPECT_THROW(one_shot_deviation_check(eng, Rat(3, 4), Rat(1), 4, 3), std::invalid_argument);
}

TEST(DeviationAuditTest, RandomDeterministicInstancesStayClean) {
  Engine eng;
  std::mt19937_64 rng(12);
  constexpr int kIterations = 15;
  for (int k = 2; k <= 4; ++k) {
    for (int i = 0; i < kIterations; ++i) {
      const auto [b1, b2] = random_deterministic_instance(eng, rng, k);
      const auto rep = one_shot_deviation_check(eng, b1, b2, k);
      EXPECT_NE(rep.worst_gain_sign, GainSign::Positive)
          << "b1=" << render_rat(b1) << " b2=" << render_rat(b2) << " k=" << k;
    }
  }
}

// === discretized oracle ===

TEST(GridTest, SingleItemGoesToTheRicherSide) {
  const auto sol = grid_backward_induction(Rat(1, 2), Rat(1), 1, Rat(1, 8));
  ASSERT_EQ(sol.rounds.size(), 1u);
  EXPECT_FALSE(sol.tie_encountered);
  EXPECT_EQ(sol.rounds[0].winner, 2);
  EXPECT_EQ(sol.rounds[0].price, Rat(1, 2));
  EXPECT_EQ(sol.u1, (LexUtility{Rat(0), Rat(1, 2)}));
  EXPECT_EQ(sol.u2, (LexUtility{Rat(1), Rat(1, 2)}));
}

TEST(GridTest, AgreesExactlyOnTheAnchorInstance) {
  Engine eng;
  for (const Rat delta : {Rat(1, 16), Rat(1, 64)}) {
    const auto cmp = compare_canonical_vs_grid(eng, Rat(3, 4), Rat(1), 2, delta);
    EXPECT_FALSE(cmp.tie_encountered);
    EXPECT_TRUE(cmp.winner_match);
    EXPECT_EQ(cmp.max_price_gap, Rat(0));
    EXPECT_EQ(cmp.utility_gap.first, Rat(0));
    EXPECT_EQ(cmp.utility_gap.second, Rat(0));
  }
}

TEST(GridTest, CoinFlipValueMatchesTheLadderExpectation) {
  const auto sol = grid_backward_induction(Rat(1, 2), Rat(1), 2, Rat(1, 16));
  EXPECT_TRUE(sol.tie_encountered);
  EXPECT_EQ(sol.u1, (LexUtility{Rat(3, 4), Rat(1, 8)}));
  EXPECT_EQ(sol.u2, (LexUtility{Rat(5, 4), Rat(5, 8)}));
}

TEST(GridTest, ComparePuntsOnTies) {
  Engine eng;
  const auto cmp = compare_canonical_vs_grid(eng, Rat(1, 2), Rat(1), 2, Rat(1, 16));
  EXPECT_TRUE(cmp.tie_encountered);
  EXPECT_FALSE(cmp.winner_match);
}

TEST(GridTest, InputValidation) {
  EXPECT_THROW(grid_backward_induction(Rat(1, 3), Rat(1), 2, Rat(1, 16)), std::invalid_argument);
  EXPECT_THROW(grid_backward_induction(Rat(1, 2), Rat(1), 2, Rat(0)), std::invalid_argument);
  EXPECT_THROW(grid_backward_induction(Rat(1, 2), Rat(1), 4, Rat(1, 16)), std::invalid_argument);
  EXPECT_THROW(grid_backward_induction(Rat(0), Rat(1), 2, Rat(1, 16)), std::invalid_argument);
}

TEST(GridTest, ScalesWithTheBudgets) {
  const auto base = grid_backward_induction(Rat(3, 4), Rat(1), 2, Rat(1, 16));
  const auto twice = grid_backward_induction(Rat(3, 2), Rat(2), 2, Rat(1, 8));
  ASSERT_EQ(base.rounds.size(), twice.rounds.size());
  for (std::size_t j = 0; j < base.rounds.size(); ++j) {
    EXPECT_EQ(base.rounds[j].winner, twice.rounds[j].winner);
    EXPECT_EQ(base.rounds[j].price * 2, twice.rounds[j].price);
  }
  EXPECT_EQ(base.u1.items, twice.u1.items);
  EXPECT_EQ(base.u1.money * 2, twice.u1.money);
}

TEST(GridTest, RandomInstancesAgreeWithinTheStep) {
  Engine eng;
  std::mt19937_64 rng(31337);
  const Rat delta(1, 64);
  constexpr int kIterations = 4;
  for (int k = 2; k <= 3; ++k) {
    for (int i = 0; i < kIterations; ++i) {
      const auto [b1, b2] = random_grid_instance(eng, rng, k, delta);
      const auto cmp = compare_canonical_vs_grid(eng, b1, b2, k, delta);
      EXPECT_FALSE(cmp.tie_encountered);
      EXPECT_TRUE(cmp.winner_match) << render_rat(b1) << " " << render_rat(b2);
      EXPECT_LE(cmp.max_price_gap, 2 * delta);
      EXPECT_LE(cmp.utility_gap.first, 2 * k * delta);
      EXPECT_LE(cmp.utility_gap.second, 2 * k * delta);
    }
  }
}

// === one-sided value probes ===

TEST(SidedValueTest, EdgeLimitsDifferFromTheCoinValue) {
  Engine eng;
  const LevelFn& f = eng.level(2);
  // just below the first jump agent 1 still loses both items
  EXPECT_EQ(detail::eval_beside(f, Rat(1, 2), Rat(1), -1), (LexUtility{Rat(0), Rat(1, 2)}));
  // just above it the first item is agent 1's at the full opposing budget
  EXPECT_EQ(detail::eval_beside(f, Rat(1, 2), Rat(1), +1), (LexUtility{Rat(1), Rat(0)}));
  // the point itself carries the coin-flip expectation
  EXPECT_EQ(f.eval(Rat(1, 2), Rat(1)), (LexUtility{Rat(3, 4), Rat(1, 8)}));
}

TEST(SidedValueTest, AwayFromEdgesTheSidesAgree) {
  Engine eng;
  const LevelFn& f = eng.level(3);
  for (const Rat r : {Rat(1, 4), Rat(2, 5), Rat(3, 4), Rat(19, 20)}) {
    EXPECT_EQ(detail::eval_beside(f, r, Rat(1), -1), f.eval(r, Rat(1)));
    EXPECT_EQ(detail::eval_beside(f, r, Rat(1), +1), f.eval(r, Rat(1)));
  }
}
