#include <gtest/gtest.h>

#include <random>
#include <stdexcept>

#include "seqauction/clinching.hpp"
#include "seqauction/random_instances.hpp"

using namespace seqauction;

// === frozen traces ===

TEST(ClinchingTest, PoorAgentFundsTheDiscount) {
  const auto tr = clinching_trace(Rat(1, 2), Rat(1), 2);
  ASSERT_EQ(tr.rounds.size(), 2u);
  EXPECT_EQ(tr.rounds[0].winner, 2);
  EXPECT_EQ(tr.rounds[0].price, Rat(1, 4));
  EXPECT_EQ(tr.rounds[1].winner, 2);
  EXPECT_EQ(tr.rounds[1].price, Rat(1, 2));
  EXPECT_EQ(tr.items1, 0);
  EXPECT_EQ(tr.items2, 2);
  EXPECT_EQ(tr.final_b1, Rat(1, 2));
  EXPECT_EQ(tr.final_b2, Rat(1, 4));
}

TEST(ClinchingTest, CloseBudgetsInterleave) {
  const auto tr = clinching_trace(Rat(4, 5), Rat(1), 2);
  ASSERT_EQ(tr.rounds.size(), 2u);
  EXPECT_EQ(tr.rounds[0].winner, 2);
  EXPECT_EQ(tr.rounds[0].price, Rat(2, 5));
  EXPECT_EQ(tr.rounds[1].winner, 1);
  EXPECT_EQ(tr.rounds[1].price, Rat(3, 5));
  EXPECT_EQ(tr.items1, 1);
  EXPECT_EQ(tr.items2, 1);
}

TEST(ClinchingTest, ThreeItemAlternation) {
  const auto tr = clinching_trace(Rat(4, 5), Rat(1), 3);
  ASSERT_EQ(tr.rounds.size(), 3u);
  EXPECT_EQ(tr.rounds[0].winner, 2);
  EXPECT_EQ(tr.rounds[0].price, Rat(4, 15));
  EXPECT_EQ(tr.rounds[1].winner, 1);
  EXPECT_EQ(tr.rounds[1].price, Rat(11, 30));
  EXPECT_EQ(tr.rounds[2].winner, 2);
  EXPECT_EQ(tr.rounds[2].price, Rat(13, 30));
  EXPECT_EQ(tr.items1, 1);
  EXPECT_EQ(tr.items2, 2);
}

TEST(ClinchingTest, ExactBudgetTieGoesToAgentTwo) {
  const auto k2 = clinching_trace(Rat(1), Rat(1), 2);
  EXPECT_EQ(k2.rounds[0].winner, 2);
  EXPECT_EQ(k2.items1, 1);
  EXPECT_EQ(k2.items2, 1);

  const auto k3 = clinching_trace(Rat(1), Rat(1), 3);
  EXPECT_EQ(k3.rounds[0].winner, 2);
  EXPECT_EQ(k3.items1, 1);
  EXPECT_EQ(k3.items2, 2);
}

TEST(ClinchingTest, RejectsBadInputs) {
  EXPECT_THROW(clinching_trace(Rat(0), Rat(1), 2), std::invalid_argument);
  EXPECT_THROW(clinching_trace(Rat(1), Rat(-1), 2), std::invalid_argument);
  EXPECT_THROW(clinching_trace(Rat(1), Rat(1), 0), std::invalid_argument);
}

// === structural properties ===

TEST(ClinchingProperty, PricesNeverFallAndBudgetsStayFeasible) {
  std::mt19937_64 rng(1212);
  constexpr int kIterations = 200;
  for (int i = 0; i < kIterations; ++i) {
    const int k = 1 + static_cast<int>(draw_below(rng, 8));
    const auto [b1, b2] = random_instance(rng);
    const auto tr = clinching_trace(b1, b2, k);
    ASSERT_EQ(tr.rounds.size(), static_cast<std::size_t>(k));
    Rat cb1 = b1, cb2 = b2;
    for (std::size_t j = 0; j < tr.rounds.size(); ++j) {
      const auto& r = tr.rounds[j];
      // the per-round price is the poorer budget spread over what is left
      EXPECT_EQ(r.price, (cb1 < cb2 ? cb1 : cb2) / Rat(k - static_cast<int>(j)));
      // winner holds the strictly higher budget, agent 2 on exact ties
      if (cb1 > cb2)
        EXPECT_EQ(r.winner, 1);
      else
        EXPECT_EQ(r.winner, 2);
      if (j > 0) EXPECT_GE(r.price, tr.rounds[j - 1].price);
      (r.winner == 1 ? cb1 : cb2) -= r.price;
      EXPECT_GE(cb1, Rat(0));
      EXPECT_GE(cb2, Rat(0));
    }
    EXPECT_EQ(tr.final_b1, cb1);
    EXPECT_EQ(tr.final_b2, cb2);
    EXPECT_EQ(tr.items1 + tr.items2, k);
  }
}

TEST(ClinchingProperty, OnceWinnersDifferTheyAlternateForever) {
  std::mt19937_64 rng(3434);
  constexpr int kIterations = 200;
  for (int i = 0; i < kIterations; ++i) {
    const int k = 2 + static_cast<int>(draw_below(rng, 9));
    const auto [b1, b2] = random_instance(rng);
    const auto tr = clinching_trace(b1, b2, k);
    bool seen_switch = false;
    for (std::size_t j = 1; j < tr.rounds.size(); ++j) {
      const bool differs = tr.rounds[j].winner != tr.rounds[j - 1].winner;
      if (seen_switch) EXPECT_TRUE(differs) << "round " << j;
      if (differs) seen_switch = true;
    }
  }
}

TEST(ClinchingProperty, ScalesWithTheBudgets) {
  std::mt19937_64 rng(5656);
  constexpr int kIterations = 100;
  for (int i = 0; i < kIterations; ++i) {
    const int k = 1 + static_cast<int>(draw_below(rng, 6));
    const auto [b1, b2] = random_instance(rng);
    const Rat s(3, 7);
    const auto base = clinching_trace(b1, b2, k);
    const auto scaled = clinching_trace(b1 * s, b2 * s, k);
    EXPECT_EQ(base.items1, scaled.items1);
    for (std::size_t j = 0; j < base.rounds.size(); ++j) {
      EXPECT_EQ(base.rounds[j].winner, scaled.rounds[j].winner);
      EXPECT_EQ(base.rounds[j].price * s, scaled.rounds[j].price);
    }
  }
}

// === all-items thresholds ===

TEST(ClinchingThresholdTest, HarmonicNumbers) {
  EXPECT_EQ(clinch_threshold(1), Rat(1));
  EXPECT_EQ(clinch_threshold(2), Rat(3, 2));
  EXPECT_EQ(clinch_threshold(3), Rat(11, 6));
  EXPECT_EQ(clinch_threshold(10), Rat(7381, 2520));
  EXPECT_THROW(clinch_threshold(0), std::invalid_argument);
}

TEST(ClinchingThresholdTest, SweepingAllItemsNeedsTheHarmonicRatio) {
  const Rat eps(1, 1000);
  for (int k = 1; k <= 10; ++k) {
    const Rat h = clinch_threshold(k);
    const auto above = clinching_items(h + eps, Rat(1), k);
    EXPECT_EQ(above.first, k) << "k=" << k;
    const auto below = clinching_items(h - eps, Rat(1), k);
    EXPECT_LT(below.first, k) << "k=" << k;
    // at the exact threshold the tie rule hands agent 2 the last round
    const auto at = clinching_items(h, Rat(1), k);
    EXPECT_EQ(at.first, k - 1) << "k=" << k;
  }
}

// === phase tables ===

TEST(ClinchingPhaseTest, TwoItemPhases) {
  const auto phases = clinching_phase_table(2);
  ASSERT_EQ(phases.size(), 2u);
  EXPECT_EQ(phases[0].lo, Rat(0));
  EXPECT_EQ(phases[0].hi, Rat(2, 3));
  EXPECT_EQ(phases[1].hi, Rat(1));

  EXPECT_EQ(phases[0].rounds[0].winner, 2);
  EXPECT_EQ(phases[0].rounds[0].price, (LinForm{Rat(1, 2), Rat(0)}));
  EXPECT_EQ(phases[0].rounds[1].winner, 2);
  EXPECT_EQ(phases[0].rounds[1].price, (LinForm{Rat(1), Rat(0)}));

  EXPECT_EQ(phases[1].rounds[0].winner, 2);
  EXPECT_EQ(phases[1].rounds[0].price, (LinForm{Rat(1, 2), Rat(0)}));
  EXPECT_EQ(phases[1].rounds[1].winner, 1);
  EXPECT_EQ(phases[1].rounds[1].price, (LinForm{Rat(-1, 2), Rat(1)}));
}

TEST(ClinchingPhaseTest, ThreeItemPhases) {
  const auto phases = clinching_phase_table(3);
  ASSERT_EQ(phases.size(), 3u);
  EXPECT_EQ(phases[0].hi, Rat(6, 11));
  EXPECT_EQ(phases[1].hi, Rat(3, 4));

  for (const auto& ph : phases) {
    EXPECT_EQ(ph.rounds[0].winner, 2);
    EXPECT_EQ(ph.rounds[0].price, (LinForm{Rat(1, 3), Rat(0)}));
  }
  EXPECT_EQ(phases[0].rounds[1].price, (LinForm{Rat(1, 2), Rat(0)}));
  EXPECT_EQ(phases[0].rounds[2].price, (LinForm{Rat(1), Rat(0)}));
  EXPECT_EQ(phases[1].rounds[2].winner, 1);
  EXPECT_EQ(phases[1].rounds[2].price, (LinForm{Rat(-5, 6), Rat(1)}));
  // round 2 of the top phase goes to agent 1 at the discounted split
  EXPECT_EQ(phases[2].rounds[1].winner, 1);
  EXPECT_EQ(phases[2].rounds[1].price, (LinForm{Rat(-1, 6), Rat(1, 2)}));
  // round 3 returns to agent 2; the price keeps the run nondecreasing
  EXPECT_EQ(phases[2].rounds[2].winner, 2);
  EXPECT_EQ(phases[2].rounds[2].price, (LinForm{Rat(7, 6), Rat(-1, 2)}));
}

TEST(ClinchingPhaseTest, PhasesReplayTheTraceAtASample) {
  for (int k = 1; k <= 5; ++k) {
    const auto phases = clinching_phase_table(k);
    EXPECT_EQ(phases.front().lo, Rat(0));
    EXPECT_EQ(phases.back().hi, Rat(1));
    for (std::size_t i = 1; i < phases.size(); ++i) EXPECT_EQ(phases[i - 1].hi, phases[i].lo);
    for (const auto& ph : phases) {
      const Rat b1 = mediant(ph.lo, ph.hi);
      const auto tr = clinching_trace(b1, Rat(1), k);
      ASSERT_EQ(ph.rounds.size(), tr.rounds.size());
      for (std::size_t j = 0; j < tr.rounds.size(); ++j) {
        EXPECT_EQ(tr.rounds[j].winner, ph.rounds[j].winner);
        EXPECT_EQ(tr.rounds[j].price, eval_lin(ph.rounds[j].price, b1, Rat(1)));
      }
    }
  }
}

// === comparison with the sequential outcome ===

TEST(ClinchingDominanceTest, RicherHalfGetsAtLeastTheSequentialShare) {
  Engine eng;
  for (int k : {2, 3, 5, 8}) {
    for (int num = 51; num <= 99; num += 4) {
      const Rat p(num, 100);
      const Rat b1 = p, b2 = 1 - p;
      const auto clinch = clinching_items(b1, b2, k);
      const auto sp = item_split(b1, b2, k);
      EXPECT_GE(clinch.first, sp.k1) << "k=" << k << " p=" << num;
    }
  }
}

// === the fraction curve ===

TEST(FractionCurveTest, CurveIsMonotoneAndHitsTheEnds) {
  const auto curve = fraction_curve(100, 199);
  Rat last(-1);
  for (const auto& pt : curve) {
    EXPECT_GE(pt.item_fraction, last);
    last = pt.item_fraction;
  }
  EXPECT_EQ(curve.front().item_fraction, Rat(0));
  EXPECT_EQ(curve.back().item_fraction, Rat(1));
  // p = 1/2 sits mid-list and splits the items evenly
  EXPECT_EQ(curve[99].p, Rat(1, 2));
  EXPECT_EQ(curve[99].item_fraction, Rat(1, 2));
}

TEST(FractionCurveTest, RejectsDegenerateRequests) {
  EXPECT_THROW(fraction_curve(0, 10), std::invalid_argument);
  EXPECT_THROW(fraction_curve(3, 1), std::invalid_argument);
}
