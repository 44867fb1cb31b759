#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

using namespace planrec;
using namespace planrec::testing_support;

TEST(Schedule, LogPresetAtZero) {
  EXPECT_NEAR(nbm_weight(presets::kLog, 1, 0.0), 0.1, 1e-12);
  EXPECT_NEAR(nbm_weight(presets::kLog, 7, 0.0), 0.1, 1e-12);
}

TEST(Schedule, CmuMidpoint) {
  // c*n + d = 4*3 + 2.5
  EXPECT_NEAR(nbm_weight(presets::kCmu, 3, 14.5), 0.25, 1e-12);
  EXPECT_NEAR(nbm_weight(presets::kAcmu, 2, 11.0), 0.25, 1e-12);
}

TEST(Schedule, DecaysTowardZero) {
  EXPECT_LT(nbm_weight(presets::kCmu, 1, 200.0), 1e-9);
  double last = 1.0;
  for (int t = 0; t < 60; ++t) {
    const double w = nbm_weight(presets::kCmu, 3, t);
    EXPECT_LT(w, last);
    EXPECT_GT(w, 0.0);
    last = w;
  }
}

TEST(Schedule, WeightsSumToOne) {
  const WeightSchedule s = parse_schedule("acmu");
  for (int t = 0; t < 30; ++t) EXPECT_DOUBLE_EQ(s.nbm(4, t) + s.prap(4, t), 1.0);
}

TEST(Schedule, Parse) {
  EXPECT_FALSE(parse_schedule("cmu").fixed);
  EXPECT_DOUBLE_EQ(parse_schedule("log").params.a, 0.2);
  const WeightSchedule f = parse_schedule("fixed:0.3");
  EXPECT_TRUE(f.fixed);
  EXPECT_DOUBLE_EQ(f.nbm(5, 100), 0.3);
  EXPECT_THROW(parse_schedule("fixed:1.5"), Error);
  EXPECT_THROW(parse_schedule("fixed:abc"), Error);
  EXPECT_THROW(parse_schedule("linear"), Error);
}

TEST(Combine, WeightedSumArithmetic) {
  const GoalPosterior ps{{0.5, 0.5}}, pd{{0.9, 0.1}};
  const GoalPosterior out = combine_ws(ps, pd, 0.25);
  EXPECT_NEAR(out.probs[0], 0.75 * 0.5 + 0.25 * 0.9, 1e-15);
  EXPECT_NEAR(out.probs[1], 0.75 * 0.5 + 0.25 * 0.1, 1e-15);
  EXPECT_EQ(combine_ws(ps, pd, 0.0).probs, ps.probs);
  EXPECT_EQ(combine_ws(ps, pd, 1.0).probs, pd.probs);
  EXPECT_THROW(combine_ws(ps, GoalPosterior{{1.0}}, 0.5), Error);
}

TEST(Combine, TiebreakOnlyActsOnTies) {
  const GoalPosterior unique{{0.6, 0.3, 0.1}}, tied{{0.4, 0.4, 0.2}}, pd{{0.1, 0.7, 0.2}};
  EXPECT_EQ(combine_tb(unique, pd, 0.5).probs, unique.probs);
  const GoalPosterior t = combine_tb(tied, pd, 0.5);
  EXPECT_EQ(t.probs, combine_ws(tied, pd, 0.5).probs);
  EXPECT_EQ(argmax_set(t), std::vector<std::size_t>{1});
}

TEST(Combine, BucFixtureWithEqualWeights) {
  const auto b = benchkit::gen_buc();
  const auto& lp = buc_loaded();
  const auto trace = recognize_online_gm(buc_task(b.e1), optimal_config());
  const NbmPredictor nbm(b.nbm_fixture, *lp.problem);
  const auto states = states_along(*lp.problem, buc_task(b.e1).observations.actions);
  ASSERT_EQ(states.size(), trace.steps.size());
  for (std::size_t k = 0; k <= 6; ++k) {
    const std::size_t t = 28 + k;
    const GoalPosterior& ps = trace.steps[t].posterior;
    const GoalPosterior pd = nbm.predict(states[t], lp.priors);
    const GoalPosterior ws = combine_ws(ps, pd, 0.5), tb = combine_tb(ps, pd, 0.5);
    const std::size_t want = k == 0 ? 1 : 3;
    EXPECT_EQ(argmax_set(ws), std::vector<std::size_t>{want}) << "ws step " << k;
    EXPECT_EQ(argmax_set(tb), std::vector<std::size_t>{want}) << "tb step " << k;
    if (argmax_set(ps).size() > 1) {
      EXPECT_EQ(ws.probs, tb.probs);
    }
  }
}
