#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "cbgfe/constraints.hpp"

using namespace cbgfe;

TEST(Constraints, WeightIsSignedLogOdds) {
  EXPECT_NEAR(weight_from(LinkType::Positive, 0.75), std::log(3.0), 1e-15);
  EXPECT_NEAR(weight_from(LinkType::Negative, 0.75), -std::log(3.0), 1e-15);
  EXPECT_EQ(weight_from(1, 0.5), 0.0);
  EXPECT_NEAR(weight_from(1, kHardAccuracy), std::log((1 - 1e-6) / 1e-6), 1e-6);
  EXPECT_THROW(weight_from(1, 0.4), AccuracyOutOfRange);
  EXPECT_THROW(weight_from(1, 1.0), AccuracyOutOfRange);
}

TEST(Constraints, SetRejectsBadPairs) {
  ConstraintSet cs(4, 0.5);
  cs.add({0, 1, LinkType::Positive, 0.8});
  EXPECT_THROW(cs.add({1, 0, LinkType::Negative, 0.8}), InvalidArgument);
  EXPECT_THROW(cs.add({2, 2, LinkType::Negative, 0.8}), InvalidArgument);
  EXPECT_THROW(cs.add({2, 7, LinkType::Negative, 0.8}), UnknownUnit);
  EXPECT_EQ(cs.size(), 1u);
  EXPECT_DOUBLE_EQ(cs.weight(1, 0), std::log(4.0));
  EXPECT_EQ(cs.count(LinkType::Negative), 0u);
  auto W = cs.dense_weights();
  EXPECT_DOUBLE_EQ(W(0, 1), W(1, 0));
}

TEST(Constraints, InactiveWhenZeroStrengthOrZeroWeights) {
  ConstraintSet cs(3, 0.0);
  cs.add({0, 1, LinkType::Positive, 0.9});
  EXPECT_TRUE(cs.inactive());
  cs.set_strength(1.0);
  EXPECT_FALSE(cs.inactive());
  ConstraintSet z(3, 1.0);
  z.add({0, 1, LinkType::Positive, 0.5});
  EXPECT_TRUE(z.inactive());
}

TEST(Constraints, UnitTermUsesOrderedPairs) {
  ConstraintSet cs(3, 0.5);
  cs.add({0, 1, LinkType::Positive, 0.75});
  GroupPartition together({0, 0, 1}), apart({0, 1, 1});
  double w = std::log(3.0);
  EXPECT_NEAR(log_constraint_term(cs, 0, together), 2 * 0.5 * w, 1e-14);
  EXPECT_NEAR(log_constraint_term(cs, 0, apart), -2 * 0.5 * w, 1e-14);
  EXPECT_DOUBLE_EQ(log_constraint_term(cs, 2, apart), 0.0);
}

TEST(Constraints, PairTermIsClamped) {
  EXPECT_DOUBLE_EQ(pair_term(1000.0, 10.0), kPairTermCap);
  EXPECT_DOUBLE_EQ(pair_term(1000.0, -10.0), -kPairTermCap);
  EXPECT_DOUBLE_EQ(pair_term(0.5, 1.0), 1.0);
}

TEST(Constraints, PregroupingBuildsBlockConstraints) {
  // groups of 2, 3 and one unlabeled unit
  auto cs = constraints_from_pregrouping({0, 0, 1, 1, 1, -1}, 0.65, 0.55);
  EXPECT_EQ(cs.count(LinkType::Positive), 1u + 3u);
  EXPECT_EQ(cs.count(LinkType::Negative), 6u);
  EXPECT_TRUE(cs.neighbors(5).empty());
  EXPECT_NEAR(cs.weight(0, 1), std::log(0.65 / 0.35), 1e-14);
  EXPECT_NEAR(cs.weight(0, 2), -std::log(0.55 / 0.45), 1e-14);
  EXPECT_TRUE(constraints_from_pregrouping({-1, -1, -1}, 0.65, 0.55).empty());
}

TEST(Constraints, AccuracyDrawsFollowShiftedBeta) {
  Rng rng(3);
  double s_ok = 0.0, s_bad = 0.0;
  const int n = 40000;
  for (int k = 0; k < n; ++k) {
    double a = draw_accuracy(rng, true), b = draw_accuracy(rng, false);
    ASSERT_GE(a, 0.5);
    ASSERT_LT(a, 1.0);
    s_ok += a;
    s_bad += b;
  }
  // Beta(3,2) mean 0.6 -> 0.8, Beta(2,3) mean 0.4 -> 0.7
  EXPECT_NEAR(s_ok / n, 0.8, 0.003);
  EXPECT_NEAR(s_bad / n, 0.7, 0.003);
}

TEST(Constraints, PerturbFlipsFloorShareOfEachType) {
  ConstraintSet cs(10, 0.5);
  for (std::size_t i = 0; i < 5; ++i) cs.add({i, i + 5, LinkType::Positive, 0.8});
  for (std::size_t i = 0; i < 4; ++i) cs.add({i, i + 1, LinkType::Negative, 0.8});
  Rng rng(1);
  auto p = perturb_constraints(cs, 0.5, rng);
  // floor(2.5)=2 PL become NL, floor(2)=2 NL become PL
  EXPECT_EQ(p.count(LinkType::Positive), 5u - 2u + 2u);
  EXPECT_EQ(p.size(), cs.size());
  std::size_t changed = 0;
  for (std::size_t k = 0; k < cs.size(); ++k) changed += cs.constraints()[k].type != p.constraints()[k].type;
  EXPECT_EQ(changed, 4u);
  auto same = perturb_constraints(cs, 0.0, rng);
  for (std::size_t k = 0; k < cs.size(); ++k) EXPECT_EQ(same.constraints()[k].accuracy, 0.8);
  EXPECT_THROW(perturb_constraints(cs, 1.5, rng), InvalidArgument);
}

TEST(Constraints, CsvRoundTripAndUnknownUnit) {
  std::vector<std::string> ids = {"AT", "BE", "CH"};
  std::istringstream in("i,j,type,psi\nAT,BE,PL,0.7\nBE,CH,-1,0.6\n");
  auto cs = read_constraints(in, ids, 0.5);
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs.constraints()[1].type, LinkType::Negative);
  std::stringstream out;
  write_constraints(out, cs, ids);
  auto back = read_constraints(out, ids, 0.5);
  EXPECT_EQ(back.weight(1, 2), cs.weight(1, 2));
  std::istringstream bad("i,j,type,psi\nAT,XX,PL,0.7\n");
  EXPECT_THROW(read_constraints(bad, ids, 0.5), UnknownUnit);
  std::istringstream badpsi("i,j,type,psi\nAT,BE,PL,0.3\n");
  EXPECT_THROW(read_constraints(badpsi, ids, 0.5), AccuracyOutOfRange);
}

TEST(Constraints, PregroupingFile) {
  std::vector<std::string> ids = {"1", "2", "3", "4"};
  std::istringstream in("unit,prior_group\n1,east\n3,east\n4,west\n");
  auto g = read_pregrouping(in, ids);
  EXPECT_EQ(g[1], -1);
  EXPECT_EQ(g[0], g[2]);
  EXPECT_NE(g[0], g[3]);
  std::istringstream bad("unit,prior_group\n9,east\n");
  EXPECT_THROW(read_pregrouping(bad, ids), UnknownUnit);
}
