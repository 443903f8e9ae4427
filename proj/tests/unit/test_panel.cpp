#include <sstream>

#include <gtest/gtest.h>

#include "cbgfe/panel.hpp"

using namespace cbgfe;

namespace {
const char* kPanel =
    "unit,period,y,x1,z1\n"
    "b,2,4.0,1,0.5\n"
    "a,1,1.0,1,0.1\n"
    "a,2,2.0,1,0.2\n"
    "b,1,3.0,1,0.4\n"
    "a,3,2.5,1,0.3\n"
    "b,3,4.5,1,0.6\n";

PanelDataset load(const std::string& s) {
  std::istringstream in(s);
  return load_panel(in);
}
}  // namespace

TEST(Panel, LoadsLongFormatIntoWideArrays) {
  auto d = load(kPanel);
  ASSERT_EQ(d.n_units(), 2u);
  ASSERT_EQ(d.n_periods(), 3u);
  EXPECT_EQ(d.unit_ids[0], "a");
  EXPECT_EQ(d.period_ids[2], "3");
  EXPECT_DOUBLE_EQ(d.y(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(d.y(0, 2), 2.5);
  EXPECT_EQ(d.p(), 1u);
  EXPECT_EQ(d.q(), 1u);
  EXPECT_DOUBLE_EQ(d.z[1](2, 0), 0.6);
}

TEST(Panel, NumericLabelsSortNumerically) {
  auto d = load("unit,period,y,x1\n10,1,1,1\n9,1,2,1\n10,2,1,1\n9,2,2,1\n");
  EXPECT_EQ(d.unit_ids[0], "9");
  EXPECT_EQ(d.unit_ids[1], "10");
}

TEST(Panel, MissingCellNamesUnitAndPeriod) {
  try {
    load("unit,period,y,x1\n1,1,1,1\n1,2,1,1\n1,3,1,1\n5,1,1,1\n5,2,1,1\n");
    FAIL();
  } catch (const MissingCell& e) {
    EXPECT_NE(std::string(e.what()).find("unit=5, period=3"), std::string::npos);
  }
}

TEST(Panel, DuplicateAndNonNumericCellsRejected) {
  EXPECT_THROW(load("unit,period,y,x1\n1,1,1,1\n1,1,2,1\n"), DuplicateCell);
  EXPECT_THROW(load("unit,period,y,x1\n1,1,abc,1\n"), NonNumeric);
  EXPECT_THROW(load("unit,period,y,x1\n1,1,1,1.2.3\n"), NonNumeric);
}

TEST(Panel, MissingFileIsIoError) {
  try {
    load_panel(std::string("/nonexistent/p.csv"));
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("panel not found"), std::string::npos);
  }
}

TEST(Panel, WriteThenReadRoundTrips) {
  auto d = load(kPanel);
  std::stringstream ss;
  write_panel(ss, d);
  auto e = load_panel(ss);
  EXPECT_TRUE(d.y.isApprox(e.y, 0.0));
  EXPECT_EQ(d.unit_ids, e.unit_ids);
  EXPECT_TRUE(d.z[1].isApprox(e.z[1], 0.0));
}

TEST(Panel, HoldoutSplitKeepsLastPeriods) {
  auto d = load(kPanel);
  auto [train, hold] = split_holdout(d, 1);
  EXPECT_EQ(train.n_periods(), 2u);
  EXPECT_EQ(hold.y.cols(), 1);
  EXPECT_DOUBLE_EQ(hold.y(1, 0), 4.5);
  EXPECT_EQ(hold.period_ids[0], "3");
  EXPECT_THROW(split_holdout(d, 2), HorizonTooLarge);
  EXPECT_THROW(split_holdout(d, 0), HorizonTooLarge);
  auto back = append_holdout(train, hold);
  EXPECT_TRUE(back.y.isApprox(d.y, 0.0));
}

TEST(Panel, LagDropsFirstPeriod) {
  auto d = load(kPanel);
  auto l = make_lag(d);
  ASSERT_EQ(l.n_periods(), 2u);
  EXPECT_EQ(l.z_names.back(), "ylag");
  EXPECT_DOUBLE_EQ(l.z[0](0, l.q() - 1), 1.0);
  EXPECT_DOUBLE_EQ(l.z[1](1, l.q() - 1), 4.0);
  EXPECT_DOUBLE_EQ(l.y(1, 1), 4.5);
}

TEST(Panel, ModelConfigValidatesSlopeFlags) {
  ModelConfig mc;
  mc.group_slopes = {true, false};
  EXPECT_THROW(mc.validate(3), DimensionMismatch);
  EXPECT_NO_THROW(mc.validate(2));
  EXPECT_FALSE(mc.group_specific(1));
}
