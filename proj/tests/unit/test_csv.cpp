#include <sstream>

#include <gtest/gtest.h>

#include "cbgfe/csv.hpp"

using namespace cbgfe;

TEST(Csv, ParsesHeaderAndSkipsBlankLines) {
  std::istringstream in("\xEF\xBB\xBF" "a, b ,c\n1,2,3\n\n4,5,6\n");
  auto t = csv::parse(in);
  ASSERT_EQ(t.header.size(), 3u);
  EXPECT_EQ(t.header[1], "b");
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.line_numbers[1], 4u);
  EXPECT_EQ(*t.column("c"), 2u);
  EXPECT_FALSE(t.column("d"));
}

TEST(Csv, NumbersRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    auto back = csv::to_double(csv::fmt(v));
    ASSERT_TRUE(back);
    EXPECT_EQ(*back, v);
  }
  EXPECT_FALSE(csv::to_double("1,000"));
  EXPECT_FALSE(csv::to_double(""));
  EXPECT_EQ(*csv::to_integer(" 42 "), 42);
}

TEST(Csv, HashIsStable) {
  EXPECT_EQ(csv::hex64(csv::fnv1a("")), "cbf29ce484222325");
  EXPECT_EQ(csv::hex64(csv::fnv1a("a")), "af63dc4c8601ec8c");
}
