#include <cmath>

#include <gtest/gtest.h>

#include "cbgfe/dgp.hpp"

using namespace cbgfe;

TEST(Dgp, SeparationReproducesVarianceTargets) {
  EXPECT_NEAR(separation_m(4, 0.25), 1.79, 0.01);
  EXPECT_NEAR(separation_m(4, 1.0 / 50.0), 0.51, 0.01);
  // population variance of the group means equals V0 K0^2
  for (double v0 : {0.25, 0.02}) {
    double m = separation_m(4, v0), s = 0.0;
    for (int k = 1; k <= 4; ++k) s += std::pow(m * (k - 2.5), 2);
    EXPECT_NEAR(s / 4.0, v0 * 16.0, 1e-12);
  }
}

TEST(Dgp, SimpleDgpShapeAndCenteredMeans) {
  Rng rng(1);
  auto sim = generate_dgp(DgpConfig::preset(1), rng);
  EXPECT_EQ(sim.data.n_units(), 200u);
  EXPECT_EQ(sim.data.n_periods(), 11u);
  EXPECT_EQ(sim.truth.n_groups(), 4u);
  for (auto c : sim.truth.counts()) EXPECT_EQ(c, 50u);
  double s = 0.0;
  for (auto& a : sim.alpha) s += a(0);
  EXPECT_NEAR(s, 0.0, 1e-12);
  // z is the lagged outcome
  EXPECT_EQ(sim.data.z[3](4, 0), sim.data.y(3, 3));
}

TEST(Dgp, StationaryMeanOverLongPanel) {
  Rng rng(2);
  DgpConfig cfg = DgpConfig::preset(1);
  cfg.n = 4;
  cfg.k0 = 4;
  cfg.t = 40000;
  auto sim = generate_dgp(cfg, rng);
  for (std::size_t i = 0; i < 4; ++i) {
    double mu = sim.alpha[static_cast<std::size_t>(sim.truth[i])](0) / (1 - cfg.rho);
    double mean = sim.data.y.row(static_cast<Eigen::Index>(i)).mean();
    // long-run sd of the mean of an AR(1): sigma / (1 - rho) / sqrt(T)
    double se = cfg.noise_sd / (1 - cfg.rho) / std::sqrt(static_cast<double>(cfg.t));
    EXPECT_NEAR(mean, mu, 3.5 * se);
  }
}

TEST(Dgp, GeneralDgpTableAndCap) {
  Rng rng(3);
  auto sim = generate_dgp(DgpConfig::preset(3), rng);
  EXPECT_DOUBLE_EQ(sim.alpha[0](0), -0.15);
  EXPECT_DOUBLE_EQ(sim.alpha[0](1), 0.4);
  EXPECT_DOUBLE_EQ(sim.sigma2[0], 0.5);
  EXPECT_DOUBLE_EQ(sim.alpha[3](2), 0.10);
  EXPECT_DOUBLE_EQ(sim.sigma2[3], 0.125);
  EXPECT_DOUBLE_EQ(sim.gamma(0), 1.5);
  EXPECT_EQ(sim.data.p(), 3u);
  for (std::size_t i = 0; i < sim.data.n_units(); ++i) {
    EXPECT_LE(sim.data.z[i].maxCoeff(), 10.0);
    EXPECT_GE(sim.data.z[i].minCoeff(), 0.0);
  }
}

TEST(Dgp, ConstraintCountsMatchClosedForms) {
  EXPECT_DOUBLE_EQ(max_pl_constraints(200, 4), 4900.0);
  EXPECT_DOUBLE_EQ(max_nl_constraints(200, 4), 15000.0);
  Rng rng(4);
  auto truth = balanced_groups(200, 4);
  auto cs = generate_constraints(truth, 0.05, 0.0, rng);
  EXPECT_EQ(cs.count(LinkType::Positive), 245u);
  EXPECT_EQ(cs.count(LinkType::Negative), 750u);
  for (const auto& c : cs.constraints()) EXPECT_EQ(truth[c.i] == truth[c.j], c.type == LinkType::Positive);
  // full share: every correct pair exactly once
  auto all = generate_constraints(balanced_groups(12, 3), 1.0, 0.0, rng);
  EXPECT_EQ(all.count(LinkType::Positive), static_cast<std::size_t>(max_pl_constraints(12, 3)));
  EXPECT_EQ(all.count(LinkType::Negative), static_cast<std::size_t>(max_nl_constraints(12, 3)));
  EXPECT_TRUE(generate_constraints(truth, 0.0, 0.0, rng).empty());
}

TEST(Dgp, PerturbedConstraintsAreWrong) {
  Rng rng(5);
  auto truth = balanced_groups(40, 4);
  auto cs = generate_constraints(truth, 0.2, 0.5, rng);
  std::size_t wrong = 0;
  for (const auto& c : cs.constraints()) wrong += (truth[c.i] == truth[c.j]) != (c.type == LinkType::Positive);
  std::size_t pl = static_cast<std::size_t>(std::llround(0.2 * max_pl_constraints(40, 4)));
  std::size_t nl = static_cast<std::size_t>(std::llround(0.2 * max_nl_constraints(40, 4)));
  EXPECT_EQ(wrong, pl / 2 + nl / 2);
}

TEST(Dgp, PresetValidation) { EXPECT_THROW(DgpConfig::preset(4), InvalidArgument); }
