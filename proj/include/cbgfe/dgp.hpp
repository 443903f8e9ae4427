#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "constraints.hpp"
#include "panel.hpp"
#include "partition.hpp"
#include "random.hpp"

namespace cbgfe {

struct DgpConfig {
  int dgp_id = 1;
  std::size_t n = 200;
  std::size_t t = 11;
  std::size_t k0 = 4;
  double rho = 0.7;
  double v0 = 0.25;  // separation target; DGP 2 uses 1/50
  std::optional<double> m;  // overrides the calibrated separation
  double noise_sd = 0.5;
  // DGP 3 rows: (alpha0, alpha1, alpha2, sigma^2)
  std::vector<std::array<double, 4>> coefficients = {
      {-0.15, 0.4, 0.16, 0.500}, {-0.05, 0.8, 0.14, 0.375}, {0.05, 0.5, 0.12, 0.250}, {0.15, 0.7, 0.10, 0.125}};
  double gamma = 1.5;
  double z_cap = 10.0;
  std::size_t burn_in = 100;  // DGP 3 presample periods

  static DgpConfig preset(int id) {
    DgpConfig c;
    c.dgp_id = id;
    if (id == 2) c.v0 = 1.0 / 50.0;
    if (id < 1 || id > 3) throw InvalidArgument("dgp must be 1, 2 or 3");
    return c;
  }
};

struct SimulatedPanel {
  PanelDataset data;
  GroupPartition truth;
  std::vector<Eigen::VectorXd> alpha;  // per true group
  std::vector<double> sigma2;
  Eigen::VectorXd gamma;  // common coefficients in design order
};

// m such that the spread of alpha_k = m (k - (K0+1)/2) equals V0 K0^2
inline double separation_m(std::size_t k0, double v0) {
  double c = (static_cast<double>(k0) + 1.0) / 2.0, ss = 0.0;
  for (std::size_t k = 1; k <= k0; ++k) ss += (static_cast<double>(k) - c) * (static_cast<double>(k) - c);
  if (ss == 0.0) return 0.0;
  double K = static_cast<double>(k0);
  return std::sqrt(v0 * K * K * K / ss);
}

// floor(n/k0) units per group, remainder to the last group
inline GroupPartition balanced_groups(std::size_t n, std::size_t k0) {
  if (k0 == 0 || k0 > n) throw InvalidArgument("need 1 <= k0 <= n");
  std::size_t per = n / k0;
  std::vector<int> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<int>(std::min(i / per, k0 - 1));
  return GroupPartition(std::move(g));
}

namespace detail {
inline PanelDataset empty_panel(std::size_t n, std::size_t t, std::vector<std::string> xn, std::vector<std::string> zn) {
  PanelDataset d;
  d.y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(t));
  d.x.assign(n, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(xn.size())));
  d.z.assign(n, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(zn.size())));
  for (std::size_t i = 0; i < n; ++i) d.unit_ids.push_back(std::to_string(i + 1));
  for (std::size_t s = 0; s < t; ++s) d.period_ids.push_back(std::to_string(s + 1));
  d.x_names = std::move(xn);
  d.z_names = std::move(zn);
  return d;
}
}  // namespace detail

// y_it = alpha_g + rho y_{i,t-1} + eps; x = [1] group-specific, z = [y_{t-1}] common
inline SimulatedPanel generate_simple_dgp(const DgpConfig& cfg, Rng& rng) {
  if (!(std::abs(cfg.rho) < 1.0)) throw InvalidArgument("simple DGP needs |rho| < 1");
  SimulatedPanel out;
  out.truth = balanced_groups(cfg.n, cfg.k0);
  double m = cfg.m ? *cfg.m : separation_m(cfg.k0, cfg.v0);
  double c = (static_cast<double>(cfg.k0) + 1.0) / 2.0, s2 = cfg.noise_sd * cfg.noise_sd;
  for (std::size_t k = 1; k <= cfg.k0; ++k) {
    out.alpha.push_back(Eigen::VectorXd::Constant(1, m * (static_cast<double>(k) - c)));
    out.sigma2.push_back(s2);
  }
  out.gamma = Eigen::VectorXd::Constant(1, cfg.rho);
  out.data = detail::empty_panel(cfg.n, cfg.t, {"x1"}, {"z1"});
  auto& d = out.data;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    double a = out.alpha[static_cast<std::size_t>(out.truth[i])](0);
    double prev = draw_normal(rng, a / (1.0 - cfg.rho), std::sqrt(s2 / (1.0 - cfg.rho * cfg.rho)));
    for (std::size_t s = 0; s < cfg.t; ++s) {
      auto S = static_cast<Eigen::Index>(s);
      double y = a + cfg.rho * prev + cfg.noise_sd * draw_normal(rng);
      d.y(static_cast<Eigen::Index>(i), S) = y;
      d.x[i](S, 0) = 1.0;
      d.z[i](S, 0) = prev;
      prev = y;
    }
  }
  return out;
}

// y_it = alpha_g' [1, y_{t-1}, x2] + gamma z + sigma_g eps
inline SimulatedPanel generate_general_dgp(const DgpConfig& cfg, Rng& rng) {
  if (cfg.coefficients.size() < cfg.k0) throw InvalidArgument("coefficient table has fewer rows than k0");
  SimulatedPanel out;
  out.truth = balanced_groups(cfg.n, cfg.k0);
  for (std::size_t k = 0; k < cfg.k0; ++k) {
    const auto& r = cfg.coefficients[k];
    Eigen::VectorXd a(3);
    a << r[0], r[1], r[2];
    out.alpha.push_back(a);
    out.sigma2.push_back(r[3]);
  }
  out.gamma = Eigen::VectorXd::Constant(1, cfg.gamma);
  out.data = detail::empty_panel(cfg.n, cfg.t, {"x1", "x2", "x3"}, {"z1"});
  auto& d = out.data;
  for (std::size_t i = 0; i < cfg.n; ++i) {
    auto k = static_cast<std::size_t>(out.truth[i]);
    const auto& a = out.alpha[k];
    double sd = std::sqrt(out.sigma2[k]);
    double prev = draw_normal(rng);
    for (std::size_t s = 0; s < cfg.burn_in + cfg.t; ++s) {
      double x2 = draw_normal(rng);
      double z = std::min(draw_gamma(rng, 1.0, 1.0), cfg.z_cap);
      double y = a(0) + a(1) * prev + a(2) * x2 + cfg.gamma * z + sd * draw_normal(rng);
      if (s >= cfg.burn_in) {
        auto S = static_cast<Eigen::Index>(s - cfg.burn_in);
        d.y(static_cast<Eigen::Index>(i), S) = y;
        d.x[i](S, 0) = 1.0;
        d.x[i](S, 1) = prev;
        d.x[i](S, 2) = x2;
        d.z[i](S, 0) = z;
      }
      prev = y;
    }
  }
  return out;
}

inline SimulatedPanel generate_dgp(const DgpConfig& cfg, Rng& rng) {
  return cfg.dgp_id == 3 ? generate_general_dgp(cfg, rng) : generate_simple_dgp(cfg, rng);
}

inline double max_pl_constraints(std::size_t n, std::size_t k) {
  double N = static_cast<double>(n), K = static_cast<double>(k);
  return N * (N - K) / (2.0 * K);
}
inline double max_nl_constraints(std::size_t n, std::size_t k) {
  double N = static_cast<double>(n), K = static_cast<double>(k);
  return N * N * (K - 1.0) / (2.0 * K);
}

// Samples a share of all correct PL/NL pairs given the true partition, then mislabels a fraction e.
inline ConstraintSet generate_constraints(const GroupPartition& truth, double fraction, double e, Rng& rng,
                                          double strength = 0.5) {
  const std::size_t n = truth.size();
  auto blocks = truth.blocks();
  const std::size_t K = blocks.size();
  ConstraintSet cs(n, strength);
  if (fraction <= 0.0) return cs;
  auto n_pl = static_cast<std::size_t>(std::llround(fraction * max_pl_constraints(n, K)));
  auto n_nl = static_cast<std::size_t>(std::llround(fraction * max_nl_constraints(n, K)));
  std::vector<std::size_t> big;
  std::size_t avail_pl = 0, avail_nl = n * (n - 1) / 2;
  for (std::size_t k = 0; k < K; ++k) {
    std::size_t b = blocks[k].size();
    avail_pl += b * (b - 1) / 2;
    avail_nl -= b * (b - 1) / 2;
    if (b >= 2) big.push_back(k);
  }
  n_pl = std::min(n_pl, avail_pl);
  n_nl = std::min(n_nl, avail_nl);
  std::set<std::pair<std::size_t, std::size_t>> used;
  auto pick = [&](std::size_t hi) { return std::uniform_int_distribution<std::size_t>(0, hi - 1)(rng); };
  auto add = [&](std::size_t i, std::size_t j, LinkType t) {
    if (!used.insert({std::min(i, j), std::max(i, j)}).second) return false;
    cs.add({i, j, t, draw_accuracy(rng, true)});
    return true;
  };
  for (std::size_t got = 0; got < n_pl;) {
    const auto& b = blocks[big[pick(big.size())]];
    std::size_t x = pick(b.size()), y = pick(b.size() - 1);
    if (y >= x) ++y;
    got += add(b[x], b[y], LinkType::Positive);
  }
  if (K >= 2)
    for (std::size_t got = 0; got < n_nl;) {
      std::size_t g1 = pick(K), g2 = pick(K - 1);
      if (g2 >= g1) ++g2;
      got += add(blocks[g1][pick(blocks[g1].size())], blocks[g2][pick(blocks[g2].size())], LinkType::Negative);
    }
  if (e > 0.0) return perturb_constraints(cs, e, rng);
  return cs;
}

}  // namespace cbgfe
