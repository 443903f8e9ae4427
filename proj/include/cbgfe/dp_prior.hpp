#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "constraints.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "partition.hpp"
#include "random.hpp"

namespace cbgfe {

// pi_1 = xi_1, pi_k = xi_k prod_{j<k}(1 - xi_j)
struct StickWeights {
  std::vector<double> xi;
  std::vector<double> pi;
  std::vector<double> rest;  // rest[k] = prod_{j<=k}(1 - xi_j)

  std::size_t size() const { return xi.size(); }
  double leftover() const { return rest.empty() ? 1.0 : rest.back(); }

  void clear() {
    xi.clear();
    pi.clear();
    rest.clear();
  }
  void push(double x) {
    double prev = leftover();
    xi.push_back(x);
    pi.push_back(x * prev);
    rest.push_back(prev * (1.0 - x));
  }
  void truncate(std::size_t k) {
    xi.resize(k);
    pi.resize(k);
    rest.resize(k);
  }
  static StickWeights from_xi(const std::vector<double>& xs) {
    StickWeights s;
    for (double x : xs) s.push(x);
    return s;
  }
};

struct DpHyper {
  double a = 0.04;      // initial concentration, prior mean m/n
  double m = 0.4;       // a ~ Gamma(shape m, rate n)
  double n = 10.0;
  Eigen::VectorXd mu_alpha;
  Eigen::MatrixXd sigma_alpha;
  double nu_sigma = 12.0;  // sigma^2 ~ IG(nu/2, delta/2)
  double delta_sigma = 10.0;
  Eigen::VectorXd mu_gamma;  // common coefficients
  Eigen::MatrixXd sigma_gamma;

  static DpHyper defaults(std::size_t p, std::size_t q = 0) {
    DpHyper h;
    h.mu_alpha = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    h.sigma_alpha = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    h.mu_gamma = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(q));
    h.sigma_gamma = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q));
    h.a = h.m / h.n;
    return h;
  }

  void validate() const {
    if (!(a > 0.0 && m > 0.0 && n > 0.0 && nu_sigma > 0.0 && delta_sigma > 0.0))
      throw InvalidArgument("hyperparameters a, m, n, nu_sigma, delta_sigma must be positive");
    if (sigma_alpha.rows() != mu_alpha.size() || sigma_alpha.cols() != mu_alpha.size())
      throw DimensionMismatch("Sigma_alpha does not match mu_alpha");
    if (sigma_gamma.rows() != mu_gamma.size() || sigma_gamma.cols() != mu_gamma.size())
      throw DimensionMismatch("Sigma_gamma does not match mu_gamma");
  }
};

inline double log_eppf(const GroupPartition& G, double a) {
  const double N = static_cast<double>(G.size());
  double s = std::lgamma(a) - std::lgamma(a + N);
  for (std::size_t c : G.counts())
    if (c > 0) s += std::log(a) + std::lgamma(static_cast<double>(c));
  return s;
}

// log EPPF + c * sum over ordered pairs of W_ij delta_ij
inline double log_constrained_prior_unnormalized(const GroupPartition& G, double a, const ConstraintSet& cs) {
  double s = log_eppf(G, a);
  if (cs.strength() == 0.0) return s;
  double tilt = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i)
    for (const auto& e : cs.neighbors(i)) tilt += G[i] == G[e.j] ? e.w : -e.w;
  return s + cs.strength() * tilt;
}

inline double two_unit_same_group_prob(double psi, int ctype, double c) {
  if (c < 0.0) throw InvalidArgument("strength must be nonnegative");
  double W = weight_from(ctype, psi);
  return 1.0 / (1.0 + std::exp(-4.0 * c * W));
}

// Antoniak approximation: E(K) ~ a log((a+N)/a), Var(K) ~ a [log((a+N)/a) - 1]
inline std::pair<double, double> expected_k(double a, std::size_t n) {
  double l = std::log((a + static_cast<double>(n)) / a);
  return {a * l, a * (l - 1.0)};
}

namespace detail {

inline std::size_t draw_index(const std::vector<double>& logw, Rng& rng) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : logw) mx = std::max(mx, v);
  double tot = 0.0;
  std::vector<double> w(logw.size());
  for (std::size_t k = 0; k < logw.size(); ++k) tot += (w[k] = std::exp(logw[k] - mx));
  double u = draw_uniform(rng) * tot, acc = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    acc += w[k];
    if (u < acc) return k;
  }
  for (std::size_t k = w.size(); k-- > 0;)
    if (w[k] > 0.0) return k;
  return 0;
}

// Single-site Gibbs over the tilted EPPF with the DP Polya-urn conditionals.
class PriorGibbs {
 public:
  PriorGibbs(std::vector<int> g, double a, const ConstraintSet& cs) : g_(std::move(g)), a_(a), cs_(cs) {
    for (int v : g_) {
      if (static_cast<std::size_t>(v) >= n_.size()) n_.resize(static_cast<std::size_t>(v) + 1, 0);
      ++n_[static_cast<std::size_t>(v)];
    }
  }

  void update(std::size_t i, Rng& rng) {
    --n_[static_cast<std::size_t>(g_[i])];
    const double c = cs_.strength();
    tilt_.assign(n_.size(), 0.0);
    double base = 0.0;
    for (const auto& e : cs_.neighbors(i)) {
      if (e.w == 0.0) continue;
      double v = pair_term(c, e.w);
      base -= v;
      tilt_[static_cast<std::size_t>(g_[e.j])] += 2.0 * v;
    }
    logw_.clear();
    labels_.clear();
    int empty = -1;
    for (std::size_t k = 0; k < n_.size(); ++k) {
      if (n_[k] == 0) {
        if (empty < 0) empty = static_cast<int>(k);
        continue;
      }
      logw_.push_back(std::log(static_cast<double>(n_[k])) + base + tilt_[k]);
      labels_.push_back(static_cast<int>(k));
    }
    logw_.push_back(std::log(a_) + base);
    labels_.push_back(empty >= 0 ? empty : static_cast<int>(n_.size()));
    int k = labels_[draw_index(logw_, rng)];
    if (static_cast<std::size_t>(k) >= n_.size()) n_.resize(static_cast<std::size_t>(k) + 1, 0);
    ++n_[static_cast<std::size_t>(k)];
    g_[i] = k;
  }

  // Sequentially allocated split-merge move: pick two units; if they share a cluster propose splitting it,
  // otherwise propose merging their clusters. Metropolis-Hastings on the tilted EPPF.
  void split_merge(Rng& rng) {
    const std::size_t N = g_.size();
    if (N < 2) return;
    std::uniform_int_distribution<std::size_t> pick(0, N - 1);
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    while (j == i) j = pick(rng);
    const int gi = g_[i], gj = g_[j];
    const bool split = gi == gj;
    std::vector<std::size_t> rest;
    for (std::size_t k = 0; k < N; ++k)
      if (k != i && k != j && (g_[k] == gi || g_[k] == gj)) rest.push_back(k);
    std::shuffle(rest.begin(), rest.end(), rng);

    side_.assign(N, 0);
    side_[i] = 1;
    side_[j] = 2;
    double n1 = 1.0, n2 = 1.0, logq = 0.0;
    const double c = cs_.strength();
    for (std::size_t k : rest) {
      double t1 = 0.0, t2 = 0.0;
      for (const auto& e : cs_.neighbors(k)) {
        if (e.w == 0.0) continue;
        if (side_[e.j] == 1) t1 += 2.0 * pair_term(c, e.w);
        else if (side_[e.j] == 2) t2 += 2.0 * pair_term(c, e.w);
      }
      const double l1 = std::log(n1) + t1, l2 = std::log(n2) + t2;
      const double m = std::max(l1, l2);
      const double lz = m + std::log(std::exp(l1 - m) + std::exp(l2 - m));
      int s;
      if (split) s = draw_uniform(rng) < std::exp(l1 - lz) ? 1 : 2;
      else s = g_[k] == gi ? 1 : 2;
      logq += (s == 1 ? l1 : l2) - lz;
      side_[k] = s;
      (s == 1 ? n1 : n2) += 1.0;
    }
    double cross = 0.0;
    for (std::size_t u = 0; u < N; ++u) {
      if (side_[u] != 1) continue;
      for (const auto& e : cs_.neighbors(u))
        if (e.w != 0.0 && side_[e.j] == 2) cross += 2.0 * pair_term(c, e.w);
    }
    // log pi(split) - log pi(merged)
    const double d = std::log(a_) + std::lgamma(n1) + std::lgamma(n2) - std::lgamma(n1 + n2) - cross;
    const double log_acc = split ? d - logq : -d + logq;
    if (std::log(draw_uniform(rng)) >= log_acc) return;
    if (split) {
      int fresh = static_cast<int>(n_.size());
      for (std::size_t k = 0; k < n_.size(); ++k)
        if (n_[k] == 0) {
          fresh = static_cast<int>(k);
          break;
        }
      if (static_cast<std::size_t>(fresh) >= n_.size()) n_.resize(static_cast<std::size_t>(fresh) + 1, 0);
      for (std::size_t k = 0; k < N; ++k)
        if (side_[k] == 2) g_[k] = fresh;
      n_[static_cast<std::size_t>(gi)] = static_cast<std::size_t>(n1);
      n_[static_cast<std::size_t>(fresh)] = static_cast<std::size_t>(n2);
    } else {
      for (std::size_t k = 0; k < N; ++k)
        if (side_[k] == 2) g_[k] = gi;
      n_[static_cast<std::size_t>(gi)] = static_cast<std::size_t>(n1 + n2);
      n_[static_cast<std::size_t>(gj)] = 0;
    }
  }

  // one single-site pass plus a few split-merge proposals
  void sweep(Rng& rng) {
    for (std::size_t i = 0; i < g_.size(); ++i) update(i, rng);
    for (int m = 0; m < kSplitMergePerSweep; ++m) split_merge(rng);
  }

  static constexpr int kSplitMergePerSweep = 5;

  const std::vector<int>& labels() const { return g_; }

 private:
  std::vector<int> g_;
  std::vector<std::size_t> n_;
  double a_;
  const ConstraintSet& cs_;
  std::vector<double> tilt_, logw_;
  std::vector<int> labels_;
  std::vector<int> side_;
};

inline std::vector<int> polya_urn(std::size_t n, double a, Rng& rng) {
  std::vector<int> g(n);
  std::vector<double> counts;
  for (std::size_t i = 0; i < n; ++i) {
    double u = draw_uniform(rng) * (static_cast<double>(i) + a), acc = 0.0;
    int k = static_cast<int>(counts.size());
    for (std::size_t j = 0; j < counts.size(); ++j) {
      acc += counts[j];
      if (u < acc) {
        k = static_cast<int>(j);
        break;
      }
    }
    if (k == static_cast<int>(counts.size())) counts.push_back(0.0);
    counts[static_cast<std::size_t>(k)] += 1.0;
    g[i] = k;
  }
  return g;
}

}  // namespace detail

// Unconstrained: sequential Polya-urn seating. Constrained: Polya-urn start plus 100 Gibbs sweeps.
inline GroupPartition simulate_prior_partition(std::size_t n, double a, const ConstraintSet& cs, Rng& rng) {
  if (n == 0) throw InvalidArgument("need at least one unit");
  auto g = detail::polya_urn(n, a, rng);
  if (cs.inactive()) return GroupPartition(std::move(g)).canonical();
  if (cs.n_units() != n) throw DimensionMismatch("constraint set size differs from n");
  detail::PriorGibbs gs(std::move(g), a, cs);
  for (int s = 0; s < 100; ++s) gs.sweep(rng);
  return GroupPartition(gs.labels()).canonical();
}

inline GroupPartition simulate_prior_partition(std::size_t n, double a, Rng& rng) {
  return simulate_prior_partition(n, a, ConstraintSet(n), rng);
}

// Entry (i,j) = share of prior draws with g_i = g_j. Constrained draws are successive sweeps of one chain.
inline Eigen::MatrixXd prior_similarity_matrix(std::size_t n, double a, const ConstraintSet& cs, std::size_t n_draws,
                                               Rng& rng) {
  if (n_draws == 0) throw InvalidArgument("n_draws must be at least 1");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  auto accumulate = [&](const std::vector<int>& g) {
    for (Eigen::Index i = 0; i < N; ++i)
      for (Eigen::Index j = i + 1; j < N; ++j)
        if (g[static_cast<std::size_t>(i)] == g[static_cast<std::size_t>(j)]) S(i, j) += 1.0;
  };
  if (cs.inactive()) {
    for (std::size_t s = 0; s < n_draws; ++s) accumulate(detail::polya_urn(n, a, rng));
  } else {
    if (cs.n_units() != n) throw DimensionMismatch("constraint set size differs from n");
    detail::PriorGibbs gs(detail::polya_urn(n, a, rng), a, cs);
    for (int s = 0; s < 100; ++s) gs.sweep(rng);
    for (std::size_t s = 0; s < n_draws; ++s) {
      gs.sweep(rng);
      accumulate(gs.labels());
    }
  }
  S /= static_cast<double>(n_draws);
  Eigen::MatrixXd out = S + S.transpose();
  out.diagonal().setOnes();
  return out;
}

}  // namespace cbgfe
