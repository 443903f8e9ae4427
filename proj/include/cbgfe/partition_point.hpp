#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "gibbs.hpp"
#include "numeric.hpp"
#include "partition.hpp"

namespace cbgfe {

struct PartitionEstimate {
  GroupPartition g_star;
  double vi_score = 0.0;
  std::size_t draw_index = 0;  // best stored draw before refinement
  std::size_t greedy_moves = 0;
  std::string candidate_source;
};

inline Eigen::MatrixXd compute_psm(const std::vector<std::vector<int>>& draws, std::size_t n) {
  if (draws.empty()) throw EmptyChain("no draws to summarize");
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
  std::vector<std::vector<Eigen::Index>> blocks;
  for (const auto& g : draws) {
    if (g.size() != n) throw LengthMismatch("draw has " + std::to_string(g.size()) + " labels, expected " + std::to_string(n));
    blocks.assign(static_cast<std::size_t>(*std::max_element(g.begin(), g.end()) + 1), {});
    for (Eigen::Index i = 0; i < N; ++i) blocks[static_cast<std::size_t>(g[static_cast<std::size_t>(i)])].push_back(i);
    for (const auto& b : blocks)
      for (std::size_t x = 0; x < b.size(); ++x)
        for (std::size_t y = x + 1; y < b.size(); ++y) S(b[x], b[y]) += 1.0;
  }
  S /= static_cast<double>(draws.size());
  Eigen::MatrixXd out = S + S.transpose();
  out.diagonal().setOnes();
  return out;
}

inline Eigen::MatrixXd compute_psm(const PosteriorChain& chain) {
  if (chain.empty()) throw EmptyChain("posterior chain is empty");
  std::vector<std::vector<int>> g;
  g.reserve(chain.size());
  for (const auto& d : chain.draws) g.push_back(d.g);
  return compute_psm(g, chain.N);
}

// VI = H(G) + H(G') - 2 I(G, G'), log base 2
inline double variation_of_information(const GroupPartition& a, const GroupPartition& b) {
  if (a.size() != b.size()) throw LengthMismatch("partitions differ in length");
  const double N = static_cast<double>(a.size());
  if (a.size() == 0) return 0.0;
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ca, cb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    ca[a[i]] += 1.0;
    cb[b[i]] += 1.0;
  }
  auto H = [N](const auto& m) {
    double h = 0.0;
    for (const auto& kv : m) h -= xlog2x(kv.second / N);
    return h;
  };
  double v = 2.0 * H(joint) - H(ca) - H(cb);
  return v < 0.0 ? 0.0 : v;
}

namespace detail {
// contribution of one block: sum_{i in B} [log2 |B| - 2 log2 sum_{j in B} psm_ij]
inline double vi_block(const std::vector<std::size_t>& b, const Eigen::MatrixXd& psm) {
  if (b.empty()) return 0.0;
  double s = 0.0, lb = std::log2(static_cast<double>(b.size()));
  for (std::size_t i : b) {
    double r = 0.0;
    for (std::size_t j : b) r += psm(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    s += lb - 2.0 * std::log2(r);
  }
  return s;
}
}  // namespace detail

// sum_i log2 sum_j 1(g_j = g_i) - 2 sum_i log2 sum_j psm_ij 1(g_j = g_i)
inline double vi_objective(const GroupPartition& g, const Eigen::MatrixXd& psm) {
  if (static_cast<Eigen::Index>(g.size()) != psm.rows()) throw LengthMismatch("partition and PSM sizes differ");
  double s = 0.0;
  for (const auto& b : g.blocks()) s += detail::vi_block(b, psm);
  return s;
}

// Single-unit moves (existing blocks or a new singleton) until no strict improvement.
inline std::size_t greedy_refine(GroupPartition& g, const Eigen::MatrixXd& psm, double* score = nullptr) {
  const std::size_t N = g.size();
  auto blocks = g.blocks();
  std::vector<int> lab(N);
  for (std::size_t k = 0; k < blocks.size(); ++k)
    for (std::size_t i : blocks[k]) lab[i] = static_cast<int>(k);
  std::vector<double> f(blocks.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) f[k] = detail::vi_block(blocks[k], psm);
  std::size_t moves = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < N; ++i) {
      auto A = static_cast<std::size_t>(lab[i]);
      std::vector<std::size_t> a_minus;
      for (std::size_t j : blocks[A])
        if (j != i) a_minus.push_back(j);
      double fa = detail::vi_block(a_minus, psm);
      double best = -1e-12, best_fb = 0.0;
      std::size_t best_b = A;
      for (std::size_t B = 0; B <= blocks.size(); ++B) {
        if (B == A) continue;
        if (B == blocks.size() && a_minus.empty()) continue;  // already a singleton
        std::vector<std::size_t> b_plus = B < blocks.size() ? blocks[B] : std::vector<std::size_t>{};
        if (B < blocks.size() && b_plus.empty()) continue;
        b_plus.push_back(i);
        double fb = detail::vi_block(b_plus, psm);
        double fold = f[A] + (B < blocks.size() ? f[B] : 0.0);
        double delta = fa + fb - fold;
        if (delta < best) {
          best = delta;
          best_b = B;
          best_fb = fb;
        }
      }
      if (best_b == A) continue;
      if (best_b == blocks.size()) {
        blocks.emplace_back();
        f.push_back(0.0);
      }
      blocks[A] = a_minus;
      f[A] = fa;
      blocks[best_b].push_back(i);
      f[best_b] = best_fb;
      lab[i] = static_cast<int>(best_b);
      ++moves;
      improved = true;
    }
  }
  g = GroupPartition(lab).canonical();
  if (score) {
    double s = 0.0;
    for (double v : f) s += v;
    *score = s;
  }
  return moves;
}

inline PartitionEstimate point_estimate_partition(const std::vector<std::vector<int>>& draws, const Eigen::MatrixXd& psm) {
  if (draws.empty()) throw EmptyChain("no draws to search");
  std::unordered_map<std::string, double> seen;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  for (std::size_t s = 0; s < draws.size(); ++s) {
    GroupPartition g = GroupPartition(draws[s]).canonical();
    std::string key(reinterpret_cast<const char*>(g.labels().data()), g.labels().size() * sizeof(int));
    auto it = seen.find(key);
    double v = it != seen.end() ? it->second : (seen[key] = vi_objective(g, psm));
    if (v < best) {
      best = v;
      best_idx = s;
    }
  }
  PartitionEstimate est;
  est.draw_index = best_idx;
  est.g_star = GroupPartition(draws[best_idx]).canonical();
  double refined = best;
  est.greedy_moves = greedy_refine(est.g_star, psm, &refined);
  est.vi_score = est.greedy_moves ? vi_objective(est.g_star, psm) : best;
  est.candidate_source = est.greedy_moves ? "draw " + std::to_string(best_idx) + " + greedy" : "draw " + std::to_string(best_idx);
  return est;
}

inline PartitionEstimate point_estimate_partition(const PosteriorChain& chain, const Eigen::MatrixXd& psm) {
  if (chain.empty()) throw EmptyChain("posterior chain is empty");
  std::vector<std::vector<int>> g;
  g.reserve(chain.size());
  for (const auto& d : chain.draws) g.push_back(d.g);
  return point_estimate_partition(g, psm);
}

}  // namespace cbgfe
