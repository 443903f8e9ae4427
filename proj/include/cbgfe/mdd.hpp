#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "constraints.hpp"
#include "error.hpp"
#include "gibbs.hpp"
#include "numeric.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace cbgfe {

// log of [S^{-1} sum_j exp(-l_j)]^{-1}
inline double log_mdd_harmonic_mean(const std::vector<double>& loglik) {
  if (loglik.empty()) throw EmptyChain("no log-likelihoods");
  std::vector<double> neg(loglik.size());
  for (std::size_t j = 0; j < loglik.size(); ++j) {
    if (loglik[j] == -std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
    neg[j] = -loglik[j];
  }
  return -(logsumexp(neg) - std::log(static_cast<double>(loglik.size())));
}

struct MddEstimate {
  double log_mdd = 0.0;
  double mc_se = 0.0;  // batch-means standard error of log_mdd
  double ess = 0.0;    // (sum w)^2 / sum w^2 for harmonic weights w_j ~ exp(-l_j)
};

inline MddEstimate harmonic_mean_estimate(const std::vector<double>& loglik, std::size_t n_batches = 20) {
  MddEstimate e;
  e.log_mdd = log_mdd_harmonic_mean(loglik);
  if (!std::isfinite(e.log_mdd)) return e;
  double mn = *std::min_element(loglik.begin(), loglik.end());
  double sw = 0.0, sw2 = 0.0;
  for (double l : loglik) {
    double w = std::exp(mn - l);
    sw += w;
    sw2 += w * w;
  }
  e.ess = sw * sw / sw2;
  const std::size_t S = loglik.size();
  n_batches = std::min(n_batches, S);
  if (n_batches >= 2) {
    std::vector<double> b;
    const std::size_t len = S / n_batches;
    for (std::size_t k = 0; k < n_batches; ++k) {
      std::vector<double> part(loglik.begin() + static_cast<std::ptrdiff_t>(k * len),
                               loglik.begin() + static_cast<std::ptrdiff_t>((k + 1) * len));
      b.push_back(log_mdd_harmonic_mean(part));
    }
    double m = 0.0, v = 0.0;
    for (double x : b) m += x;
    m /= static_cast<double>(b.size());
    for (double x : b) v += (x - m) * (x - m);
    v /= static_cast<double>(b.size() - 1);
    e.mc_se = std::sqrt(v / static_cast<double>(b.size()));
  }
  return e;
}

inline MddEstimate harmonic_mean_estimate(const PosteriorChain& chain) {
  std::vector<double> l;
  l.reserve(chain.size());
  for (const auto& d : chain.draws) l.push_back(d.loglik);
  return harmonic_mean_estimate(l);
}

inline std::vector<double> default_c_grid() { return {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}; }

struct MddResult {
  std::vector<double> grid;
  std::vector<MddEstimate> estimates;
  std::size_t best = 0;
  double c_star = 0.0;
  std::vector<PosteriorChain> chains;  // kept when requested
};

struct SelectOptions {
  std::size_t threads = 1;
  bool common_random_numbers = true;  // same stream at every grid point
  bool keep_chains = false;
};

// One chain per grid value of c; c* maximizes the harmonic-mean log MDD, ties to the smaller c.
inline MddResult select_c(const Design& D, const ConstraintSet& cs_template, const DpHyper& h,
                          const std::vector<double>& grid, const SamplerSettings& settings, std::uint64_t seed,
                          const SelectOptions& opt = {}) {
  if (grid.empty()) throw InvalidArgument("c grid is empty");
  for (double c : grid)
    if (!(c >= 0.0)) throw InvalidArgument("c grid values must be nonnegative");
  MddResult r;
  r.grid = grid;
  r.estimates.resize(grid.size());
  r.chains.resize(grid.size());
  parallel_for(grid.size(), opt.threads, [&](std::size_t k) {
    ConstraintSet cs = cs_template.with_strength(grid[k]);
    Rng rng = make_rng(seed, opt.common_random_numbers ? 0 : k);
    PosteriorChain chain = run_chain(D, cs, h, settings, rng);
    r.estimates[k] = harmonic_mean_estimate(chain);
    if (opt.keep_chains) r.chains[k] = std::move(chain);
  });
  std::vector<std::size_t> order(grid.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return grid[a] < grid[b]; });
  r.best = order.front();
  for (std::size_t k : order)
    if (r.estimates[k].log_mdd > r.estimates[r.best].log_mdd) r.best = k;
  r.c_star = grid[r.best];
  if (!opt.keep_chains) r.chains.clear();
  return r;
}

}  // namespace cbgfe
