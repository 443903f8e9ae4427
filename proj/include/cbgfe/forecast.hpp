#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "gibbs.hpp"
#include "numeric.hpp"
#include "random.hpp"

namespace cbgfe {

// Covariate rows for the forecast period, already split into group (X) and common (Z) blocks.
struct ForecastRows {
  Eigen::MatrixXd x;  // N x p
  Eigen::MatrixXd z;  // N x q
};

inline ForecastRows forecast_rows(const HoldoutSlice& hold, const ModelConfig& cfg, std::size_t period = 0) {
  PanelDataset tmp;
  tmp.y = hold.y;
  tmp.x = hold.x;
  tmp.z = hold.z;
  tmp.x_names.resize(hold.x.empty() ? 0 : static_cast<std::size_t>(hold.x[0].cols()));
  tmp.z_names.resize(hold.z.empty() ? 0 : static_cast<std::size_t>(hold.z[0].cols()));
  Design D = Design::build(tmp, cfg);
  ForecastRows r;
  const auto N = static_cast<Eigen::Index>(D.N), s = static_cast<Eigen::Index>(period);
  r.x.resize(N, static_cast<Eigen::Index>(D.p));
  r.z.resize(N, static_cast<Eigen::Index>(D.q));
  for (Eigen::Index i = 0; i < N; ++i) {
    r.x.row(i) = D.X[static_cast<std::size_t>(i)].row(s);
    r.z.row(i) = D.Z[static_cast<std::size_t>(i)].row(s);
  }
  return r;
}

struct ForecastMetrics {
  double rmsfe = 0.0;
  double coverage = 0.0;
  double avg_length = 0.0;
  double lps = 0.0;
  double crps = 0.0;
};

struct ForecastResult {
  Eigen::VectorXd point;
  Eigen::VectorXd lower, upper;
  Eigen::MatrixXd draws;  // S x N
  std::optional<ForecastMetrics> metrics;
  Eigen::VectorXd unit_lps, unit_crps;
};

namespace detail {
inline void check_rows(const PosteriorChain& chain, const ForecastRows& r) {
  if (chain.empty()) throw EmptyChain("posterior chain is empty");
  if (static_cast<std::size_t>(r.x.rows()) != chain.N || static_cast<std::size_t>(r.x.cols()) != chain.p ||
      static_cast<std::size_t>(r.z.rows()) != chain.N || static_cast<std::size_t>(r.z.cols()) != chain.q)
    throw DimensionMismatch("forecast covariates do not match the chain (N=" + std::to_string(chain.N) +
                            ", p=" + std::to_string(chain.p) + ", q=" + std::to_string(chain.q) + ")");
}
inline double cond_mean(const Draw& d, const ForecastRows& r, Eigen::Index i) {
  double m = r.x.row(i).dot(d.alpha[static_cast<std::size_t>(d.g[static_cast<std::size_t>(i)])]);
  if (r.z.cols() > 0) m += r.z.row(i).dot(d.gamma);
  return m;
}
}  // namespace detail

inline Eigen::MatrixXd predictive_draws(const PosteriorChain& chain, const ForecastRows& rows, Rng& rng) {
  detail::check_rows(chain, rows);
  const auto S = static_cast<Eigen::Index>(chain.size()), N = static_cast<Eigen::Index>(chain.N);
  Eigen::MatrixXd out(S, N);
  for (Eigen::Index s = 0; s < S; ++s) {
    const auto& d = chain.draws[static_cast<std::size_t>(s)];
    for (Eigen::Index i = 0; i < N; ++i) {
      double sd = std::sqrt(d.sigma2[static_cast<std::size_t>(d.g[static_cast<std::size_t>(i)])]);
      out(s, i) = detail::cond_mean(d, rows, i) + sd * draw_normal(rng);
    }
  }
  return out;
}

inline Eigen::VectorXd point_forecast(const Eigen::MatrixXd& draws) { return draws.colwise().mean().transpose(); }

// shortest window holding ceil((1-alpha) S) sorted draws; ties go to the lowest lower end
inline std::pair<double, double> hpdi(std::vector<double> v, double alpha = 0.05) {
  if (v.size() < 2) throw InvalidArgument("hpdi needs at least 2 draws");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  std::sort(v.begin(), v.end());
  const std::size_t S = v.size();
  auto m = static_cast<std::size_t>(std::ceil((1.0 - alpha) * static_cast<double>(S) - 1e-9));
  m = std::clamp<std::size_t>(m, 1, S);
  std::size_t best = 0;
  double w = v[m - 1] - v[0];
  const double tol = 1e-12 * std::max(1.0, std::abs(v.back() - v.front()));
  for (std::size_t j = 1; j + m <= S; ++j) {
    double wj = v[j + m - 1] - v[j];
    if (wj < w - tol) {
      w = wj;
      best = j;
    }
  }
  return {v[best], v[best + m - 1]};
}

inline std::pair<double, double> hpdi(const Eigen::VectorXd& v, double alpha = 0.05) {
  return hpdi(std::vector<double>(v.data(), v.data() + v.size()), alpha);
}

// CRPS from sorted draws: (2/S^2) sum_j (x_j - y)(S 1{y < x_j} - j + 1/2)
inline double crps(const std::vector<double>& sorted, double y) {
  const double S = static_cast<double>(sorted.size());
  if (sorted.empty()) throw InvalidArgument("crps needs draws");
  double s = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    double x = sorted[j];
    s += (x - y) * ((y < x ? S : 0.0) - static_cast<double>(j + 1) + 0.5);
  }
  return 2.0 * s / (S * S);
}

inline double crps_unsorted(std::vector<double> v, double y) {
  std::sort(v.begin(), v.end());
  return crps(v, y);
}

// Gaussian closed form sigma {z (2 Phi(z) - 1) + 2 phi(z) - 1/sqrt(pi)}
inline double crps_gaussian(double y, double mu, double sigma) {
  double z = (y - mu) / sigma;
  return sigma * (z * (2.0 * normal_cdf(z) - 1.0) + 2.0 * normal_pdf(z) - 1.0 / std::sqrt(std::numbers::pi));
}

// per-unit -log[(1/S) sum_j phi(y_i; mean_ij, sigma2_ij)]
inline Eigen::VectorXd unit_log_scores(const PosteriorChain& chain, const Eigen::VectorXd& y, const ForecastRows& rows) {
  detail::check_rows(chain, rows);
  if (static_cast<std::size_t>(y.size()) != chain.N) throw DimensionMismatch("outcome vector length differs from N");
  const auto N = static_cast<Eigen::Index>(chain.N);
  const double logS = std::log(static_cast<double>(chain.size()));
  Eigen::VectorXd out(N);
  std::vector<double> l(chain.size());
  for (Eigen::Index i = 0; i < N; ++i) {
    for (std::size_t s = 0; s < chain.size(); ++s) {
      const auto& d = chain.draws[s];
      l[s] = log_normal_density(y(i), detail::cond_mean(d, rows, i), d.sigma2[static_cast<std::size_t>(d.g[static_cast<std::size_t>(i)])]);
    }
    out(i) = -(logsumexp(l) - logS);
  }
  return out;
}

inline double log_predictive_score(const PosteriorChain& chain, const Eigen::VectorXd& y, const ForecastRows& rows) {
  return unit_log_scores(chain, y, rows).mean();
}

inline ForecastResult evaluate_forecast(const PosteriorChain& chain, const ForecastRows& rows,
                                        const std::optional<Eigen::VectorXd>& y, double alpha, Rng& rng) {
  ForecastResult r;
  r.draws = predictive_draws(chain, rows, rng);
  r.point = point_forecast(r.draws);
  const auto N = r.draws.cols();
  r.lower.resize(N);
  r.upper.resize(N);
  std::vector<std::vector<double>> sorted(static_cast<std::size_t>(N));
  for (Eigen::Index i = 0; i < N; ++i) {
    auto& v = sorted[static_cast<std::size_t>(i)];
    v.assign(r.draws.col(i).data(), r.draws.col(i).data() + r.draws.rows());
    std::sort(v.begin(), v.end());
    auto [lo, hi] = hpdi(v, alpha);
    r.lower(i) = lo;
    r.upper(i) = hi;
  }
  if (!y) return r;
  const Eigen::VectorXd& yy = *y;
  if (yy.size() != N) throw DimensionMismatch("outcome vector length differs from N");
  ForecastMetrics m;
  r.unit_lps = unit_log_scores(chain, yy, rows);
  r.unit_crps.resize(N);
  double se = 0.0, cov = 0.0, len = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    se += (yy(i) - r.point(i)) * (yy(i) - r.point(i));
    cov += (yy(i) >= r.lower(i) && yy(i) <= r.upper(i)) ? 1.0 : 0.0;
    len += r.upper(i) - r.lower(i);
    r.unit_crps(i) = crps(sorted[static_cast<std::size_t>(i)], yy(i));
  }
  const double n = static_cast<double>(N);
  m.rmsfe = std::sqrt(se / n);
  m.coverage = cov / n;
  m.avg_length = len / n;
  m.lps = r.unit_lps.mean();
  m.crps = r.unit_crps.mean();
  r.metrics = m;
  return r;
}

}  // namespace cbgfe
