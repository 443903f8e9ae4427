#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>

#include "constraints.hpp"
#include "dp_prior.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "panel.hpp"
#include "partition.hpp"
#include "random.hpp"

namespace cbgfe {

// Regression design split into group-specific (X) and common (Z) blocks.
struct Design {
  std::size_t N = 0, T = 0, p = 0, q = 0;
  bool heteroskedastic = true;
  Eigen::MatrixXd y;               // N x T
  std::vector<Eigen::MatrixXd> X;  // T x p
  std::vector<Eigen::MatrixXd> Z;  // T x q
  std::vector<Eigen::MatrixXd> XtX;
  std::vector<Eigen::MatrixXd> ZtZ;
  std::vector<Eigen::MatrixXd> ZtX;

  Eigen::VectorXd yi(std::size_t i) const { return y.row(static_cast<Eigen::Index>(i)).transpose(); }

  static Design build(const PanelDataset& d, const ModelConfig& cfg) {
    cfg.validate(d.p());
    Design D;
    D.N = d.n_units();
    D.T = d.n_periods();
    D.heteroskedastic = cfg.heteroskedastic;
    std::vector<Eigen::Index> gcols, ccols;
    for (std::size_t c = 0; c < d.p(); ++c) (cfg.group_specific(c) ? gcols : ccols).push_back(static_cast<Eigen::Index>(c));
    D.p = gcols.size();
    D.q = ccols.size() + d.q();
    D.y = d.y;
    const auto T = static_cast<Eigen::Index>(D.T);
    for (std::size_t i = 0; i < D.N; ++i) {
      Eigen::MatrixXd X(T, static_cast<Eigen::Index>(D.p)), Z(T, static_cast<Eigen::Index>(D.q));
      for (std::size_t c = 0; c < gcols.size(); ++c) X.col(static_cast<Eigen::Index>(c)) = d.x[i].col(gcols[c]);
      for (std::size_t c = 0; c < ccols.size(); ++c) Z.col(static_cast<Eigen::Index>(c)) = d.x[i].col(ccols[c]);
      for (std::size_t c = 0; c < d.q(); ++c)
        Z.col(static_cast<Eigen::Index>(ccols.size() + c)) = d.z[i].col(static_cast<Eigen::Index>(c));
      D.X.push_back(X);
      D.Z.push_back(Z);
    }
    D.precompute();
    return D;
  }

  void precompute() {
    XtX.clear();
    ZtZ.clear();
    ZtX.clear();
    for (std::size_t i = 0; i < N; ++i) {
      XtX.push_back(X[i].transpose() * X[i]);
      ZtZ.push_back(Z[i].transpose() * Z[i]);
      ZtX.push_back(Z[i].transpose() * X[i]);
    }
  }
};

struct GroupParams {
  std::vector<Eigen::VectorXd> alpha;  // one p-vector per group label
  std::vector<double> sigma2;          // homoskedastic: all entries equal
  std::size_t size() const { return alpha.size(); }
};

struct CommonParams {
  Eigen::VectorXd gamma;
};

struct SliceState {
  std::vector<double> u;
  double u_star = 1.0;
  std::size_t k_star = 0;
  std::size_t k_active = 0;
  double eta = 0.0;
};

struct SamplerState {
  GroupParams params;
  CommonParams common;
  StickWeights sticks;
  SliceState slice;
  GroupPartition partition;
  double a = 1.0;
};

struct SamplerSettings {
  std::size_t n_burn = 5000;
  std::size_t n_keep = 5000;
  std::size_t thin = 1;
  std::optional<GroupPartition> fixed_partition;  // oracle / pooled / flat configurations
  std::size_t max_groups = 0;                     // 0: spawn until the slice condition holds
  bool sample_concentration = true;
  double init_jitter = 0.1;
  double strength_ramp = 0.5;  // share of burn-in over which c rises linearly from 0 to its value
  std::optional<SamplerState> init;
};

struct Draw {
  std::size_t iteration = 0;
  std::size_t k_active = 0;  // max label in the sampler state (K^a)
  std::size_t k_star = 0;
  std::size_t n_groups = 0;  // nonempty groups
  double a = 0.0;
  std::vector<int> g;  // canonical labels
  std::vector<Eigen::VectorXd> alpha;
  std::vector<double> sigma2;
  Eigen::VectorXd gamma;
  double loglik = 0.0;
};

struct PosteriorChain {
  std::size_t N = 0, p = 0, q = 0;
  bool heteroskedastic = true;
  std::vector<Draw> draws;
  std::size_t iterations = 0;
  std::size_t slice_violations = 0;
  std::size_t max_k_star = 0;
  bool empty() const { return draws.empty(); }
  std::size_t size() const { return draws.size(); }
};

struct NormalConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision;
  Eigen::MatrixXd covariance() const {
    return precision.llt().solve(Eigen::MatrixXd::Identity(precision.rows(), precision.cols()));
  }
};

struct InvGammaConditional {
  double shape = 0.0;
  double scale = 0.0;
  double mean() const { return scale / (shape - 1.0); }
  double variance() const { return scale * scale / ((shape - 1.0) * (shape - 1.0) * (shape - 2.0)); }
};

namespace detail {

inline Eigen::MatrixXd spd_inverse(const Eigen::MatrixXd& S, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success) throw SingularPrecision(std::string(what) + " is not positive definite");
  return llt.solve(Eigen::MatrixXd::Identity(S.rows(), S.cols()));
}

inline Eigen::VectorXd draw_mvn_precision(const NormalConditional& c, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(c.precision);
  if (llt.info() != Eigen::Success) throw SingularPrecision("posterior precision failed Cholesky");
  Eigen::VectorXd z = draw_std_normal_vec(rng, c.mean.size());
  return c.mean + llt.matrixU().solve(z);
}

inline Eigen::VectorXd draw_mvn_cov(const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, Rng& rng) {
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw SingularPrecision("prior covariance failed Cholesky");
  return mu + llt.matrixL() * draw_std_normal_vec(rng, mu.size());
}

}  // namespace detail

// Conjugate pieces. `ytil` holds y_i - Z_i gamma for every unit.
inline NormalConditional alpha_conditional(const Design& D, const std::vector<std::size_t>& members,
                                           const std::vector<Eigen::VectorXd>& ytil, double sigma2,
                                           const DpHyper& h, const Eigen::MatrixXd& prior_prec) {
  const auto p = static_cast<Eigen::Index>(D.p);
  Eigen::MatrixXd P = prior_prec;
  Eigen::VectorXd b = prior_prec * h.mu_alpha;
  Eigen::MatrixXd xx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xy = Eigen::VectorXd::Zero(p);
  for (std::size_t i : members) {
    xx += D.XtX[i];
    xy += D.X[i].transpose() * ytil[i];
  }
  P += xx / sigma2;
  b += xy / sigma2;
  Eigen::LLT<Eigen::MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) throw SingularPrecision("alpha posterior precision failed Cholesky");
  return {llt.solve(b), P};
}

inline InvGammaConditional sigma2_conditional(double nu, double delta, std::size_t n_obs, double ssr) {
  return {(nu + static_cast<double>(n_obs)) / 2.0, (delta + ssr) / 2.0};
}

inline double unit_ssr(const Design& D, std::size_t i, const Eigen::VectorXd& ytil_i, const Eigen::VectorXd& alpha) {
  return (ytil_i - D.X[i] * alpha).squaredNorm();
}

inline double unit_loglik(const Design& D, std::size_t i, const Eigen::VectorXd& ytil_i, const Eigen::VectorXd& alpha,
                          double sigma2) {
  const double T = static_cast<double>(D.T);
  return -0.5 * (T * (kLog2Pi + std::log(sigma2)) + unit_ssr(D, i, ytil_i, alpha) / sigma2);
}

class GibbsSampler {
 public:
  GibbsSampler(const Design& D, const ConstraintSet& cs, const DpHyper& h, SamplerSettings settings)
      : D_(D), cs_(cs), h_(h), set_(std::move(settings)) {
    h_.validate();
    if (static_cast<std::size_t>(h_.mu_alpha.size()) != D_.p)
      throw DimensionMismatch("mu_alpha has " + std::to_string(h_.mu_alpha.size()) + " entries, design has p=" +
                              std::to_string(D_.p));
    if (static_cast<std::size_t>(h_.mu_gamma.size()) != D_.q)
      throw DimensionMismatch("mu_gamma has " + std::to_string(h_.mu_gamma.size()) + " entries, design has q=" +
                              std::to_string(D_.q));
    if (!cs_.empty() && cs_.n_units() != D_.N) throw DimensionMismatch("constraint set size differs from panel");
    if (set_.fixed_partition && set_.fixed_partition->size() != D_.N)
      throw DimensionMismatch("fixed partition size differs from panel");
    alpha_prec_ = detail::spd_inverse(h_.sigma_alpha, "Sigma_alpha");
    if (D_.q > 0) gamma_prec_ = detail::spd_inverse(h_.sigma_gamma, "Sigma_gamma");
    constrained_ = !cs_.empty() && !cs_.inactive();
    ytil_.resize(D_.N);
  }

  SamplerState initial_state(Rng& rng) const {
    if (set_.init) return *set_.init;
    const auto p = static_cast<Eigen::Index>(D_.p), q = static_cast<Eigen::Index>(D_.q);
    SamplerState s;
    s.partition = set_.fixed_partition ? *set_.fixed_partition : GroupPartition::singletons(D_.N);
    const auto K = static_cast<std::size_t>(s.partition.n_labels());
    std::vector<std::vector<std::size_t>> mem(K);
    for (std::size_t i = 0; i < D_.N; ++i) mem[static_cast<std::size_t>(s.partition[i])].push_back(i);

    // least squares at the initial partition: group slopes per block, common slopes shared
    auto block_fit = [&](const std::vector<std::size_t>& units, const Eigen::MatrixXd& rhs_by_unit) {
      Eigen::MatrixXd xx = Eigen::MatrixXd::Zero(p, p);
      Eigen::MatrixXd xr = Eigen::MatrixXd::Zero(p, rhs_by_unit.cols());
      for (std::size_t i : units) {
        xx += D_.XtX[i];
        xr += D_.X[i].transpose() * rhs_by_unit.middleRows(static_cast<Eigen::Index>(i * D_.T), static_cast<Eigen::Index>(D_.T));
      }
      return Eigen::MatrixXd(xx.completeOrthogonalDecomposition().solve(xr));
    };
    const auto NT = static_cast<Eigen::Index>(D_.N * D_.T);
    Eigen::MatrixXd R(NT, 1 + q);  // columns: y, Z
    for (std::size_t i = 0; i < D_.N; ++i) {
      auto r = static_cast<Eigen::Index>(i * D_.T);
      R.block(r, 0, static_cast<Eigen::Index>(D_.T), 1) = D_.yi(i);
      if (q > 0) R.block(r, 1, static_cast<Eigen::Index>(D_.T), q) = D_.Z[i];
    }
    // project out the group blocks, then regress y on the common block
    Eigen::MatrixXd Rt = R;
    std::vector<Eigen::MatrixXd> coef(K);
    for (std::size_t k = 0; k < K; ++k) {
      if (mem[k].empty()) continue;
      coef[k] = block_fit(mem[k], R);
      for (std::size_t i : mem[k]) {
        auto r = static_cast<Eigen::Index>(i * D_.T);
        Rt.middleRows(r, static_cast<Eigen::Index>(D_.T)) -= D_.X[i] * coef[k];
      }
    }
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(q);
    if (q > 0) {
      Eigen::MatrixXd Zt = Rt.rightCols(q);
      gamma = Zt.completeOrthogonalDecomposition().solve(Rt.col(0));
    }
    Eigen::VectorXd resid = Rt.col(0) - (q > 0 ? Eigen::VectorXd(Rt.rightCols(q) * gamma) : Eigen::VectorXd::Zero(NT));
    double dof = static_cast<double>(NT) - static_cast<double>(K * D_.p + D_.q);
    double s2 = resid.squaredNorm() / (dof > 0.0 ? dof : static_cast<double>(NT));
    s2 = std::max(s2, 1e-8);

    for (std::size_t k = 0; k < K; ++k) {
      Eigen::VectorXd a = Eigen::VectorXd::Zero(p);
      if (!mem[k].empty()) {
        a = coef[k].col(0);
        if (q > 0) a -= coef[k].rightCols(q) * gamma;
      }
      Eigen::VectorXd b0 = a;
      for (Eigen::Index c = 0; c < p; ++c) a(c) += set_.init_jitter * std::abs(b0(c)) * draw_normal(rng);
      s.params.alpha.push_back(a);
      s.params.sigma2.push_back(s2);
    }
    s.common.gamma = gamma;
    s.a = h_.a;
    s.slice.k_active = K;
    return s;
  }

  void refresh_residuals(const SamplerState& s) {
    for (std::size_t i = 0; i < D_.N; ++i) {
      ytil_[i] = D_.yi(i);
      if (D_.q > 0) ytil_[i] -= D_.Z[i] * s.common.gamma;
    }
  }

  const std::vector<Eigen::VectorXd>& residuals() const { return ytil_; }

  // drop potential groups nobody joined last sweep
  void trim_to_active(SamplerState& s) const {
    auto K = static_cast<std::size_t>(s.partition.n_labels());
    s.slice.k_active = K;
    s.params.alpha.resize(K);
    s.params.sigma2.resize(K);
    if (s.sticks.size() > K) s.sticks.truncate(K);
  }

  std::vector<std::vector<std::size_t>> members(const SamplerState& s) const {
    std::vector<std::vector<std::size_t>> m(s.params.size());
    for (std::size_t i = 0; i < D_.N; ++i) m[static_cast<std::size_t>(s.partition[i])].push_back(i);
    return m;
  }

  void update_alpha(SamplerState& s, Rng& rng) const {
    auto mem = members(s);
    for (std::size_t k = 0; k < s.params.size(); ++k) {
      if (mem[k].empty()) {
        s.params.alpha[k] = detail::draw_mvn_cov(h_.mu_alpha, h_.sigma_alpha, rng);
        continue;
      }
      auto c = alpha_conditional(D_, mem[k], ytil_, s.params.sigma2[k], h_, alpha_prec_);
      s.params.alpha[k] = detail::draw_mvn_precision(c, rng);
    }
  }

  void update_sigma2(SamplerState& s, Rng& rng) const {
    auto mem = members(s);
    if (D_.heteroskedastic) {
      for (std::size_t k = 0; k < s.params.size(); ++k) {
        double ssr = 0.0;
        for (std::size_t i : mem[k]) ssr += unit_ssr(D_, i, ytil_[i], s.params.alpha[k]);
        auto c = sigma2_conditional(h_.nu_sigma, h_.delta_sigma, mem[k].size() * D_.T, ssr);
        s.params.sigma2[k] = draw_inv_gamma(rng, c.shape, c.scale);
      }
    } else {
      double ssr = 0.0;
      for (std::size_t i = 0; i < D_.N; ++i)
        ssr += unit_ssr(D_, i, ytil_[i], s.params.alpha[static_cast<std::size_t>(s.partition[i])]);
      auto c = sigma2_conditional(h_.nu_sigma, h_.delta_sigma, D_.N * D_.T, ssr);
      double v = draw_inv_gamma(rng, c.shape, c.scale);
      std::fill(s.params.sigma2.begin(), s.params.sigma2.end(), v);
    }
  }

  NormalConditional gamma_conditional(const SamplerState& s) const {
    Eigen::MatrixXd P = gamma_prec_;
    Eigen::VectorXd b = gamma_prec_ * h_.mu_gamma;
    for (std::size_t i = 0; i < D_.N; ++i) {
      auto k = static_cast<std::size_t>(s.partition[i]);
      double w = 1.0 / s.params.sigma2[k];
      P += w * D_.ZtZ[i];
      b += w * (D_.Z[i].transpose() * D_.yi(i) - D_.ZtX[i] * s.params.alpha[k]);
    }
    Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success) throw SingularPrecision("gamma posterior precision failed Cholesky");
    return {llt.solve(b), P};
  }

  void update_gamma(SamplerState& s, Rng& rng) {
    if (D_.q == 0) return;
    s.common.gamma = detail::draw_mvn_precision(gamma_conditional(s), rng);
    refresh_residuals(s);
  }

  // xi_k ~ Beta(|B_k| + 1, a + #{j : g_j > k}) for k <= K^a
  void update_sticks(SamplerState& s, Rng& rng) const {
    auto cnt = s.partition.counts();
    std::size_t above = D_.N;
    s.sticks.clear();
    for (std::size_t k = 0; k < cnt.size(); ++k) {
      above -= cnt[k];
      s.sticks.push(draw_beta(rng, static_cast<double>(cnt[k]) + 1.0, s.a + static_cast<double>(above)));
    }
  }

  void update_slice(SamplerState& s, Rng& rng) const {
    auto& sl = s.slice;
    sl.u.resize(D_.N);
    sl.u_star = 1.0;
    for (std::size_t i = 0; i < D_.N; ++i) {
      double v;
      do v = draw_uniform(rng);
      while (v == 0.0);
      sl.u[i] = v * s.sticks.pi[static_cast<std::size_t>(s.partition[i])];
      sl.u_star = std::min(sl.u_star, sl.u[i]);
    }
    sl.k_star = find_k_star(s);
  }

  // smallest K with 1 - sum_{j<=K} pi_j < u*; sticks.size() + 1 when more sticks are needed
  static std::size_t find_k_star(const SamplerState& s) {
    for (std::size_t k = 0; k < s.sticks.size(); ++k)
      if (s.sticks.rest[k] < s.slice.u_star) return k + 1;
    return s.sticks.size() + 1;
  }

  // Escobar-West two-step update given K occupied groups
  static double update_concentration(double a, std::size_t n_units, std::size_t k, const DpHyper& h, Rng& rng,
                                     double* eta_out = nullptr) {
    const double N = static_cast<double>(n_units), K = static_cast<double>(k);
    double eta = draw_beta(rng, a + 1.0, N);
    double rate = h.n - std::log(eta);
    double odds = (h.m + K - 1.0) / (N * rate);
    double pa = odds / (1.0 + odds);
    double shape = draw_uniform(rng) < pa ? h.m + K : h.m + K - 1.0;
    if (eta_out) *eta_out = eta;
    double out = draw_gamma(rng, shape, rate);
    return out > 0.0 ? out : std::numeric_limits<double>::min();
  }

  void spawn_potential_groups(SamplerState& s, Rng& rng) const {
    const std::size_t cap = set_.max_groups;
    while (s.sticks.leftover() >= s.slice.u_star && (cap == 0 || s.sticks.size() < cap)) {
      s.sticks.push(draw_beta(rng, 1.0, s.a));
      s.params.alpha.push_back(detail::draw_mvn_cov(h_.mu_alpha, h_.sigma_alpha, rng));
      if (D_.heteroskedastic || s.params.sigma2.empty())
        s.params.sigma2.push_back(draw_inv_gamma(rng, h_.nu_sigma / 2.0, h_.delta_sigma / 2.0));
      else
        s.params.sigma2.push_back(s.params.sigma2.front());
    }
    s.slice.k_star = s.sticks.size();
  }

  // Proposition A.1: K^a <= K* and the leftover mass beyond K* sits below u*
  static bool slice_invariants_hold(const SamplerState& s) {
    const std::size_t ks = s.slice.k_star;
    if (ks == 0 || ks > s.sticks.size()) return false;
    if (static_cast<std::size_t>(s.partition.n_labels()) > ks) return false;
    if (!(s.sticks.rest[ks - 1] < s.slice.u_star)) return false;
    for (std::size_t i = 0; i < s.slice.u.size(); ++i)
      if (!(s.slice.u[i] <= s.sticks.pi[static_cast<std::size_t>(s.partition[i])])) return false;
    return true;
  }

  void update_partition(SamplerState& s, Rng& rng) {
    const std::size_t K = s.slice.k_star;
    const double c = cs_.strength() * c_scale_;
    std::vector<double> logw(K), ll(K);
    std::vector<std::size_t> idx(K);
    std::vector<double> tilt(K);
    std::vector<double> log_sig(K);
    for (std::size_t k = 0; k < K; ++k) log_sig[k] = std::log(s.params.sigma2[k]);
    const double T = static_cast<double>(D_.T);
    for (std::size_t i = 0; i < D_.N; ++i) {
      const double ui = s.slice.u[i];
      std::size_t m = 0;
      if (constrained_) {
        std::fill(tilt.begin(), tilt.end(), 0.0);
        for (const auto& e : cs_.neighbors(i)) {
          if (e.w == 0.0) continue;
          tilt[static_cast<std::size_t>(s.partition[e.j])] += 2.0 * pair_term(c, e.w);
        }
      }
      for (std::size_t k = 0; k < K; ++k) {
        if (!(ui < s.sticks.pi[k])) continue;
        double ssr = unit_ssr(D_, i, ytil_[i], s.params.alpha[k]);
        double v = -0.5 * (T * log_sig[k] + ssr / s.params.sigma2[k]);
        if (constrained_) v += tilt[k];
        logw[m] = v;
        idx[m] = k;
        ++m;
      }
      if (m == 0) throw AllZeroMass("unit " + std::to_string(i) + " has no admissible group");
      std::vector<double> lw(logw.begin(), logw.begin() + static_cast<std::ptrdiff_t>(m));
      s.partition.set(i, static_cast<int>(idx[detail::draw_index(lw, rng)]));
    }
    s.slice.k_active = static_cast<std::size_t>(s.partition.n_labels());
  }

  double total_loglik(const SamplerState& s) const {
    double ll = 0.0;
    for (std::size_t i = 0; i < D_.N; ++i) {
      auto k = static_cast<std::size_t>(s.partition[i]);
      ll += unit_loglik(D_, i, ytil_[i], s.params.alpha[k], s.params.sigma2[k]);
    }
    return ll;
  }

  // one full sweep in the order K^a, alpha, sigma2, gamma, sticks, u, a, spawn, G
  void sweep(SamplerState& s, Rng& rng) {
    trim_to_active(s);
    update_alpha(s, rng);
    update_sigma2(s, rng);
    update_gamma(s, rng);
    if (set_.fixed_partition) return;
    update_sticks(s, rng);
    update_slice(s, rng);
    if (set_.sample_concentration)
      s.a = update_concentration(s.a, D_.N, s.partition.n_groups(), h_, rng, &s.slice.eta);
    spawn_potential_groups(s, rng);
    if (!slice_invariants_hold(s)) ++violations_;
    max_k_star_ = std::max(max_k_star_, s.slice.k_star);
    update_partition(s, rng);
  }

  Draw record(const SamplerState& s, std::size_t iter) const {
    Draw d;
    d.iteration = iter;
    d.k_active = static_cast<std::size_t>(s.partition.n_labels());
    d.k_star = s.slice.k_star;
    d.a = s.a;
    d.loglik = total_loglik(s);
    d.gamma = s.common.gamma;
    auto map = s.partition.relabel_map();
    std::size_t K = 0;
    for (int v : map) K += v >= 0;
    d.n_groups = K;
    d.alpha.resize(K);
    d.sigma2.resize(K);
    for (std::size_t k = 0; k < map.size(); ++k)
      if (map[k] >= 0) {
        d.alpha[static_cast<std::size_t>(map[k])] = s.params.alpha[k];
        d.sigma2[static_cast<std::size_t>(map[k])] = s.params.sigma2[k];
      }
    d.g.resize(D_.N);
    for (std::size_t i = 0; i < D_.N; ++i) d.g[i] = map[static_cast<std::size_t>(s.partition[i])];
    return d;
  }

  PosteriorChain run(Rng& rng) {
    PosteriorChain chain;
    chain.N = D_.N;
    chain.p = D_.p;
    chain.q = D_.q;
    chain.heteroskedastic = D_.heteroskedastic;
    SamplerState s = initial_state(rng);
    refresh_residuals(s);
    const std::size_t thin = std::max<std::size_t>(1, set_.thin);
    const std::size_t total = set_.n_burn + set_.n_keep * thin;
    chain.draws.reserve(set_.n_keep);
    const auto ramp = static_cast<std::size_t>(set_.strength_ramp * static_cast<double>(set_.n_burn));
    for (std::size_t it = 1; it <= total; ++it) {
      c_scale_ = it < ramp ? static_cast<double>(it) / static_cast<double>(ramp) : 1.0;
      sweep(s, rng);
      if (it > set_.n_burn && (it - set_.n_burn) % thin == 0) chain.draws.push_back(record(s, it));
    }
    chain.iterations = total;
    chain.slice_violations = violations_;
    chain.max_k_star = max_k_star_;
    last_ = std::move(s);
    return chain;
  }

  const SamplerState& last_state() const { return last_; }
  std::size_t slice_violations() const { return violations_; }
  const Design& design() const { return D_; }
  const DpHyper& hyper() const { return h_; }

 private:
  const Design& D_;
  const ConstraintSet& cs_;
  DpHyper h_;
  SamplerSettings set_;
  Eigen::MatrixXd alpha_prec_, gamma_prec_;
  bool constrained_ = false;
  double c_scale_ = 1.0;
  std::vector<Eigen::VectorXd> ytil_;
  std::size_t violations_ = 0;
  std::size_t max_k_star_ = 0;
  SamplerState last_;
};

inline PosteriorChain run_chain(const Design& D, const ConstraintSet& cs, const DpHyper& h,
                                const SamplerSettings& settings, Rng& rng) {
  GibbsSampler g(D, cs, h, settings);
  return g.run(rng);
}

inline PosteriorChain run_chain(const PanelDataset& data, const ModelConfig& cfg, const ConstraintSet& cs,
                                const DpHyper& h, const SamplerSettings& settings, Rng& rng) {
  Design D = Design::build(data, cfg);
  return run_chain(D, cs, h, settings, rng);
}

}  // namespace cbgfe
