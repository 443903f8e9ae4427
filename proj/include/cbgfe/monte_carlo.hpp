#pragma once

#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "constraints.hpp"
#include "dgp.hpp"
#include "error.hpp"
#include "forecast.hpp"
#include "gibbs.hpp"
#include "parallel.hpp"
#include "random.hpp"

namespace cbgfe {

enum class EstimatorKind { Bgfe, Oracle, Pooled, Flat };

// bgfe, bgfe-cstr, oracle, pooled, flat, with optional -he / -ho (e.g. bgfe-he-cstr)
struct EstimatorSpec {
  std::string name;
  EstimatorKind kind = EstimatorKind::Bgfe;
  bool constrained = false;
  std::optional<bool> heteroskedastic;  // unset: DGP default

  static EstimatorSpec parse(const std::string& name) {
    EstimatorSpec s;
    s.name = name;
    auto parts = csv::split(name, '-');
    if (parts.empty()) throw InvalidArgument("empty estimator name");
    if (parts[0] == "bgfe") s.kind = EstimatorKind::Bgfe;
    else if (parts[0] == "oracle") s.kind = EstimatorKind::Oracle;
    else if (parts[0] == "pooled") s.kind = EstimatorKind::Pooled;
    else if (parts[0] == "flat") s.kind = EstimatorKind::Flat;
    else throw InvalidArgument("unknown estimator " + name);
    for (std::size_t k = 1; k < parts.size(); ++k) {
      if (parts[k] == "cstr" && s.kind == EstimatorKind::Bgfe) s.constrained = true;
      else if (parts[k] == "he") s.heteroskedastic = true;
      else if (parts[k] == "ho") s.heteroskedastic = false;
      else throw InvalidArgument("unknown estimator " + name);
    }
    return s;
  }
};

struct McSettings {
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  SamplerSettings sampler;
  double strength = 0.5;
  double fraction = 0.05;  // share of the maximal PL/NL counts sampled as constraints
  double error_rate = 0.0;
  double alpha = 0.05;
  std::size_t threads = 1;
};

struct McRecord {
  std::size_t rep = 0;
  std::string estimator;
  bool ok = true;
  std::string error;
  Eigen::VectorXd gamma_hat;
  Eigen::VectorXd gamma_true;
  Eigen::VectorXd gamma_lower, gamma_upper;
  double avg_k = 0.0;
  double pct_k = 0.0;
  ForecastMetrics forecast;
};

struct McSummary {
  std::string estimator;
  std::size_t n_ok = 0, n_failed = 0;
  Eigen::VectorXd rmse, bias, std, avg_length, coverage;  // per common coefficient
  double rmsfe = 0.0, coverage_f = 0.0, avg_length_f = 0.0, lps = 0.0, crps = 0.0;
  double avg_k = 0.0, pct_k = 0.0;
};

struct McReport {
  DgpConfig dgp;
  std::vector<std::string> estimators;
  std::vector<McRecord> records;  // reps x estimators, row-major
  std::vector<McSummary> summary;
  const McRecord& at(std::size_t rep, std::size_t est) const { return records[rep * estimators.size() + est]; }
};

// Fits one estimator on a simulated panel (last period held out) and evaluates it.
inline McRecord run_estimator(const SimulatedPanel& sim, const EstimatorSpec& spec, const ConstraintSet& cs,
                              const McSettings& st, Rng& rng, bool default_he = false) {
  McRecord rec;
  rec.estimator = spec.name;
  rec.gamma_true = sim.gamma;
  auto [train, hold] = split_holdout(sim.data, 1);
  ModelConfig mc;
  mc.heteroskedastic = spec.heteroskedastic.value_or(default_he);
  Design D = Design::build(train, mc);
  DpHyper h = DpHyper::defaults(D.p, D.q);
  SamplerSettings ss = st.sampler;
  const std::size_t N = D.N;
  ConstraintSet none(N);
  const ConstraintSet* use = &none;
  switch (spec.kind) {
    case EstimatorKind::Bgfe:
      if (spec.constrained) use = &cs;
      break;
    case EstimatorKind::Oracle: ss.fixed_partition = sim.truth; break;
    case EstimatorKind::Pooled: ss.fixed_partition = GroupPartition::one_block(N); break;
    case EstimatorKind::Flat:
      ss.fixed_partition = GroupPartition::singletons(N);
      h.sigma_alpha = 1e6 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(D.p), static_cast<Eigen::Index>(D.p));
      break;
  }
  PosteriorChain ch = run_chain(D, *use, h, ss, rng);
  const auto q = static_cast<Eigen::Index>(D.q);
  rec.gamma_hat = Eigen::VectorXd::Zero(q);
  rec.gamma_lower.resize(q);
  rec.gamma_upper.resize(q);
  for (Eigen::Index c = 0; c < q; ++c) {
    std::vector<double> v;
    for (const auto& d : ch.draws) {
      v.push_back(d.gamma(c));
      rec.gamma_hat(c) += d.gamma(c);
    }
    rec.gamma_hat(c) /= static_cast<double>(v.size());
    auto [lo, hi] = hpdi(v, st.alpha);
    rec.gamma_lower(c) = lo;
    rec.gamma_upper(c) = hi;
  }
  const std::size_t K0 = sim.truth.n_groups();
  for (const auto& d : ch.draws) {
    rec.avg_k += static_cast<double>(d.n_groups);
    rec.pct_k += d.n_groups == K0 ? 1.0 : 0.0;
  }
  rec.avg_k /= static_cast<double>(ch.size());
  rec.pct_k /= static_cast<double>(ch.size());
  ForecastRows rows = forecast_rows(hold, mc, 0);
  Eigen::VectorXd y = hold.y.col(0);
  auto fr = evaluate_forecast(ch, rows, y, st.alpha, rng);
  rec.forecast = *fr.metrics;
  return rec;
}

inline std::vector<McSummary> summarize(const McReport& r) {
  std::vector<McSummary> out;
  for (std::size_t e = 0; e < r.estimators.size(); ++e) {
    McSummary s;
    s.estimator = r.estimators[e];
    std::vector<const McRecord*> ok;
    for (std::size_t k = e; k < r.records.size(); k += r.estimators.size()) {
      if (r.records[k].ok) ok.push_back(&r.records[k]);
      else ++s.n_failed;
    }
    s.n_ok = ok.size();
    if (ok.empty()) {
      out.push_back(s);
      continue;
    }
    const auto q = ok[0]->gamma_true.size();
    const double n = static_cast<double>(ok.size());
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(q);
    s.rmse = s.bias = s.avg_length = s.coverage = Eigen::VectorXd::Zero(q);
    for (auto* rec : ok) {
      Eigen::VectorXd err = rec->gamma_hat - rec->gamma_true;
      s.bias += err;
      s.rmse += err.cwiseAbs2();
      mean += rec->gamma_hat;
      s.avg_length += rec->gamma_upper - rec->gamma_lower;
      for (Eigen::Index c = 0; c < q; ++c)
        s.coverage(c) += (rec->gamma_true(c) >= rec->gamma_lower(c) && rec->gamma_true(c) <= rec->gamma_upper(c)) ? 1.0 : 0.0;
      s.rmsfe += rec->forecast.rmsfe;
      s.coverage_f += rec->forecast.coverage;
      s.avg_length_f += rec->forecast.avg_length;
      s.lps += rec->forecast.lps;
      s.crps += rec->forecast.crps;
      s.avg_k += rec->avg_k;
      s.pct_k += rec->pct_k;
    }
    mean /= n;
    s.std = Eigen::VectorXd::Zero(q);
    for (auto* rec : ok) s.std += (rec->gamma_hat - mean).cwiseAbs2();
    s.std = (s.std / n).cwiseSqrt();
    s.bias /= n;
    s.rmse = (s.rmse / n).cwiseSqrt();
    s.avg_length /= n;
    s.coverage /= n;
    s.rmsfe /= n;
    s.coverage_f /= n;
    s.avg_length_f /= n;
    s.lps /= n;
    s.crps /= n;
    s.avg_k /= n;
    s.pct_k /= n;
    out.push_back(s);
  }
  return out;
}

// Replication r uses master stream derive_seed(seed, r): DGP draw, constraint draw, then one stream per estimator.
inline McReport run_monte_carlo(const DgpConfig& dgp, const std::vector<std::string>& estimators, const McSettings& st) {
  if (st.reps < 1) throw InvalidArgument("need at least one replication");
  if (estimators.empty()) throw InvalidArgument("no estimators requested");
  std::vector<EstimatorSpec> specs;
  for (const auto& e : estimators) specs.push_back(EstimatorSpec::parse(e));
  McReport rep;
  rep.dgp = dgp;
  rep.estimators = estimators;
  rep.records.resize(st.reps * specs.size());
  parallel_for(st.reps, st.threads, [&](std::size_t r) {
    const std::uint64_t s = derive_seed(st.seed, r);
    Rng g = make_rng(s, 0);
    SimulatedPanel sim = generate_dgp(dgp, g);
    Rng gc = make_rng(s, 1);
    ConstraintSet cs = generate_constraints(sim.truth, st.fraction, st.error_rate, gc, st.strength);
    for (std::size_t e = 0; e < specs.size(); ++e) {
      Rng ge = make_rng(s, 2 + e);
      McRecord rec;
      try {
        rec = run_estimator(sim, specs[e], cs, st, ge, dgp.dgp_id == 3);
      } catch (const std::exception& ex) {
        rec.ok = false;
        rec.error = ex.what();
        rec.estimator = specs[e].name;
      }
      rec.rep = r;
      rep.records[r * specs.size() + e] = std::move(rec);
    }
  });
  rep.summary = summarize(rep);
  return rep;
}

}  // namespace cbgfe
