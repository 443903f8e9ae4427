#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "csv.hpp"
#include "error.hpp"
#include "forecast.hpp"
#include "gibbs.hpp"
#include "mdd.hpp"
#include "partition_point.hpp"

namespace cbgfe {

using json = nlohmann::ordered_json;

struct ChainMeta {
  std::uint64_t seed = 0;
  std::string config_hash;
  SamplerSettings settings;
  std::vector<std::string> unit_ids;
  std::vector<std::string> gamma_names;
  std::vector<std::string> alpha_names;
};

inline void write_text(const std::string& path, const std::string& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os << s;
  if (!os) throw IoError("write failed: " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> default_ids(std::size_t n, const std::string& prefix = "") {
  std::vector<std::string> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = prefix + std::to_string(i + 1);
  return v;
}

// Wide CSV: one row per stored draw. Group-indexed columns run to the largest K seen; absent groups are blank.
inline void write_chain_csv(std::ostream& os, const PosteriorChain& ch, const std::vector<std::string>& unit_ids,
                            const std::vector<std::string>& gamma_names = {}) {
  if (unit_ids.size() != ch.N) throw LengthMismatch("unit id count differs from chain N");
  std::size_t K = 0;
  for (const auto& d : ch.draws) K = std::max(K, d.n_groups);
  auto gn = gamma_names.empty() ? default_ids(ch.q) : gamma_names;
  std::vector<std::string> head = {"draw", "iteration", "k_active", "k_star", "n_groups", "a", "loglik"};
  for (const auto& u : unit_ids) head.push_back("g_" + u);
  for (const auto& g : gn) head.push_back("gamma_" + g);
  for (std::size_t k = 0; k < K; ++k)
    for (std::size_t c = 0; c < ch.p; ++c) head.push_back("alpha_" + std::to_string(k + 1) + "_" + std::to_string(c + 1));
  for (std::size_t k = 0; k < K; ++k) head.push_back("sigma2_" + std::to_string(k + 1));
  csv::write_row(os, head);
  std::vector<std::string> row;
  for (std::size_t s = 0; s < ch.draws.size(); ++s) {
    const Draw& d = ch.draws[s];
    row.clear();
    row.push_back(std::to_string(s + 1));
    row.push_back(std::to_string(d.iteration));
    row.push_back(std::to_string(d.k_active));
    row.push_back(std::to_string(d.k_star));
    row.push_back(std::to_string(d.n_groups));
    row.push_back(csv::fmt(d.a));
    row.push_back(csv::fmt(d.loglik));
    for (int g : d.g) row.push_back(std::to_string(g + 1));
    for (Eigen::Index c = 0; c < d.gamma.size(); ++c) row.push_back(csv::fmt(d.gamma(c)));
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t c = 0; c < ch.p; ++c)
        row.push_back(k < d.n_groups ? csv::fmt(d.alpha[k](static_cast<Eigen::Index>(c))) : std::string());
    for (std::size_t k = 0; k < K; ++k) row.push_back(k < d.n_groups ? csv::fmt(d.sigma2[k]) : std::string());
    csv::write_row(os, row);
  }
}

struct LoadedChain {
  PosteriorChain chain;
  std::vector<std::string> unit_ids;
  std::vector<std::string> gamma_names;
};

inline LoadedChain read_chain_csv(std::istream& in) {
  csv::Table t = csv::parse(in);
  LoadedChain out;
  auto& ch = out.chain;
  std::vector<std::size_t> gcol, gamcol;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> acol;
  std::vector<std::size_t> scol;
  std::size_t K = 0;
  auto col = [&](const std::string& n) {
    auto c = t.column(n);
    if (!c) throw NonNumeric("chain file lacks column " + n);
    return *c;
  };
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    const std::string& h = t.header[c];
    if (h.rfind("g_", 0) == 0) {
      gcol.push_back(c);
      out.unit_ids.push_back(h.substr(2));
    } else if (h.rfind("gamma_", 0) == 0) {
      gamcol.push_back(c);
      out.gamma_names.push_back(h.substr(6));
    } else if (h.rfind("alpha_", 0) == 0) {
      auto parts = csv::split(h.substr(6), '_');
      if (parts.size() != 2) throw NonNumeric("bad column " + h);
      auto k = csv::to_integer(parts[0]), j = csv::to_integer(parts[1]);
      if (!k || !j || *k < 1 || *j < 1) throw NonNumeric("bad column " + h);
      acol[{static_cast<std::size_t>(*k - 1), static_cast<std::size_t>(*j - 1)}] = c;
      K = std::max(K, static_cast<std::size_t>(*k));
      ch.p = std::max(ch.p, static_cast<std::size_t>(*j));
    } else if (h.rfind("sigma2_", 0) == 0) {
      scol.push_back(c);
    }
  }
  ch.N = gcol.size();
  ch.q = gamcol.size();
  const std::size_t c_it = col("iteration"), c_ka = col("k_active"), c_ks = col("k_star"), c_ng = col("n_groups"),
                    c_a = col("a"), c_ll = col("loglik");
  auto num = [&](std::size_t r, std::size_t c) {
    auto v = csv::to_double(t.rows[r][c]);
    if (!v) throw NonNumeric("line " + std::to_string(t.line_numbers[r]) + ": non-numeric '" + t.rows[r][c] + "' in " + t.header[c]);
    return *v;
  };
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() != t.header.size()) throw LengthMismatch("line " + std::to_string(t.line_numbers[r]) + ": wrong cell count");
    Draw d;
    d.iteration = static_cast<std::size_t>(num(r, c_it));
    d.k_active = static_cast<std::size_t>(num(r, c_ka));
    d.k_star = static_cast<std::size_t>(num(r, c_ks));
    d.n_groups = static_cast<std::size_t>(num(r, c_ng));
    d.a = num(r, c_a);
    d.loglik = num(r, c_ll);
    for (auto c : gcol) d.g.push_back(static_cast<int>(num(r, c)) - 1);
    d.gamma.resize(static_cast<Eigen::Index>(ch.q));
    for (std::size_t j = 0; j < ch.q; ++j) d.gamma(static_cast<Eigen::Index>(j)) = num(r, gamcol[j]);
    if (d.n_groups > K) throw LengthMismatch("draw has more groups than alpha columns");
    for (std::size_t k = 0; k < d.n_groups; ++k) {
      Eigen::VectorXd a(static_cast<Eigen::Index>(ch.p));
      for (std::size_t j = 0; j < ch.p; ++j) a(static_cast<Eigen::Index>(j)) = num(r, acol.at({k, j}));
      d.alpha.push_back(a);
      d.sigma2.push_back(num(r, scol.at(k)));
    }
    ch.draws.push_back(std::move(d));
  }
  ch.iterations = ch.draws.empty() ? 0 : ch.draws.back().iteration;
  return out;
}

inline LoadedChain read_chain_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("chain not found: " + path);
  return read_chain_csv(in);
}

inline json chain_sidecar(const PosteriorChain& ch, const ChainMeta& m) {
  json j;
  j["seed"] = m.seed;
  j["config_hash"] = m.config_hash;
  j["n_units"] = ch.N;
  j["p"] = ch.p;
  j["q"] = ch.q;
  j["heteroskedastic"] = ch.heteroskedastic;
  j["n_burn"] = m.settings.n_burn;
  j["n_keep"] = m.settings.n_keep;
  j["thin"] = m.settings.thin;
  j["draws"] = ch.draws.size();
  j["slice_violations"] = ch.slice_violations;
  j["max_k_star"] = ch.max_k_star;
  if (!m.alpha_names.empty()) j["alpha_names"] = m.alpha_names;
  if (!m.gamma_names.empty()) j["gamma_names"] = m.gamma_names;
  return j;
}

inline void write_psm_csv(std::ostream& os, const Eigen::MatrixXd& psm, const std::vector<std::string>& ids) {
  if (static_cast<std::size_t>(psm.rows()) != ids.size()) throw LengthMismatch("unit id count differs from PSM size");
  std::vector<std::string> row = {"unit"};
  row.insert(row.end(), ids.begin(), ids.end());
  csv::write_row(os, row);
  for (Eigen::Index i = 0; i < psm.rows(); ++i) {
    row.assign(1, ids[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < psm.cols(); ++j) row.push_back(csv::fmt(psm(i, j)));
    csv::write_row(os, row);
  }
}

inline Eigen::MatrixXd read_psm_csv(std::istream& in, std::vector<std::string>* ids = nullptr) {
  csv::Table t = csv::parse(in);
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  if (t.header.size() != t.rows.size() + 1) throw LengthMismatch("PSM file is not square");
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = t.rows[static_cast<std::size_t>(i)];
    if (r.size() != t.header.size()) throw LengthMismatch("PSM row has wrong cell count");
    if (ids) ids->push_back(r[0]);
    for (Eigen::Index j = 0; j < n; ++j) {
      auto v = csv::to_double(r[static_cast<std::size_t>(j) + 1]);
      if (!v) throw NonNumeric("PSM entry is not numeric");
      m(i, j) = *v;
    }
  }
  return m;
}

inline json partition_json(const PartitionEstimate& est, const std::vector<std::string>& ids) {
  json groups = json::object();
  for (std::size_t i = 0; i < ids.size(); ++i) groups[ids[i]] = est.g_star[i] + 1;
  json j;
  j["groups"] = groups;
  j["n_groups"] = est.g_star.n_groups();
  j["vi_score"] = est.vi_score;
  j["greedy_moves"] = est.greedy_moves;
  return j;
}

inline json posterior_summary_json(const PosteriorChain& ch, const std::vector<std::string>& gamma_names = {},
                                   std::size_t true_k = 0) {
  if (ch.empty()) throw EmptyChain("no draws to summarize");
  const double S = static_cast<double>(ch.size());
  json j;
  j["draws"] = ch.size();
  std::map<std::size_t, std::size_t> kh;
  double a = 0.0, ll = 0.0, k = 0.0;
  for (const auto& d : ch.draws) {
    ++kh[d.n_groups];
    a += d.a;
    ll += d.loglik;
    k += static_cast<double>(d.n_groups);
  }
  j["avg_k"] = k / S;
  json hist = json::object();
  for (auto [kk, n] : kh) hist[std::to_string(kk)] = static_cast<double>(n) / S;
  j["k_distribution"] = hist;
  if (true_k) j["pct_k"] = kh.count(true_k) ? static_cast<double>(kh[true_k]) / S : 0.0;
  j["a_mean"] = a / S;
  j["loglik_mean"] = ll / S;
  json gam = json::array();
  auto gn = gamma_names.empty() ? default_ids(ch.q) : gamma_names;
  for (std::size_t c = 0; c < ch.q; ++c) {
    std::vector<double> v;
    v.reserve(ch.size());
    for (const auto& d : ch.draws) v.push_back(d.gamma(static_cast<Eigen::Index>(c)));
    double m = 0.0;
    for (double x : v) m += x;
    m /= S;
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    auto [lo, hi] = hpdi(v, 0.05);
    gam.push_back({{"name", gn[c]}, {"mean", m}, {"sd", std::sqrt(var / std::max(1.0, S - 1.0))}, {"hpdi_lower", lo}, {"hpdi_upper", hi}});
  }
  j["gamma"] = gam;
  j["slice_violations"] = ch.slice_violations;
  j["max_k_star"] = ch.max_k_star;
  return j;
}

inline void write_forecast_csv(std::ostream& os, const ForecastResult& r, const std::vector<std::string>& ids) {
  csv::write_row(os, {"unit", "point", "lower", "upper"});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto k = static_cast<Eigen::Index>(i);
    csv::write_row(os, {ids[i], csv::fmt(r.point(k)), csv::fmt(r.lower(k)), csv::fmt(r.upper(k))});
  }
}

inline json metrics_json(const ForecastResult& r, const std::vector<std::string>& ids) {
  json j;
  if (!r.metrics) return j;
  j["rmsfe"] = r.metrics->rmsfe;
  j["coverage"] = r.metrics->coverage;
  j["avg_length"] = r.metrics->avg_length;
  j["lps"] = r.metrics->lps;
  j["crps"] = r.metrics->crps;
  json units = json::array();
  for (std::size_t i = 0; i < ids.size(); ++i)
    units.push_back({{"unit", ids[i]}, {"lps", r.unit_lps(static_cast<Eigen::Index>(i))}, {"crps", r.unit_crps(static_cast<Eigen::Index>(i))}});
  j["per_unit"] = units;
  return j;
}

inline json mdd_json(const MddResult& r) {
  json j;
  json grid = json::array();
  for (std::size_t k = 0; k < r.grid.size(); ++k)
    grid.push_back({{"c", r.grid[k]}, {"log_mdd", r.estimates[k].log_mdd}, {"mc_se", r.estimates[k].mc_se}, {"ess", r.estimates[k].ess}});
  j["grid"] = grid;
  j["c_star"] = r.c_star;
  return j;
}

}  // namespace cbgfe
