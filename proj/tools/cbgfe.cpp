#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "cbgfe/cbgfe.hpp"

namespace fs = std::filesystem;
using namespace cbgfe;

namespace {

struct DataOpts {
  std::string panel;
  std::string unit = "unit", period = "period", y = "y";
  std::vector<std::string> x_cols, z_cols, common;
  bool make_lag = false;
  std::string variance = "he";
};

struct ChainOpts {
  std::string constraints;
  double c = 0.5;
  std::vector<double> c_grid;
  std::size_t burn = 5000, keep = 5000, thin = 1;
  std::uint64_t seed = 1;
  double a_shape = 0.4, a_rate = 10.0, nu = 12.0, delta = 10.0;
  std::string out = ".";
};

struct Loaded {
  PanelDataset data;
  ModelConfig model;
};

void add_data_options(CLI::App* cmd, DataOpts& o, bool need_panel = true) {
  auto* p = cmd->add_option("--panel", o.panel, "Panel CSV in long format");
  if (need_panel) p->required();
  cmd->add_option("--unit-col", o.unit, "Unit column")->capture_default_str();
  cmd->add_option("--period-col", o.period, "Period column")->capture_default_str();
  cmd->add_option("--y-col", o.y, "Outcome column")->capture_default_str();
  cmd->add_option("--x", o.x_cols, "Regressor columns (default: x*)")->delimiter(',');
  cmd->add_option("--z", o.z_cols, "Common regressor columns (default: z*)")->delimiter(',');
  cmd->add_option("--common", o.common, "x columns whose slopes are shared across groups")->delimiter(',');
  cmd->add_flag("--make-lag", o.make_lag, "Append the lagged outcome as a common regressor");
  cmd->add_option("--variance", o.variance, "Error variance: he (per group) or ho (common)")
      ->check(CLI::IsMember({"he", "ho"}))
      ->capture_default_str();
}

void add_chain_options(CLI::App* cmd, ChainOpts& o) {
  cmd->add_option("--constraints", o.constraints, "Constraint CSV (i,j,type,psi)");
  cmd->add_option("--c", o.c, "Constraint strength")->capture_default_str();
  cmd->add_option("--c-grid", o.c_grid, "Strength grid; c is chosen by marginal data density")->delimiter(',');
  cmd->add_option("--burn", o.burn, "Burn-in sweeps")->capture_default_str();
  cmd->add_option("--keep", o.keep, "Stored draws")->capture_default_str();
  cmd->add_option("--thin", o.thin, "Thinning interval")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--a-shape", o.a_shape, "Gamma shape of the concentration prior")->capture_default_str();
  cmd->add_option("--a-rate", o.a_rate, "Gamma rate of the concentration prior")->capture_default_str();
  cmd->add_option("--nu", o.nu, "Inverse-gamma nu for sigma^2")->capture_default_str();
  cmd->add_option("--delta", o.delta, "Inverse-gamma delta for sigma^2")->capture_default_str();
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
}

ModelConfig model_config(const PanelDataset& d, const DataOpts& o) {
  ModelConfig mc;
  mc.heteroskedastic = o.variance == "he";
  std::set<std::string> common(o.common.begin(), o.common.end());
  for (const auto& n : common)
    if (std::find(d.x_names.begin(), d.x_names.end(), n) == d.x_names.end())
      throw InvalidArgument("--common names unknown x column '" + n + "'");
  if (!common.empty())
    for (const auto& n : d.x_names) mc.group_slopes.push_back(!common.count(n));
  return mc;
}

PanelSchema schema(const DataOpts& o) {
  PanelSchema s;
  s.unit = o.unit;
  s.period = o.period;
  s.y = o.y;
  s.x_cols = o.x_cols;
  s.z_cols = o.z_cols;
  return s;
}

// loads a panel whose outcome column may be absent (future covariates); missing outcomes become NaN
PanelDataset load_optional_y(const std::string& path, const PanelSchema& sc) {
  std::ifstream in(path);
  if (!in) throw IoError("panel not found: " + path);
  csv::Table t = csv::parse(in);
  if (t.column(sc.y)) {
    std::ifstream again(path);
    return load_panel(again, sc);
  }
  std::ostringstream os;
  auto head = t.header;
  head.push_back(sc.y);
  csv::write_row(os, head);
  for (auto row : t.rows) {
    row.push_back("nan");
    csv::write_row(os, row);
  }
  std::istringstream is(os.str());
  return load_panel(is, sc);
}

std::vector<std::string> common_names(const PanelDataset& d, const ModelConfig& mc) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < d.p(); ++c)
    if (!mc.group_specific(c)) out.push_back(d.x_names[c]);
  out.insert(out.end(), d.z_names.begin(), d.z_names.end());
  return out;
}

std::vector<std::string> group_names(const PanelDataset& d, const ModelConfig& mc) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < d.p(); ++c)
    if (mc.group_specific(c)) out.push_back(d.x_names[c]);
  return out;
}

DpHyper hyper(const Design& D, const ChainOpts& o) {
  DpHyper h = DpHyper::defaults(D.p, D.q);
  h.m = o.a_shape;
  h.n = o.a_rate;
  h.a = h.m / h.n;
  h.nu_sigma = o.nu;
  h.delta_sigma = o.delta;
  h.validate();
  return h;
}

struct RunContext {
  std::string snapshot;
  std::string hash;
  std::size_t threads = 1;
};

void write_json(const fs::path& p, const json& j) { write_text(p.string(), j.dump(2) + "\n"); }

// Runs the sampler (or the c grid) and writes chain, PSM, partition and summary artifacts.
PosteriorChain estimate_and_write(const PanelDataset& d, const ModelConfig& mc, const ChainOpts& o, const RunContext& ctx) {
  fs::path out(o.out);
  fs::create_directories(out);
  Design D = Design::build(d, mc);
  DpHyper h = hyper(D, o);
  ConstraintSet cs = o.constraints.empty() ? ConstraintSet(D.N, o.c) : read_constraints(o.constraints, d.unit_ids, o.c);
  SamplerSettings st;
  st.n_burn = o.burn;
  st.n_keep = o.keep;
  st.thin = o.thin;
  if (o.keep == 0) throw InvalidArgument("--keep must be positive");
  PosteriorChain chain;
  if (!o.c_grid.empty()) {
    SelectOptions so;
    so.threads = ctx.threads;
    so.keep_chains = true;
    MddResult r = select_c(D, cs, h, o.c_grid, st, o.seed, so);
    chain = std::move(r.chains[r.best]);
    write_json(out / "mdd.json", mdd_json(r));
    std::cerr << "c* = " << csv::fmt(r.c_star) << "\n";
  } else {
    Rng rng = make_rng(o.seed, 0);
    chain = run_chain(D, cs, h, st, rng);
  }
  auto gnames = common_names(d, mc);
  {
    std::ofstream f(out / "chain.csv", std::ios::binary);
    if (!f) throw IoError("cannot write " + (out / "chain.csv").string());
    write_chain_csv(f, chain, d.unit_ids, gnames);
  }
  ChainMeta meta;
  meta.seed = o.seed;
  meta.config_hash = ctx.hash;
  meta.settings = st;
  meta.gamma_names = gnames;
  meta.alpha_names = group_names(d, mc);
  write_json(out / "chain.json", chain_sidecar(chain, meta));
  Eigen::MatrixXd psm = compute_psm(chain);
  {
    std::ofstream f(out / "psm.csv", std::ios::binary);
    write_psm_csv(f, psm, d.unit_ids);
  }
  auto est = point_estimate_partition(chain, psm);
  write_json(out / "partition.json", partition_json(est, d.unit_ids));
  write_json(out / "posterior-summary.json", posterior_summary_json(chain, gnames));
  if (chain.slice_violations) std::cerr << "warning: " << chain.slice_violations << " slice-invariant violations\n";
  return chain;
}

Loaded load_training(const DataOpts& o) {
  Loaded L;
  L.data = load_panel(o.panel, schema(o));
  if (o.make_lag) L.data = make_lag(L.data);
  L.model = model_config(L.data, o);
  return L;
}

int exit_code(const Error& e) {
  static const std::set<std::string> runtime = {"SingularPrecision", "AllZeroMass", "CollinearDesign"};
  return runtime.count(e.kind()) ? 1 : 2;
}

void write_snapshot(const std::string& dir, const RunContext& ctx) {
  fs::create_directories(dir);
  write_text((fs::path(dir) / "config.toml").string(), ctx.snapshot);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian grouped fixed-effects panel estimation with pairwise constraints"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML configuration file");
  std::size_t threads = default_threads();
  app.add_option("--threads", threads, "Worker threads")->capture_default_str();

  DataOpts data;
  ChainOpts chain;

  auto* est = app.add_subcommand("estimate", "Run the Gibbs sampler and write chain, PSM and partition");
  add_data_options(est, data);
  add_chain_options(est, chain);

  DataOpts fdata;
  ChainOpts fchain;
  std::string future, chain_in;
  std::size_t horizon = 1;
  double alpha = 0.05;
  auto* fc = app.add_subcommand("forecast", "One-step-ahead predictive density and scores");
  add_data_options(fc, fdata);
  add_chain_options(fc, fchain);
  fc->add_option("--future", future, "CSV with next-period covariates (y optional); default holds out the last period");
  fc->add_option("--chain", chain_in, "Reuse an existing chain.csv instead of sampling");
  fc->add_option("--horizon", horizon, "Forecast horizon (only 1 is supported)")->capture_default_str();
  fc->add_option("--alpha", alpha, "HPDI level is 1 - alpha")->capture_default_str();

  int dgp = 1;
  std::size_t reps = 20;
  std::uint64_t sim_seed = 1;
  std::vector<std::string> estimators = {"bgfe", "bgfe-cstr", "oracle", "pooled", "flat"};
  std::string sim_out = "simulation";
  std::size_t sim_burn = 5000, sim_keep = 5000, sim_n = 200, sim_t = 11;
  double sim_c = 0.5, fraction = 0.05, error_rate = 0.0;
  bool panel_only = false;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo study on the built-in data generating processes");
  sim->add_option("--dgp", dgp, "DGP 1, 2 or 3")->check(CLI::Range(1, 3))->capture_default_str();
  sim->add_option("--reps", reps, "Replications")->capture_default_str();
  sim->add_option("--seed", sim_seed, "Master seed")->capture_default_str();
  sim->add_option("--estimators", estimators, "bgfe, bgfe-cstr, oracle, pooled, flat (optionally -he/-ho)")->delimiter(',');
  sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
  sim->add_option("--burn", sim_burn, "Burn-in sweeps")->capture_default_str();
  sim->add_option("--keep", sim_keep, "Stored draws")->capture_default_str();
  sim->add_option("--n", sim_n, "Units")->capture_default_str();
  sim->add_option("--t", sim_t, "Periods including the holdout")->capture_default_str();
  sim->add_option("--c", sim_c, "Constraint strength")->capture_default_str();
  sim->add_option("--fraction", fraction, "Share of all true PL/NL pairs given as constraints")->capture_default_str();
  sim->add_option("--error-rate", error_rate, "Share of constraints flipped")->capture_default_str();
  sim->add_flag("--panel-only", panel_only, "Write one simulated panel, truth and constraints, then stop");

  DataOpts sdata;
  std::string s_constraints, s_out = ".";
  std::size_t k = 2;
  KmeansConfig kc;
  std::uint64_t s_seed = 1;
  auto* spc = app.add_subcommand("spc-gfe", "Constrained grouped fixed effects by alternating assignment and OLS");
  add_data_options(spc, sdata);
  spc->add_option("--constraints", s_constraints, "Constraint CSV (i,j,type,psi)");
  spc->add_option("--k", k, "Number of groups")->required();
  spc->add_option("--c", kc.c, "Scale on violation costs |W_ij|")->capture_default_str();
  spc->add_option("--restarts", kc.restarts, "Random restarts")->capture_default_str();
  spc->add_option("--max-iter", kc.max_iter, "Iterations per restart")->capture_default_str();
  spc->add_option("--seed", s_seed, "Random seed")->capture_default_str();
  spc->add_option("--out", s_out, "Output directory")->capture_default_str();

  DataOpts pdata;
  std::string pregroup_file, p_out;
  double psi_pl = 0.65, psi_nl = 0.55;
  auto* pre = app.add_subcommand("pregroup", "Turn a preliminary grouping into soft pairwise constraints");
  add_data_options(pre, pdata);
  pre->add_option("--pregroup", pregroup_file, "CSV unit,prior_group")->required();
  pre->add_option("--psi-pl", psi_pl, "Accuracy of same-group links")->capture_default_str();
  pre->add_option("--psi-nl", psi_nl, "Accuracy of cross-group links")->capture_default_str();
  pre->add_option("--out", p_out, "Constraint CSV to write")->required();

  std::string psm_chain, psm_out;
  auto* psmc = app.add_subcommand("psm", "Posterior similarity matrix from a chain");
  psmc->add_option("--chain", psm_chain, "chain.csv")->required();
  psmc->add_option("--out", psm_out, "psm.csv to write")->required();

  std::string part_chain, part_psm, part_out;
  auto* part = app.add_subcommand("partition", "Point estimate of the group partition");
  part->add_option("--chain", part_chain, "chain.csv")->required();
  part->add_option("--psm", part_psm, "psm.csv (computed from the chain when omitted)");
  part->add_option("--out", part_out, "partition.json to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  RunContext ctx;
  ctx.threads = std::max<std::size_t>(1, threads);
  {
    const CLI::App* sel = app.get_subcommands().front();
    std::string body;
    {
      // unset options (empty lists and paths) are left out so the snapshot reads back cleanly
      std::istringstream is(sel->config_to_str(true, false));
      std::string line;
      while (std::getline(is, line))
        if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) body += line + "\n";
    }
    ctx.snapshot = "threads=" + std::to_string(ctx.threads) + "\n\n[" + sel->get_name() + "]\n" + body;
    // the output location and thread count do not change results
    std::istringstream is(body);
    std::string line, kept;
    while (std::getline(is, line))
      if (line.rfind("out=", 0) != 0) kept += line + "\n";
    ctx.hash = csv::hex64(csv::fnv1a(sel->get_name() + "\n" + kept));
  }

  try {
    if (*est) {
      auto L = load_training(data);
      write_snapshot(chain.out, ctx);
      estimate_and_write(L.data, L.model, chain, ctx);
    } else if (*fc) {
      if (horizon != 1) throw HorizonTooLarge("only one-step-ahead forecasts are supported");
      if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("--alpha must lie in (0, 1)");
      PanelDataset full = load_panel(fdata.panel, schema(fdata));
      PanelDataset train;
      HoldoutSlice hold;
      if (!future.empty()) {
        PanelDataset fut = load_optional_y(future, schema(fdata));
        if (fut.unit_ids != full.unit_ids) throw UnknownUnit("future file units differ from the panel");
        if (fut.n_periods() != 1) throw HorizonTooLarge("future file must hold exactly one period");
        HoldoutSlice h{fut.y, fut.x, fut.z, fut.period_ids};
        full = append_holdout(full, h);
      }
      if (fdata.make_lag) full = make_lag(full);
      std::tie(train, hold) = split_holdout(full, 1);
      ModelConfig mc = model_config(train, fdata);
      fs::create_directories(fchain.out);
      write_snapshot(fchain.out, ctx);
      PosteriorChain ch;
      if (!chain_in.empty()) {
        auto lc = read_chain_csv(chain_in);
        if (lc.unit_ids != train.unit_ids) throw UnknownUnit("chain units differ from the panel");
        ch = std::move(lc.chain);
        ch.heteroskedastic = mc.heteroskedastic;
      } else {
        ch = estimate_and_write(train, mc, fchain, ctx);
      }
      ForecastRows rows = forecast_rows(hold, mc, 0);
      std::optional<Eigen::VectorXd> y;
      Eigen::VectorXd yy = hold.y.col(0);
      if (yy.allFinite()) y = yy;
      Rng rng = make_rng(fchain.seed, 1);
      auto r = evaluate_forecast(ch, rows, y, alpha, rng);
      fs::path out(fchain.out);
      {
        std::ofstream f(out / "forecast.csv", std::ios::binary);
        write_forecast_csv(f, r, train.unit_ids);
      }
      if (r.metrics) write_json(out / "metrics.json", metrics_json(r, train.unit_ids));
      else std::cerr << "no holdout outcomes: metrics omitted\n";
    } else if (*sim) {
      DgpConfig cfg = DgpConfig::preset(dgp);
      cfg.n = sim_n;
      cfg.t = sim_t;
      fs::create_directories(sim_out);
      write_snapshot(sim_out, ctx);
      fs::path out(sim_out);
      if (panel_only) {
        Rng g = make_rng(derive_seed(sim_seed, 0), 0);
        auto s = generate_dgp(cfg, g);
        write_panel((out / "panel.csv").string(), s.data);
        std::ofstream t(out / "truth.csv");
        csv::write_row(t, {"unit", "group"});
        for (std::size_t i = 0; i < s.truth.size(); ++i) csv::write_row(t, {s.data.unit_ids[i], std::to_string(s.truth[i] + 1)});
        Rng gc = make_rng(derive_seed(sim_seed, 0), 1);
        auto cs = generate_constraints(s.truth, fraction, error_rate, gc, sim_c);
        std::ofstream c(out / "constraints.csv");
        write_constraints(c, cs, s.data.unit_ids);
        return 0;
      }
      McSettings st;
      st.reps = reps;
      st.seed = sim_seed;
      st.sampler.n_burn = sim_burn;
      st.sampler.n_keep = sim_keep;
      st.strength = sim_c;
      st.fraction = fraction;
      st.error_rate = error_rate;
      st.threads = ctx.threads;
      auto rep = run_monte_carlo(cfg, estimators, st);
      std::ofstream rf(out / "replications.csv");
      csv::write_row(rf, {"rep", "estimator", "ok", "coef", "estimate", "truth", "lower", "upper", "avg_k", "pct_k", "rmsfe",
                          "coverage", "avg_length", "lps", "crps", "error"});
      for (const auto& r : rep.records) {
        const auto q = r.ok ? r.gamma_hat.size() : 1;
        for (Eigen::Index c = 0; c < q; ++c) {
          auto f = [&](const Eigen::VectorXd& v) { return r.ok ? csv::fmt(v(c)) : std::string(); };
          csv::write_row(rf, {std::to_string(r.rep + 1), r.estimator, r.ok ? "1" : "0", std::to_string(c + 1), f(r.gamma_hat),
                              f(r.gamma_true), f(r.gamma_lower), f(r.gamma_upper), csv::fmt(r.avg_k), csv::fmt(r.pct_k),
                              csv::fmt(r.forecast.rmsfe), csv::fmt(r.forecast.coverage), csv::fmt(r.forecast.avg_length),
                              csv::fmt(r.forecast.lps), csv::fmt(r.forecast.crps), r.error.empty() ? "" : "\"" + r.error + "\""});
        }
      }
      json sj = json::array();
      std::ofstream sf(out / "summary.csv");
      csv::write_row(sf, {"estimator", "n_ok", "n_failed", "coef", "rmse", "bias", "std", "avg_length", "coverage", "rmsfe",
                          "coverage_f", "avg_length_f", "lps", "crps", "avg_k", "pct_k"});
      for (const auto& s : rep.summary) {
        json e = {{"estimator", s.estimator}, {"n_ok", s.n_ok}, {"n_failed", s.n_failed}, {"rmsfe", s.rmsfe},
                  {"coverage_f", s.coverage_f}, {"avg_length_f", s.avg_length_f}, {"lps", s.lps}, {"crps", s.crps},
                  {"avg_k", s.avg_k}, {"pct_k", s.pct_k}};
        json coefs = json::array();
        for (Eigen::Index c = 0; c < s.rmse.size(); ++c) {
          coefs.push_back({{"rmse", s.rmse(c)}, {"bias", s.bias(c)}, {"std", s.std(c)}, {"avg_length", s.avg_length(c)},
                           {"coverage", s.coverage(c)}});
          csv::write_row(sf, {s.estimator, std::to_string(s.n_ok), std::to_string(s.n_failed), std::to_string(c + 1),
                              csv::fmt(s.rmse(c)), csv::fmt(s.bias(c)), csv::fmt(s.std(c)), csv::fmt(s.avg_length(c)),
                              csv::fmt(s.coverage(c)), csv::fmt(s.rmsfe), csv::fmt(s.coverage_f), csv::fmt(s.avg_length_f),
                              csv::fmt(s.lps), csv::fmt(s.crps), csv::fmt(s.avg_k), csv::fmt(s.pct_k)});
        }
        e["coefficients"] = coefs;
        sj.push_back(e);
        if (s.n_failed) std::cerr << s.estimator << ": " << s.n_failed << " replications failed\n";
      }
      write_json(out / "summary.json", json{{"dgp", dgp}, {"reps", reps}, {"seed", sim_seed}, {"estimators", sj}});
    } else if (*spc) {
      auto L = load_training(sdata);
      ConstraintSet cs = s_constraints.empty() ? ConstraintSet(L.data.n_units(), 1.0)
                                               : read_constraints(s_constraints, L.data.unit_ids, 1.0);
      kc.k = k;
      Rng rng = make_rng(s_seed, 0);
      auto r = spc_gfe(L.data, cs, k, kc, rng);
      fs::create_directories(s_out);
      write_snapshot(s_out, ctx);
      json j;
      json th = json::object();
      for (std::size_t c = 0; c < r.regressors.size(); ++c) th[r.regressors[c]] = r.theta(static_cast<Eigen::Index>(c));
      j["theta"] = th;
      json g = json::object();
      for (std::size_t i = 0; i < L.data.n_units(); ++i) g[L.data.unit_ids[i]] = r.groups[i] + 1;
      j["groups"] = g;
      j["objective"] = r.objective;
      j["iterations"] = r.iterations;
      write_json(fs::path(s_out) / "spc-gfe.json", j);
      std::ofstream af(fs::path(s_out) / "alpha.csv");
      std::vector<std::string> head = {"group"};
      head.insert(head.end(), L.data.period_ids.begin(), L.data.period_ids.end());
      csv::write_row(af, head);
      for (Eigen::Index kk = 0; kk < r.alpha.rows(); ++kk) {
        std::vector<std::string> row = {std::to_string(kk + 1)};
        for (Eigen::Index t = 0; t < r.alpha.cols(); ++t) row.push_back(csv::fmt(r.alpha(kk, t)));
        csv::write_row(af, row);
      }
    } else if (*pre) {
      auto d = load_panel(pdata.panel, schema(pdata));
      auto groups = read_pregrouping(pregroup_file, d.unit_ids);
      auto cs = constraints_from_pregrouping(groups, psi_pl, psi_nl);
      if (cs.empty()) std::cerr << "warning: pre-grouping produced no constraints\n";
      std::ofstream f(p_out);
      if (!f) throw IoError("cannot write " + p_out);
      write_constraints(f, cs, d.unit_ids);
    } else if (*psmc) {
      auto lc = read_chain_csv(psm_chain);
      std::ofstream f(psm_out, std::ios::binary);
      if (!f) throw IoError("cannot write " + psm_out);
      write_psm_csv(f, compute_psm(lc.chain), lc.unit_ids);
    } else if (*part) {
      auto lc = read_chain_csv(part_chain);
      Eigen::MatrixXd P;
      if (part_psm.empty()) {
        P = compute_psm(lc.chain);
      } else {
        std::ifstream in(part_psm);
        if (!in) throw IoError("psm not found: " + part_psm);
        std::vector<std::string> ids;
        P = read_psm_csv(in, &ids);
        if (ids != lc.unit_ids) throw UnknownUnit("PSM units differ from the chain");
      }
      write_text(part_out, partition_json(point_estimate_partition(lc.chain, P), lc.unit_ids).dump(2) + "\n");
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
