#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "csv.hpp"
#include "error.hpp"

namespace cbgfe {

// Balanced panel: y is N x T; x[i] is T x p and z[i] is T x q for unit i.
struct PanelDataset {
  Eigen::MatrixXd y;
  std::vector<Eigen::MatrixXd> x;
  std::vector<Eigen::MatrixXd> z;
  std::vector<std::string> unit_ids;
  std::vector<std::string> period_ids;
  std::vector<std::string> x_names;
  std::vector<std::string> z_names;

  std::size_t n_units() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t n_periods() const { return static_cast<std::size_t>(y.cols()); }
  std::size_t p() const { return x_names.size(); }
  std::size_t q() const { return z_names.size(); }
};

// Rows removed by split_holdout: y is N x h, x[i] is h x p, z[i] is h x q.
struct HoldoutSlice {
  Eigen::MatrixXd y;
  std::vector<Eigen::MatrixXd> x;
  std::vector<Eigen::MatrixXd> z;
  std::vector<std::string> period_ids;

  std::size_t horizon() const { return static_cast<std::size_t>(y.cols()); }
};

struct ModelConfig {
  std::vector<bool> group_slopes;  // per x column; empty means all group-specific
  bool heteroskedastic = true;

  bool group_specific(std::size_t col) const { return group_slopes.empty() || group_slopes[col]; }

  void validate(std::size_t p) const {
    if (p == 0) throw InvalidArgument("panel needs at least one x column");
    if (!group_slopes.empty() && group_slopes.size() != p)
      throw DimensionMismatch("group_slopes has " + std::to_string(group_slopes.size()) +
                              " entries for " + std::to_string(p) + " x columns");
    if (!group_slopes.empty() && std::none_of(group_slopes.begin(), group_slopes.end(), [](bool b) { return b; }))
      throw InvalidArgument("at least one x column must be group-specific");
  }
};

// Column mapping for load_panel. Empty x/z lists mean: header columns starting with 'x' / 'z'.
struct PanelSchema {
  std::string unit = "unit";
  std::string period = "period";
  std::string y = "y";
  std::vector<std::string> x_cols;
  std::vector<std::string> z_cols;
};

namespace detail {

// numeric order when every label parses as a number, lexicographic otherwise
inline std::vector<std::string> sorted_labels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  bool numeric = std::all_of(labels.begin(), labels.end(),
                             [](const std::string& s) { return csv::to_double(s).has_value(); });
  if (numeric)
    std::stable_sort(labels.begin(), labels.end(), [](const std::string& a, const std::string& b) {
      return *csv::to_double(a) < *csv::to_double(b);
    });
  return labels;
}

}  // namespace detail

inline PanelDataset load_panel(std::istream& in, const PanelSchema& schema = {}) {
  csv::Table t = csv::parse(in);
  if (t.header.empty() || t.rows.empty()) throw MissingCell("panel has no observations");

  auto need = [&](const std::string& name) {
    auto c = t.column(name);
    if (!c) throw InvalidArgument("panel is missing column '" + name + "'");
    return *c;
  };
  std::size_t cu = need(schema.unit), cp = need(schema.period), cy = need(schema.y);

  std::vector<std::string> xs = schema.x_cols, zs = schema.z_cols;
  if (xs.empty() && zs.empty()) {
    for (const auto& h : t.header) {
      if (h == schema.unit || h == schema.period || h == schema.y) continue;
      if (!h.empty() && (h[0] == 'x' || h[0] == 'X')) xs.push_back(h);
      else if (!h.empty() && (h[0] == 'z' || h[0] == 'Z')) zs.push_back(h);
    }
  }
  std::vector<std::size_t> cx, cz;
  for (const auto& n : xs) cx.push_back(need(n));
  for (const auto& n : zs) cz.push_back(need(n));

  std::vector<std::string> units, periods;
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw InvalidArgument("ragged row in panel file");
    units.push_back(r[cu]);
    periods.push_back(r[cp]);
  }
  units = detail::sorted_labels(std::move(units));
  periods = detail::sorted_labels(std::move(periods));
  std::map<std::string, std::size_t> uix, pix;
  for (std::size_t i = 0; i < units.size(); ++i) uix[units[i]] = i;
  for (std::size_t s = 0; s < periods.size(); ++s) pix[periods[s]] = s;

  const std::size_t N = units.size(), T = periods.size(), p = cx.size(), q = cz.size();
  PanelDataset d;
  d.y = Eigen::MatrixXd::Zero(N, T);
  d.x.assign(N, Eigen::MatrixXd::Zero(T, p));
  d.z.assign(N, Eigen::MatrixXd::Zero(T, q));
  d.unit_ids = units;
  d.period_ids = periods;
  d.x_names = xs;
  d.z_names = zs;

  std::vector<char> seen(N * T, 0);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    std::size_t i = uix[row[cu]], s = pix[row[cp]];
    if (seen[i * T + s])
      throw DuplicateCell("unit=" + row[cu] + ", period=" + row[cp] + " appears more than once");
    seen[i * T + s] = 1;
    auto num = [&](std::size_t c) {
      auto v = csv::to_double(row[c]);
      if (!v)
        throw NonNumeric("line " + std::to_string(t.line_numbers[r]) + ", column '" + t.header[c] +
                         "': '" + row[c] + "'");
      return *v;
    };
    d.y(i, s) = num(cy);
    for (std::size_t k = 0; k < p; ++k) d.x[i](s, k) = num(cx[k]);
    for (std::size_t k = 0; k < q; ++k) d.z[i](s, k) = num(cz[k]);
  }
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t s = 0; s < T; ++s)
      if (!seen[i * T + s])
        throw MissingCell("unit=" + units[i] + ", period=" + periods[s] + " (unbalanced panel at unit " +
                          units[i] + ")");
  return d;
}

inline PanelDataset load_panel(const std::string& path, const PanelSchema& schema = {}) {
  std::ifstream in(path);
  if (!in) throw IoError("panel not found: " + path);
  return load_panel(in, schema);
}

inline void write_panel(std::ostream& os, const PanelDataset& d) {
  std::vector<std::string> head{"unit", "period", "y"};
  head.insert(head.end(), d.x_names.begin(), d.x_names.end());
  head.insert(head.end(), d.z_names.begin(), d.z_names.end());
  csv::write_row(os, head);
  for (std::size_t i = 0; i < d.n_units(); ++i)
    for (std::size_t s = 0; s < d.n_periods(); ++s) {
      std::vector<std::string> row{d.unit_ids[i], d.period_ids[s], csv::fmt(d.y(i, s))};
      for (std::size_t k = 0; k < d.p(); ++k) row.push_back(csv::fmt(d.x[i](s, k)));
      for (std::size_t k = 0; k < d.q(); ++k) row.push_back(csv::fmt(d.z[i](s, k)));
      csv::write_row(os, row);
    }
}

inline void write_panel(const std::string& path, const PanelDataset& d) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_panel(os, d);
}

inline std::pair<PanelDataset, HoldoutSlice> split_holdout(const PanelDataset& d, std::size_t h) {
  const std::size_t T = d.n_periods();
  if (h < 1) throw HorizonTooLarge("holdout horizon must be at least 1");
  if (h + 2 > T)
    throw HorizonTooLarge("horizon " + std::to_string(h) + " leaves fewer than 2 training periods out of " +
                          std::to_string(T));
  const Eigen::Index Tt = static_cast<Eigen::Index>(T - h), H = static_cast<Eigen::Index>(h);
  PanelDataset train = d;
  HoldoutSlice hold;
  train.y = d.y.leftCols(Tt);
  hold.y = d.y.rightCols(H);
  hold.x.resize(d.n_units());
  hold.z.resize(d.n_units());
  for (std::size_t i = 0; i < d.n_units(); ++i) {
    train.x[i] = d.x[i].topRows(Tt);
    train.z[i] = d.z[i].topRows(Tt);
    hold.x[i] = d.x[i].bottomRows(H);
    hold.z[i] = d.z[i].bottomRows(H);
  }
  train.period_ids.assign(d.period_ids.begin(), d.period_ids.begin() + Tt);
  hold.period_ids.assign(d.period_ids.begin() + Tt, d.period_ids.end());
  return {std::move(train), std::move(hold)};
}

inline PanelDataset append_holdout(const PanelDataset& train, const HoldoutSlice& hold) {
  PanelDataset d = train;
  const Eigen::Index T = train.y.cols(), H = hold.y.cols();
  d.y.resize(train.y.rows(), T + H);
  d.y << train.y, hold.y;
  for (std::size_t i = 0; i < d.n_units(); ++i) {
    d.x[i].resize(T + H, train.x[i].cols());
    d.x[i] << train.x[i], hold.x[i];
    d.z[i].resize(T + H, train.z[i].cols());
    d.z[i] << train.z[i], hold.z[i];
  }
  d.period_ids.insert(d.period_ids.end(), hold.period_ids.begin(), hold.period_ids.end());
  return d;
}

// Adds y_{t-1} as a new column (in x or z) and drops the first period, whose lag is unknown.
inline PanelDataset make_lag(const PanelDataset& d, bool as_common = true, const std::string& name = "ylag") {
  const std::size_t T = d.n_periods();
  if (T < 2) throw InvalidArgument("make_lag needs at least 2 periods");
  const Eigen::Index Tn = static_cast<Eigen::Index>(T - 1);
  PanelDataset out = d;
  out.y = d.y.rightCols(Tn);
  out.period_ids.erase(out.period_ids.begin());
  for (std::size_t i = 0; i < d.n_units(); ++i) {
    Eigen::VectorXd lag = d.y.row(i).head(Tn).transpose();
    auto extend = [&](const Eigen::MatrixXd& m) {
      Eigen::MatrixXd r(Tn, m.cols() + 1);
      r << m.bottomRows(Tn), lag;
      return r;
    };
    if (as_common) {
      out.z[i] = extend(d.z[i]);
      out.x[i] = d.x[i].bottomRows(Tn);
    } else {
      out.x[i] = extend(d.x[i]);
      out.z[i] = d.z[i].bottomRows(Tn);
    }
  }
  (as_common ? out.z_names : out.x_names).push_back(name);
  return out;
}

}  // namespace cbgfe
