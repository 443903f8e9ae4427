#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "csv.hpp"
#include "error.hpp"
#include "partition.hpp"
#include "random.hpp"

namespace cbgfe {

enum class LinkType : int { Positive = 1, Negative = -1 };

inline const char* link_name(LinkType t) { return t == LinkType::Positive ? "PL" : "NL"; }

// finite stand-in for a hard constraint
inline constexpr double kHardAccuracy = 1.0 - 1e-6;
// per-pair cap on |2cW| in the log mass
inline constexpr double kPairTermCap = 700.0;

inline double weight_from(int ctype, double psi) {
  if (!(psi >= 0.5 && psi < 1.0))
    throw AccuracyOutOfRange("accuracy " + csv::fmt(psi) + " outside [0.5, 1)");
  if (ctype != 1 && ctype != -1) throw InvalidArgument("constraint type must be +1 or -1");
  return ctype * std::log(psi / (1.0 - psi));
}

inline double weight_from(LinkType t, double psi) { return weight_from(static_cast<int>(t), psi); }

struct PairwiseConstraint {
  std::size_t i = 0;
  std::size_t j = 0;
  LinkType type = LinkType::Positive;
  double accuracy = 0.5;
};

class ConstraintSet {
 public:
  struct Neighbor {
    std::size_t j;
    double w;
  };

  explicit ConstraintSet(std::size_t n_units = 0, double strength = 0.0)
      : n_(n_units), c_(strength), adj_(n_units) {
    if (strength < 0.0) throw InvalidArgument("constraint strength must be nonnegative");
  }

  void add(const PairwiseConstraint& pc) {
    if (pc.i >= n_ || pc.j >= n_) throw UnknownUnit("constraint references a unit outside 0.." + std::to_string(n_));
    if (pc.i == pc.j) throw InvalidArgument("constraint links a unit to itself");
    if (!keys_.insert(key(pc.i, pc.j)).second)
      throw InvalidArgument("duplicate constraint on pair (" + std::to_string(pc.i) + "," + std::to_string(pc.j) + ")");
    double w = weight_from(pc.type, pc.accuracy);
    list_.push_back(pc);
    adj_[pc.i].push_back({pc.j, w});
    adj_[pc.j].push_back({pc.i, w});
  }

  std::size_t n_units() const { return n_; }
  double strength() const { return c_; }
  void set_strength(double c) {
    if (c < 0.0) throw InvalidArgument("constraint strength must be nonnegative");
    c_ = c;
  }
  ConstraintSet with_strength(double c) const {
    ConstraintSet out = *this;
    out.set_strength(c);
    return out;
  }

  // multiplies every weight; used for the small-variance limit where W -> W / sigma^2
  double weight_scale() const { return scale_; }
  ConstraintSet scaled(double factor) const {
    ConstraintSet out = *this;
    out.scale_ *= factor;
    for (auto& nb : out.adj_)
      for (auto& e : nb) e.w *= factor;
    return out;
  }

  const std::vector<PairwiseConstraint>& constraints() const { return list_; }
  const std::vector<Neighbor>& neighbors(std::size_t i) const { return adj_[i]; }
  std::size_t size() const { return list_.size(); }
  bool empty() const { return list_.empty(); }
  std::size_t count(LinkType t) const {
    return static_cast<std::size_t>(
        std::count_if(list_.begin(), list_.end(), [t](const PairwiseConstraint& c) { return c.type == t; }));
  }

  // true when no pair contributes to any partition probability
  bool inactive() const {
    if (c_ == 0.0) return true;
    for (const auto& nb : adj_)
      for (const auto& e : nb)
        if (e.w != 0.0) return false;
    return true;
  }

  double weight(std::size_t i, std::size_t j) const {
    for (const auto& e : adj_[i])
      if (e.j == j) return e.w;
    return 0.0;
  }

  Eigen::MatrixXd dense_weights() const {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      for (const auto& e : adj_[i]) W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.j)) = e.w;
    return W;
  }

 private:
  std::uint64_t key(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(a) * n_ + b;
  }

  std::size_t n_;
  double c_;
  double scale_ = 1.0;
  std::vector<PairwiseConstraint> list_;
  std::vector<std::vector<Neighbor>> adj_;
  std::unordered_set<std::uint64_t> keys_;
};

// 2cW for one ordered pair, clamped
inline double pair_term(double c, double w) {
  return std::clamp(2.0 * c * w, -kPairTermCap, kPairTermCap);
}

// log p(W_i | G) = sum_j 2c W_ij delta_ij, delta = +1 together, -1 apart
inline double log_constraint_term(const ConstraintSet& cs, std::size_t i, const GroupPartition& G) {
  double s = 0.0;
  const double c = cs.strength();
  for (const auto& e : cs.neighbors(i)) {
    double v = pair_term(c, e.w);
    s += G[i] == G[e.j] ? v : -v;
  }
  return s;
}

// prior_groups[i] < 0 marks an unlabeled unit
inline ConstraintSet constraints_from_pregrouping(const std::vector<int>& prior_groups, double psi_pl, double psi_nl,
                                                  double strength = 0.0) {
  weight_from(1, psi_pl);
  weight_from(-1, psi_nl);
  const std::size_t n = prior_groups.size();
  ConstraintSet cs(n, strength);
  for (std::size_t i = 0; i < n; ++i) {
    if (prior_groups[i] < 0) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (prior_groups[j] < 0) continue;
      bool same = prior_groups[i] == prior_groups[j];
      cs.add({i, j, same ? LinkType::Positive : LinkType::Negative, same ? psi_pl : psi_nl});
    }
  }
  return cs;
}

// psi = nu/2 + 1/2 with nu ~ Beta(3,2) for a correct constraint and Beta(2,3) otherwise
inline double draw_accuracy(Rng& rng, bool correct) {
  double nu = correct ? draw_beta(rng, 3.0, 2.0) : draw_beta(rng, 2.0, 3.0);
  return std::min(0.5 * nu + 0.5, kHardAccuracy);
}

// Flips floor(e*N_PL) PL and floor(e*N_NL) NL constraints; flipped ones get an "incorrect" accuracy.
inline ConstraintSet perturb_constraints(const ConstraintSet& cs, double e, Rng& rng) {
  if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("perturbation fraction must lie in [0, 1]");
  std::vector<std::size_t> pl, nl;
  const auto& list = cs.constraints();
  for (std::size_t k = 0; k < list.size(); ++k) (list[k].type == LinkType::Positive ? pl : nl).push_back(k);
  std::vector<char> flip(list.size(), 0);
  auto pick = [&](std::vector<std::size_t>& idx) {
    std::size_t m = static_cast<std::size_t>(std::floor(e * static_cast<double>(idx.size()) + 1e-9));
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < m; ++k) flip[idx[k]] = 1;
  };
  pick(pl);
  pick(nl);
  ConstraintSet out(cs.n_units(), cs.strength());
  for (std::size_t k = 0; k < list.size(); ++k) {
    PairwiseConstraint pc = list[k];
    if (flip[k]) {
      pc.type = pc.type == LinkType::Positive ? LinkType::Negative : LinkType::Positive;
      pc.accuracy = draw_accuracy(rng, false);
    }
    out.add(pc);
  }
  return out.scaled(cs.weight_scale());
}

namespace detail {
inline std::map<std::string, std::size_t> unit_index(const std::vector<std::string>& ids) {
  std::map<std::string, std::size_t> m;
  for (std::size_t i = 0; i < ids.size(); ++i) m[ids[i]] = i;
  return m;
}
}  // namespace detail

// CSV `i,j,type,psi`; i and j are unit labels from the panel
inline ConstraintSet read_constraints(std::istream& in, const std::vector<std::string>& unit_ids, double strength) {
  auto t = csv::parse(in);
  ConstraintSet cs(unit_ids.size(), strength);
  if (t.header.empty()) return cs;
  auto ci = t.column("i"), cj = t.column("j"), ct = t.column("type"), cp = t.column("psi");
  if (!ci || !cj || !ct || !cp) throw InvalidArgument("constraint file needs columns i,j,type,psi");
  auto ix = detail::unit_index(unit_ids);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto find = [&](const std::string& u) {
      auto it = ix.find(u);
      if (it == ix.end()) throw UnknownUnit("constraint file line " + std::to_string(t.line_numbers[r]) + ": unit '" + u + "'");
      return it->second;
    };
    LinkType type;
    if (row[*ct] == "PL" || row[*ct] == "+1" || row[*ct] == "1") type = LinkType::Positive;
    else if (row[*ct] == "NL" || row[*ct] == "-1") type = LinkType::Negative;
    else throw InvalidArgument("constraint type must be PL or NL, got '" + row[*ct] + "'");
    auto psi = csv::to_double(row[*cp]);
    if (!psi) throw NonNumeric("constraint file line " + std::to_string(t.line_numbers[r]) + ": psi '" + row[*cp] + "'");
    cs.add({find(row[*ci]), find(row[*cj]), type, *psi});
  }
  return cs;
}

inline ConstraintSet read_constraints(const std::string& path, const std::vector<std::string>& unit_ids, double strength) {
  std::ifstream in(path);
  if (!in) throw IoError("constraint file not found: " + path);
  return read_constraints(in, unit_ids, strength);
}

inline void write_constraints(std::ostream& os, const ConstraintSet& cs, const std::vector<std::string>& unit_ids) {
  csv::write_row(os, {"i", "j", "type", "psi"});
  for (const auto& c : cs.constraints())
    csv::write_row(os, {unit_ids[c.i], unit_ids[c.j], link_name(c.type), csv::fmt(c.accuracy)});
}

// CSV `unit,prior_group`; units absent from the file get -1
inline std::vector<int> read_pregrouping(std::istream& in, const std::vector<std::string>& unit_ids) {
  auto t = csv::parse(in);
  std::vector<int> out(unit_ids.size(), -1);
  if (t.header.empty()) return out;
  auto cu = t.column("unit"), cg = t.column("prior_group");
  if (!cu || !cg) throw InvalidArgument("pre-grouping file needs columns unit,prior_group");
  auto ix = detail::unit_index(unit_ids);
  std::map<std::string, int> labels;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    auto it = ix.find(row[*cu]);
    if (it == ix.end()) throw UnknownUnit("pre-grouping line " + std::to_string(t.line_numbers[r]) + ": unit '" + row[*cu] + "'");
    auto [lit, fresh] = labels.emplace(row[*cg], static_cast<int>(labels.size()));
    (void)fresh;
    out[it->second] = lit->second;
  }
  return out;
}

inline std::vector<int> read_pregrouping(const std::string& path, const std::vector<std::string>& unit_ids) {
  std::ifstream in(path);
  if (!in) throw IoError("pre-grouping file not found: " + path);
  return read_pregrouping(in, unit_ids);
}

}  // namespace cbgfe
