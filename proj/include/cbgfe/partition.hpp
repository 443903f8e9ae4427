#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "error.hpp"

namespace cbgfe {

// Group labels are 0-based internally; files use 1-based labels.
class GroupPartition {
 public:
  GroupPartition() = default;
  explicit GroupPartition(std::vector<int> labels) : g_(std::move(labels)) {
    for (int v : g_)
      if (v < 0) throw InvalidArgument("group labels must be nonnegative");
  }

  static GroupPartition singletons(std::size_t n) {
    std::vector<int> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = static_cast<int>(i);
    return GroupPartition(std::move(g));
  }
  static GroupPartition one_block(std::size_t n) { return GroupPartition(std::vector<int>(n, 0)); }

  std::size_t size() const { return g_.size(); }
  int operator[](std::size_t i) const { return g_[i]; }
  const std::vector<int>& labels() const { return g_; }
  void set(std::size_t i, int k) { g_[i] = k; }

  // K^a: one past the largest label in use
  int n_labels() const { return g_.empty() ? 0 : *std::max_element(g_.begin(), g_.end()) + 1; }

  // counts per label 0..n_labels()-1, empty labels included
  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> c(static_cast<std::size_t>(n_labels()), 0);
    for (int v : g_) ++c[static_cast<std::size_t>(v)];
    return c;
  }

  std::size_t n_groups() const {
    auto c = counts();
    return static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](std::size_t v) { return v > 0; }));
  }

  // nonempty blocks in first-appearance order
  std::vector<std::vector<std::size_t>> blocks() const {
    auto c = canonical();
    std::vector<std::vector<std::size_t>> b(static_cast<std::size_t>(c.n_labels()));
    for (std::size_t i = 0; i < g_.size(); ++i) b[static_cast<std::size_t>(c.g_[i])].push_back(i);
    return b;
  }

  // relabel by order of first appearance: 0,1,2,...
  GroupPartition canonical() const { return GroupPartition(canonical_map(), 0); }

  // old label -> canonical label (-1 for unused labels)
  std::vector<int> relabel_map() const {
    std::vector<int> m(static_cast<std::size_t>(n_labels()), -1);
    int next = 0;
    for (int v : g_)
      if (m[static_cast<std::size_t>(v)] < 0) m[static_cast<std::size_t>(v)] = next++;
    return m;
  }

  bool same_partition(const GroupPartition& o) const { return canonical().g_ == o.canonical().g_; }
  bool operator==(const GroupPartition& o) const { return g_ == o.g_; }

 private:
  GroupPartition(std::vector<int> g, int) : g_(std::move(g)) {}
  std::vector<int> canonical_map() const {
    auto m = relabel_map();
    std::vector<int> out(g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i) out[i] = m[static_cast<std::size_t>(g_[i])];
    return out;
  }

  std::vector<int> g_;
};

}  // namespace cbgfe
