#pragma once

#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

namespace onn {

// Disjoint-set forest with union by size and path halving. The root of
// every set is its minimum element when `unite_min_root` is used, which the
// persistence code relies on for elder-rule tie breaking.
class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1), sets_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t i) {
    while (parent_[i] != i) {
      parent_[i] = parent_[parent_[i]];
      i = parent_[i];
    }
    return i;
  }

  // Returns false when i and j were already in the same set.
  bool unite(std::size_t i, std::size_t j) {
    i = find(i);
    j = find(j);
    if (i == j) return false;
    if (size_[i] < size_[j]) std::swap(i, j);
    parent_[j] = i;
    size_[i] += size_[j];
    --sets_;
    return true;
  }

  // Same as unite but the surviving root is the smaller index.
  bool unite_min_root(std::size_t i, std::size_t j) {
    i = find(i);
    j = find(j);
    if (i == j) return false;
    if (j < i) std::swap(i, j);
    parent_[j] = i;
    size_[i] += size_[j];
    --sets_;
    return true;
  }

  bool connected(std::size_t i, std::size_t j) { return find(i) == find(j); }
  std::size_t set_count() const noexcept { return sets_; }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t sets_;
};

}  // namespace onn
