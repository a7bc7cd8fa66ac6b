#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

namespace gibbs {

// A group element. For lattice groups the payload is the coordinate vector;
// for table-backed groups it is a single index into the loaded element table
// (table files are required to list normal forms in shortlex order, so index
// order is the canonical element order there).
struct Site {
  std::vector<std::int64_t> v;

  Site() = default;
  Site(std::initializer_list<std::int64_t> init) : v(init) {}
  explicit Site(std::vector<std::int64_t> coords) : v(std::move(coords)) {}

  std::size_t dim() const { return v.size(); }

  friend bool operator==(const Site& a, const Site& b) { return a.v == b.v; }
  friend bool operator!=(const Site& a, const Site& b) { return !(a == b); }
  // Canonical total order: by arity first (always equal within one context),
  // then lexicographic on coordinates / table index.
  friend bool operator<(const Site& a, const Site& b) {
    if (a.v.size() != b.v.size()) return a.v.size() < b.v.size();
    return a.v < b.v;
  }
};

std::string to_string(const Site& s);

// A finite, duplicate-free set of sites kept in canonical order. All set
// algebra is by merge on the sorted representation, so results are
// deterministic and iteration order is reproducible.
class SiteSet {
 public:
  SiteSet() = default;
  explicit SiteSet(std::vector<Site> sites);
  SiteSet(std::initializer_list<Site> sites);

  static SiteSet empty() { return SiteSet(); }
  static SiteSet singleton(const Site& s) { return SiteSet({s}); }

  std::size_t size() const { return sites_.size(); }
  bool is_empty() const { return sites_.empty(); }
  bool contains(const Site& s) const;
  // Index of s in canonical order; -1 if absent.
  std::ptrdiff_t index_of(const Site& s) const;

  const Site& operator[](std::size_t i) const { return sites_[i]; }
  auto begin() const { return sites_.begin(); }
  auto end() const { return sites_.end(); }
  const std::vector<Site>& items() const { return sites_; }

  void insert(const Site& s);

  SiteSet set_union(const SiteSet& o) const;
  SiteSet set_intersection(const SiteSet& o) const;
  SiteSet set_difference(const SiteSet& o) const;
  SiteSet set_symmetric_difference(const SiteSet& o) const;
  bool is_subset_of(const SiteSet& o) const;
  bool disjoint_from(const SiteSet& o) const;

  friend bool operator==(const SiteSet& a, const SiteSet& b) {
    return a.sites_ == b.sites_;
  }
  friend bool operator!=(const SiteSet& a, const SiteSet& b) { return !(a == b); }

 private:
  std::vector<Site> sites_;  // sorted, unique
};

std::string to_string(const SiteSet& s);

}  // namespace gibbs
