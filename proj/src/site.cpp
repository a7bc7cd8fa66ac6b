#include "gibbs/site.hpp"

#include <sstream>

namespace gibbs {

std::string to_string(const Site& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.v.size(); ++i) {
    if (i) os << ",";
    os << s.v[i];
  }
  os << ")";
  return os.str();
}

SiteSet::SiteSet(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
  sites_.erase(std::unique(sites_.begin(), sites_.end()), sites_.end());
}

SiteSet::SiteSet(std::initializer_list<Site> sites)
    : SiteSet(std::vector<Site>(sites)) {}

bool SiteSet::contains(const Site& s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

std::ptrdiff_t SiteSet::index_of(const Site& s) const {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) return -1;
  return it - sites_.begin();
}

void SiteSet::insert(const Site& s) {
  auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it != sites_.end() && *it == s) return;
  sites_.insert(it, s);
}

SiteSet SiteSet::set_union(const SiteSet& o) const {
  SiteSet out;
  out.sites_.reserve(sites_.size() + o.sites_.size());
  std::set_union(sites_.begin(), sites_.end(), o.sites_.begin(), o.sites_.end(),
                 std::back_inserter(out.sites_));
  return out;
}

SiteSet SiteSet::set_intersection(const SiteSet& o) const {
  SiteSet out;
  std::set_intersection(sites_.begin(), sites_.end(), o.sites_.begin(),
                        o.sites_.end(), std::back_inserter(out.sites_));
  return out;
}

SiteSet SiteSet::set_difference(const SiteSet& o) const {
  SiteSet out;
  std::set_difference(sites_.begin(), sites_.end(), o.sites_.begin(),
                      o.sites_.end(), std::back_inserter(out.sites_));
  return out;
}

SiteSet SiteSet::set_symmetric_difference(const SiteSet& o) const {
  SiteSet out;
  std::set_symmetric_difference(sites_.begin(), sites_.end(), o.sites_.begin(),
                                o.sites_.end(), std::back_inserter(out.sites_));
  return out;
}

bool SiteSet::is_subset_of(const SiteSet& o) const {
  return std::includes(o.sites_.begin(), o.sites_.end(), sites_.begin(),
                       sites_.end());
}

bool SiteSet::disjoint_from(const SiteSet& o) const {
  return set_intersection(o).is_empty();
}

std::string to_string(const SiteSet& s) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ", ";
    os << to_string(s[i]);
  }
  os << "}";
  return os.str();
}

}  // namespace gibbs
