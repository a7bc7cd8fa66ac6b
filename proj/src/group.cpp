#include "gibbs/group.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gibbs/errors.hpp"

namespace gibbs {

// --- GroupContext -------------------------------------------------------------

const SiteSet& GroupContext::ball(std::int64_t m) const {
  if (m < 0) throw ConfigError("ball radius must be >= 0");
  std::lock_guard<std::mutex> lock(ball_mutex_);
  while (static_cast<std::int64_t>(ball_cache_.size()) <= m) {
    ball_cache_.push_back(compute_ball(static_cast<std::int64_t>(ball_cache_.size())));
  }
  return ball_cache_[static_cast<std::size_t>(m)];
}

SiteSet GroupContext::compute_ball(std::int64_t m) const {
  // Generic BFS fallback; S contains the identity so S^m is the radius-m ball.
  SiteSet current = SiteSet::singleton(identity());
  for (std::int64_t step = 0; step < m; ++step) {
    std::vector<Site> next;
    next.reserve(current.size() * generators().size());
    for (const Site& g : current)
      for (const Site& s : generators()) next.push_back(multiply(s, g));
    current = SiteSet(std::move(next));
  }
  return current;
}

// --- Set calculus ---------------------------------------------------------------

SiteSet product_set(const GroupContext& ctx, const SiteSet& K, const SiteSet& F) {
  std::vector<Site> out;
  out.reserve(K.size() * F.size());
  for (const Site& k : K)
    for (const Site& f : F) out.push_back(ctx.multiply(k, f));
  return SiteSet(std::move(out));
}

SiteSet inverse_set(const GroupContext& ctx, const SiteSet& F) {
  std::vector<Site> out;
  out.reserve(F.size());
  for (const Site& f : F) out.push_back(ctx.inverse(f));
  return SiteSet(std::move(out));
}

SiteSet translate(const GroupContext& ctx, const SiteSet& F, const Site& g) {
  std::vector<Site> out;
  out.reserve(F.size());
  for (const Site& f : F) out.push_back(ctx.multiply(f, g));
  return SiteSet(std::move(out));
}

SiteSet k_interior(const GroupContext& ctx, const SiteSet& K, const SiteSet& F) {
  // K.g subseteq F  <=>  g in intersection over k of k^{-1} F.
  if (K.is_empty()) throw ConfigError("k_interior expects non-empty K");
  bool first = true;
  SiteSet acc;
  for (const Site& k : K) {
    SiteSet shifted = product_set(ctx, SiteSet::singleton(ctx.inverse(k)), F);
    acc = first ? shifted : acc.set_intersection(shifted);
    first = false;
    if (acc.is_empty()) break;
  }
  return acc;
}

bool in_k_exterior(const GroupContext& ctx, const SiteSet& K, const SiteSet& F,
                   const Site& g) {
  for (const Site& k : K)
    if (F.contains(ctx.multiply(k, g))) return false;
  return true;
}

SiteSet k_boundary(const GroupContext& ctx, const SiteSet& K, const SiteSet& F) {
  // Kg meets F  <=>  g in K^{-1} F, so candidates are finite.
  SiteSet candidates = product_set(ctx, inverse_set(ctx, K), F);
  std::vector<Site> out;
  for (const Site& g : candidates) {
    bool meets_f = false, meets_fc = false;
    for (const Site& k : K) {
      if (F.contains(ctx.multiply(k, g)))
        meets_f = true;
      else
        meets_fc = true;
      if (meets_f && meets_fc) break;
    }
    if (meets_f && meets_fc) out.push_back(g);
  }
  return SiteSet(std::move(out));
}

bool is_invariant(const GroupContext& ctx, const SiteSet& K, const SiteSet& F,
                  double delta) {
  if (F.is_empty()) throw ConfigError("is_invariant expects non-empty F");
  SiteSet kf = product_set(ctx, K, F);
  std::size_t sym = kf.set_symmetric_difference(F).size();
  return static_cast<double>(sym) < delta * static_cast<double>(F.size());
}

std::vector<SiteSet> folner_sets(const GroupContext& ctx, std::int64_t n) {
  if (n < 1) throw ConfigError("folner_sets expects n >= 1");
  std::vector<SiteSet> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) out.push_back(ctx.folner_set(i));
  return out;
}

// --- Exhaustion -----------------------------------------------------------------

const SiteSet& Exhaustion::set(std::int64_t m) const {
  if (m < 1) throw ConfigError("exhaustion index must be >= 1");
  return ctx_->ball(m - 1);
}

SiteSet Exhaustion::shell(std::int64_t m) const {
  return set(m + 1).set_difference(set(m));
}

SiteSet Exhaustion::inverse_set_of(std::int64_t m) const {
  return inverse_set(*ctx_, set(m));
}

std::int64_t Exhaustion::cover_index(const SiteSet& F, std::int64_t cap) const {
  for (std::int64_t m = 1; m <= cap; ++m) {
    if (F.is_subset_of(set(m))) return m;
  }
  throw ResourceError("exhaustion cover index exceeds cap " + std::to_string(cap));
}

// --- LatticeGroup ----------------------------------------------------------------

namespace {

std::int64_t linf_norm(const Site& a) {
  std::int64_t n = 0;
  for (auto c : a.v) n = std::max<std::int64_t>(n, std::llabs(c));
  return n;
}

std::int64_t l1_norm(const Site& a) {
  std::int64_t n = 0;
  for (auto c : a.v) n += std::llabs(c);
  return n;
}

// All integer vectors with the given norm bound, enumerated in lex order.
void enumerate_box(int d, std::int64_t m, LatticeNorm norm,
                   std::vector<Site>& out) {
  std::vector<std::int64_t> coord(static_cast<std::size_t>(d), -m);
  while (true) {
    Site s{std::vector<std::int64_t>(coord)};
    if (norm == LatticeNorm::linf || l1_norm(s) <= m) out.push_back(std::move(s));
    int i = d - 1;
    while (i >= 0 && coord[static_cast<std::size_t>(i)] == m) {
      coord[static_cast<std::size_t>(i)] = -m;
      --i;
    }
    if (i < 0) break;
    ++coord[static_cast<std::size_t>(i)];
  }
}

}  // namespace

LatticeGroup::LatticeGroup(int d, LatticeNorm norm) : d_(d), norm_(norm) {
  if (d < 1 || d > 6) throw ConfigError("lattice dimension must be in [1, 6]");
  std::vector<Site> gens;
  enumerate_box(d_, 1, norm_, gens);
  gens_ = SiteSet(std::move(gens));  // includes the identity
}

Site LatticeGroup::identity() const {
  return Site{std::vector<std::int64_t>(static_cast<std::size_t>(d_), 0)};
}

Site LatticeGroup::multiply(const Site& a, const Site& b) const {
  check_site(a);
  check_site(b);
  Site out = a;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += b.v[i];
  return out;
}

Site LatticeGroup::inverse(const Site& a) const {
  check_site(a);
  Site out = a;
  for (auto& c : out.v) c = -c;
  return out;
}

std::int64_t LatticeGroup::word_norm(const Site& a) const {
  check_site(a);
  return norm_ == LatticeNorm::linf ? linf_norm(a) : l1_norm(a);
}

void LatticeGroup::check_site(const Site& a) const {
  if (static_cast<int>(a.dim()) != d_)
    throw ConfigError("site arity " + std::to_string(a.dim()) +
                      " does not match lattice dimension " + std::to_string(d_));
}

std::string LatticeGroup::describe() const {
  return "Z^" + std::to_string(d_) +
         (norm_ == LatticeNorm::linf ? " (linf word metric)" : " (l1 word metric)");
}

SiteSet LatticeGroup::folner_set(std::int64_t n) const {
  if (n < 0) throw ConfigError("folner index must be >= 0");
  std::vector<Site> out;
  enumerate_box(d_, n, LatticeNorm::linf, out);  // boxes [-n, n]^d
  return SiteSet(std::move(out));
}

SiteSet LatticeGroup::compute_ball(std::int64_t m) const {
  std::vector<Site> out;
  enumerate_box(d_, m, norm_, out);
  return SiteSet(std::move(out));
}

// --- TableGroup ------------------------------------------------------------------

namespace {

bool shortlex_less(const std::string& a, const std::string& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

}  // namespace

TableGroup::TableGroup(Data data) : data_(std::move(data)) {
  const std::size_t n = data_.names.size();
  if (n == 0) throw ConfigError("table group: empty element list");
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (!shortlex_less(data_.names[i], data_.names[i + 1]))
      throw ConfigError("table group: element normal forms must be in strict "
                        "shortlex order (violated at index " + std::to_string(i) + ")");
  if (data_.identity >= n) throw ConfigError("table group: identity index out of range");
  if (data_.mul.size() != n || data_.inv.size() != n)
    throw ConfigError("table group: mul/inv tables must match element count");
  for (const auto& row : data_.mul)
    if (row.size() != n) throw ConfigError("table group: ragged mul table");
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      auto v = data_.mul[i][j];
      if (v < -1 || v >= static_cast<std::int64_t>(n))
        throw ConfigError("table group: mul entry out of range");
    }
    if (data_.inv[i] < -1 || data_.inv[i] >= static_cast<std::int64_t>(n))
      throw ConfigError("table group: inv entry out of range");
  }
  // Identity must behave as identity wherever the table is defined.
  for (std::size_t i = 0; i < n; ++i) {
    auto ei = data_.mul[data_.identity][i];
    auto ie = data_.mul[i][data_.identity];
    if ((ei != -1 && ei != static_cast<std::int64_t>(i)) ||
        (ie != -1 && ie != static_cast<std::int64_t>(i)))
      throw ConfigError("table group: identity row/column inconsistent");
  }

  std::vector<Site> gens;
  gens.push_back(Site{{static_cast<std::int64_t>(data_.identity)}});
  for (auto gid : data_.generator_ids) {
    if (gid >= n) throw ConfigError("table group: generator index out of range");
    gens.push_back(Site{{static_cast<std::int64_t>(gid)}});
    auto ginv = data_.inv[gid];
    if (ginv == -1)
      throw ConfigError("table group: generator inverse outside the cap");
    gens.push_back(Site{{ginv}});  // enforce symmetric S
  }
  gens_ = SiteSet(std::move(gens));

  // BFS word norms over the defined part of the table.
  norms_.assign(n, -1);
  std::deque<std::size_t> queue;
  norms_[data_.identity] = 0;
  queue.push_back(data_.identity);
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    for (const Site& s : gens_) {
      auto nxt = data_.mul[static_cast<std::size_t>(s.v[0])][cur];
      if (nxt == -1) continue;
      if (norms_[static_cast<std::size_t>(nxt)] == -1) {
        norms_[static_cast<std::size_t>(nxt)] = norms_[cur] + 1;
        queue.push_back(static_cast<std::size_t>(nxt));
      }
    }
  }
}

std::shared_ptr<TableGroup> TableGroup::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open group table file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::shared_ptr<TableGroup> TableGroup::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("group table file is not valid JSON: ") + e.what());
  }
  Data data;
  try {
    data.names = j.at("elements").get<std::vector<std::string>>();
    std::string idname = j.at("identity").get<std::string>();
    auto find = [&](const std::string& name) -> std::size_t {
      for (std::size_t i = 0; i < data.names.size(); ++i)
        if (data.names[i] == name) return i;
      throw ConfigError("group table: unknown element name '" + name + "'");
    };
    data.identity = find(idname);
    for (const auto& g : j.at("generators")) data.generator_ids.push_back(find(g.get<std::string>()));
    data.mul = j.at("mul").get<std::vector<std::vector<std::int64_t>>>();
    data.inv = j.at("inv").get<std::vector<std::int64_t>>();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("group table: missing or malformed field: ") + e.what());
  }
  return std::make_shared<TableGroup>(std::move(data));
}

Site TableGroup::identity() const {
  return Site{{static_cast<std::int64_t>(data_.identity)}};
}

Site TableGroup::multiply(const Site& a, const Site& b) const {
  check_site(a);
  check_site(b);
  auto v = data_.mul[static_cast<std::size_t>(a.v[0])][static_cast<std::size_t>(b.v[0])];
  if (v == -1)
    throw ResourceError("table group: product " + name_of(a) + "*" + name_of(b) +
                        " falls outside the table cap");
  return Site{{v}};
}

Site TableGroup::inverse(const Site& a) const {
  check_site(a);
  auto v = data_.inv[static_cast<std::size_t>(a.v[0])];
  if (v == -1)
    throw ResourceError("table group: inverse of " + name_of(a) +
                        " falls outside the table cap");
  return Site{{v}};
}

std::int64_t TableGroup::word_norm(const Site& a) const {
  check_site(a);
  auto n = norms_[static_cast<std::size_t>(a.v[0])];
  if (n == -1)
    throw ResourceError("table group: element " + name_of(a) +
                        " not reachable within the table cap");
  return n;
}

void TableGroup::check_site(const Site& a) const {
  if (a.dim() != 1 || a.v[0] < 0 ||
      a.v[0] >= static_cast<std::int64_t>(data_.names.size()))
    throw ConfigError("site is not an element of this table group");
}

std::string TableGroup::describe() const {
  return "table group on " + std::to_string(data_.names.size()) + " listed elements";
}

SiteSet TableGroup::folner_set(std::int64_t n) const {
  return ball(n);
}

const std::string& TableGroup::name_of(const Site& a) const {
  check_site(a);
  return data_.names[static_cast<std::size_t>(a.v[0])];
}

bool TableGroup::is_complete() const {
  for (const auto& row : data_.mul)
    for (auto v : row)
      if (v == -1) return false;
  for (auto v : data_.inv)
    if (v == -1) return false;
  for (auto n : norms_)
    if (n == -1) return false;
  return true;
}

std::int64_t TableGroup::diameter() const {
  if (!is_complete())
    throw ResourceError("table group diameter undefined: table is partial");
  std::int64_t d = 0;
  for (auto n : norms_) d = std::max(d, n);
  return d;
}

std::shared_ptr<const GroupContext> make_lattice(int d, LatticeNorm norm) {
  return std::make_shared<LatticeGroup>(d, norm);
}

}  // namespace gibbs
