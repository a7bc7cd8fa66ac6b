#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/site.hpp"

namespace gibbs {

enum class GroupKind { lattice, table };
enum class LatticeNorm { linf, l1 };

// A finitely generated group presented either as the integer lattice Z^d with
// a word metric, or as an explicit (possibly partial) multiplication table on
// normal forms. The generating set S is finite, symmetric and contains the
// identity, so S^m is the word-metric ball of radius m and the default
// exhaustion E_1 = {1}, E_{m+1} = S^m is nested and exhausting.
class GroupContext {
 public:
  virtual ~GroupContext() = default;

  virtual GroupKind kind() const = 0;
  virtual Site identity() const = 0;
  virtual Site multiply(const Site& a, const Site& b) const = 0;
  virtual Site inverse(const Site& a) const = 0;
  // Symmetric generating set, identity included.
  virtual const SiteSet& generators() const = 0;
  // Word norm w.r.t. the generating set (identity has norm 0).
  virtual std::int64_t word_norm(const Site& a) const = 0;
  // Throws ConfigError when the site does not belong to this context.
  virtual void check_site(const Site& a) const = 0;
  virtual std::string describe() const = 0;

  // Word-metric ball S^m, memoized. m = 0 gives {identity}.
  const SiteSet& ball(std::int64_t m) const;

  // Reference Folner sequence member: boxes [-n, n]^d for lattices, balls for
  // table-backed groups.
  virtual SiteSet folner_set(std::int64_t n) const = 0;

 protected:
  virtual SiteSet compute_ball(std::int64_t m) const;

 private:
  mutable std::mutex ball_mutex_;
  mutable std::vector<SiteSet> ball_cache_;  // ball_cache_[m] = S^m
};

// --- Set calculus over a context -------------------------------------------

// K * F = {k.f}.
SiteSet product_set(const GroupContext& ctx, const SiteSet& K, const SiteSet& F);

// Element-wise inverse {g^{-1} : g in F}.
SiteSet inverse_set(const GroupContext& ctx, const SiteSet& F);

// Right translate F.g = {f.g}.
SiteSet translate(const GroupContext& ctx, const SiteSet& F, const Site& g);

// K-interior: {g : K.g subseteq F}. May reach outside F when 1 not in K, but
// K here always contains the identity for word balls.
SiteSet k_interior(const GroupContext& ctx, const SiteSet& K, const SiteSet& F);

// K-exterior membership test: K.g n F = empty. (The exterior itself is
// infinite, so only the predicate is exposed.)
bool in_k_exterior(const GroupContext& ctx, const SiteSet& K, const SiteSet& F,
                   const Site& g);

// K-boundary: {g : K.g meets both F and its complement}.
SiteSet k_boundary(const GroupContext& ctx, const SiteSet& K, const SiteSet& F);

// (K, delta)-invariance: |KF delta F| < delta * |F|.
bool is_invariant(const GroupContext& ctx, const SiteSet& K, const SiteSet& F,
                  double delta);

// First n members of the reference Folner sequence (indices 1..n).
std::vector<SiteSet> folner_sets(const GroupContext& ctx, std::int64_t n);

// --- Exhaustion --------------------------------------------------------------

// The nested exhausting sequence E_1 = {1_G}, E_{m+1} = S^m used by every
// variation bound. set(m) is E_m (1-based); shells and inverse sets are the
// combinations the bounds need.
class Exhaustion {
 public:
  explicit Exhaustion(std::shared_ptr<const GroupContext> ctx)
      : ctx_(std::move(ctx)) {}

  const GroupContext& context() const { return *ctx_; }
  std::shared_ptr<const GroupContext> context_ptr() const { return ctx_; }

  // E_m = S^{m-1}; m >= 1.
  const SiteSet& set(std::int64_t m) const;
  // E_{m+1} \ E_m.
  SiteSet shell(std::int64_t m) const;
  // {g^{-1} : g in E_m}; equals E_m for symmetric word balls but computed
  // generically.
  SiteSet inverse_set_of(std::int64_t m) const;
  // Smallest m with F subseteq E_m (F finite). Throws ResourceError past cap.
  std::int64_t cover_index(const SiteSet& F, std::int64_t cap = 4096) const;

 private:
  std::shared_ptr<const GroupContext> ctx_;
};

// --- Concrete contexts -------------------------------------------------------

class LatticeGroup final : public GroupContext {
 public:
  LatticeGroup(int d, LatticeNorm norm);

  GroupKind kind() const override { return GroupKind::lattice; }
  Site identity() const override;
  Site multiply(const Site& a, const Site& b) const override;
  Site inverse(const Site& a) const override;
  const SiteSet& generators() const override { return gens_; }
  std::int64_t word_norm(const Site& a) const override;
  void check_site(const Site& a) const override;
  std::string describe() const override;
  SiteSet folner_set(std::int64_t n) const override;

  int dim() const { return d_; }
  LatticeNorm norm() const { return norm_; }

 protected:
  SiteSet compute_ball(std::int64_t m) const override;

 private:
  int d_;
  LatticeNorm norm_;
  SiteSet gens_;
};

// Table-backed group: elements are indices into a list of normal forms. The
// table may be partial (entries -1 are beyond the cap); using such an entry
// raises ResourceError rather than silently truncating.
class TableGroup final : public GroupContext {
 public:
  struct Data {
    std::vector<std::string> names;        // shortlex-sorted normal forms
    std::size_t identity = 0;
    std::vector<std::size_t> generator_ids;  // identity added if missing
    std::vector<std::vector<std::int64_t>> mul;  // -1 = outside cap
    std::vector<std::int64_t> inv;               // -1 = outside cap
  };

  explicit TableGroup(Data data);

  // Loads the JSON table format documented in README (elements, identity,
  // generators, mul, inv).
  static std::shared_ptr<TableGroup> load(const std::string& path);
  static std::shared_ptr<TableGroup> from_json_text(const std::string& text);

  GroupKind kind() const override { return GroupKind::table; }
  Site identity() const override;
  Site multiply(const Site& a, const Site& b) const override;
  Site inverse(const Site& a) const override;
  const SiteSet& generators() const override { return gens_; }
  std::int64_t word_norm(const Site& a) const override;
  void check_site(const Site& a) const override;
  std::string describe() const override;
  SiteSet folner_set(std::int64_t n) const override;

  std::size_t order() const { return data_.names.size(); }
  const std::string& name_of(const Site& a) const;
  // True when every product/inverse is defined and every element is reachable
  // from the identity (so the listed set is a whole finite group).
  bool is_complete() const;
  // Max word norm over all elements; requires a complete table.
  std::int64_t diameter() const;

 private:
  Data data_;
  SiteSet gens_;
  std::vector<std::int64_t> norms_;  // BFS word norms; -1 unreachable
};

std::shared_ptr<const GroupContext> make_lattice(int d, LatticeNorm norm);

}  // namespace gibbs
