#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/group.hpp"
#include "gibbs/site.hpp"

namespace gibbs {

// Letters are natural numbers; truncated alphabets are finite subsets.
using Letter = std::uint32_t;

// A finite, sorted, duplicate-free set of letters.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Letter> letters);

  // {0, 1, ..., n-1}.
  static Alphabet prefix(Letter n);

  std::size_t size() const { return letters_.size(); }
  bool is_empty() const { return letters_.empty(); }
  bool contains(Letter a) const;
  std::ptrdiff_t index_of(Letter a) const;
  Letter operator[](std::size_t i) const { return letters_[i]; }
  Letter min_letter() const;
  Letter max_letter() const;
  auto begin() const { return letters_.begin(); }
  auto end() const { return letters_.end(); }
  const std::vector<Letter>& items() const { return letters_; }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.letters_ == b.letters_;
  }

 private:
  std::vector<Letter> letters_;
};

// A finite configuration: letters on a finite support, stored aligned with the
// support's canonical order.
class Pattern {
 public:
  Pattern() = default;
  Pattern(SiteSet support, std::vector<Letter> letters);

  static Pattern constant(const SiteSet& support, Letter a);
  static Pattern empty() { return Pattern(); }

  const SiteSet& support() const { return support_; }
  std::size_t size() const { return support_.size(); }
  bool is_empty() const { return support_.is_empty(); }
  Letter at(const Site& s) const;
  std::optional<Letter> try_at(const Site& s) const;
  Letter at_index(std::size_t i) const { return letters_[i]; }
  const std::vector<Letter>& letters() const { return letters_; }

  // Restriction to support n F.
  Pattern restrict_to(const SiteSet& F) const;
  // This pattern with `over` taking precedence on its support.
  Pattern overridden_by(const Pattern& over) const;
  // The translated pattern y with y(s g^{-1}) = this(s): the pattern seen on
  // support.g^{-1} after acting by g.
  Pattern translated(const GroupContext& ctx, const Site& g) const;

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.support_ == b.support_ && a.letters_ == b.letters_;
  }
  friend bool operator!=(const Pattern& a, const Pattern& b) { return !(a == b); }

 private:
  SiteSet support_;
  std::vector<Letter> letters_;
};

std::string to_string(const Pattern& p);

// A fully specified configuration of the countable product space that the
// library can evaluate against: a constant background letter overridden on a
// finite set. This is the certified stand-in for a point of the full shift.
class BoundaryCondition {
 public:
  BoundaryCondition() = default;
  explicit BoundaryCondition(Letter background, Pattern overrides = Pattern())
      : background_(background), overrides_(std::move(overrides)) {}

  Letter background() const { return background_; }
  const Pattern& overrides() const { return overrides_; }
  Letter at(const Site& s) const {
    auto v = overrides_.try_at(s);
    return v ? *v : background_;
  }

  BoundaryCondition overridden_by(const Pattern& p) const {
    return BoundaryCondition(background_, overrides_.overridden_by(p));
  }
  // The configuration g.x, with (g.x)(h) = x(h g): an override at s is seen
  // at s g^{-1}, which is exactly where Pattern::translated(ctx, g) moves it.
  BoundaryCondition translated(const GroupContext& ctx, const Site& g) const {
    return BoundaryCondition(background_, overrides_.translated(ctx, g));
  }

  friend bool operator==(const BoundaryCondition& a, const BoundaryCondition& b) {
    return a.background_ == b.background_ && a.overrides_ == b.overrides_;
  }

 private:
  Letter background_ = 0;
  Pattern overrides_;
};

// Enumerates all |A|^n letter tuples in canonical (odometer) order, calling fn
// with a tuple aligned to a support's canonical site order. Throws
// ResourceError when |A|^n exceeds the budget.
void for_each_tuple(const Alphabet& A, std::size_t n, std::uint64_t budget,
                    const std::function<void(const std::vector<Letter>&)>& fn);

// |A|^n with overflow saturation, for budget checks.
std::uint64_t tuple_count(std::size_t alphabet_size, std::size_t n);

}  // namespace gibbs
