#include "gibbs/pattern.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace gibbs {

Alphabet::Alphabet(std::vector<Letter> letters) : letters_(std::move(letters)) {
  std::sort(letters_.begin(), letters_.end());
  letters_.erase(std::unique(letters_.begin(), letters_.end()), letters_.end());
  if (letters_.empty()) throw ConfigError("alphabet must be non-empty");
}

Alphabet Alphabet::prefix(Letter n) {
  if (n == 0) throw ConfigError("alphabet must be non-empty");
  std::vector<Letter> out(n);
  for (Letter i = 0; i < n; ++i) out[i] = i;
  return Alphabet(std::move(out));
}

bool Alphabet::contains(Letter a) const {
  return std::binary_search(letters_.begin(), letters_.end(), a);
}

std::ptrdiff_t Alphabet::index_of(Letter a) const {
  auto it = std::lower_bound(letters_.begin(), letters_.end(), a);
  if (it == letters_.end() || *it != a) return -1;
  return it - letters_.begin();
}

Letter Alphabet::min_letter() const { return letters_.front(); }
Letter Alphabet::max_letter() const { return letters_.back(); }

Pattern::Pattern(SiteSet support, std::vector<Letter> letters)
    : support_(std::move(support)), letters_(std::move(letters)) {
  if (support_.size() != letters_.size())
    throw ConfigError("pattern: letter count " + std::to_string(letters_.size()) +
                      " does not match support size " + std::to_string(support_.size()));
}

Pattern Pattern::constant(const SiteSet& support, Letter a) {
  return Pattern(support, std::vector<Letter>(support.size(), a));
}

Letter Pattern::at(const Site& s) const {
  auto v = try_at(s);
  if (!v) throw ConfigError("pattern: site " + to_string(s) + " not in support");
  return *v;
}

std::optional<Letter> Pattern::try_at(const Site& s) const {
  auto idx = support_.index_of(s);
  if (idx < 0) return std::nullopt;
  return letters_[static_cast<std::size_t>(idx)];
}

Pattern Pattern::restrict_to(const SiteSet& F) const {
  SiteSet sub = support_.set_intersection(F);
  std::vector<Letter> letters;
  letters.reserve(sub.size());
  for (const Site& s : sub) letters.push_back(at(s));
  return Pattern(std::move(sub), std::move(letters));
}

Pattern Pattern::overridden_by(const Pattern& over) const {
  SiteSet sup = support_.set_union(over.support());
  std::vector<Letter> letters;
  letters.reserve(sup.size());
  for (const Site& s : sup) {
    auto v = over.try_at(s);
    letters.push_back(v ? *v : at(s));
  }
  return Pattern(std::move(sup), std::move(letters));
}

Pattern Pattern::translated(const GroupContext& ctx, const Site& g) const {
  // New support is support.g^{-1}; the letter previously at s moves to s g^{-1}.
  Site ginv = ctx.inverse(g);
  SiteSet sup = gibbs::translate(ctx, support_, ginv);
  std::vector<Letter> letters(sup.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    Site moved = ctx.multiply(support_[i], ginv);
    auto idx = sup.index_of(moved);
    letters[static_cast<std::size_t>(idx)] = letters_[i];
  }
  return Pattern(std::move(sup), std::move(letters));
}

std::string to_string(const Pattern& p) {
  std::ostringstream os;
  os << "{";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) os << ", ";
    os << to_string(p.support()[i]) << ":" << p.at_index(i);
  }
  os << "}";
  return os.str();
}

std::uint64_t tuple_count(std::size_t alphabet_size, std::size_t n) {
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > std::numeric_limits<std::uint64_t>::max() / alphabet_size)
      return std::numeric_limits<std::uint64_t>::max();
    total *= alphabet_size;
  }
  return total;
}

void for_each_tuple(const Alphabet& A, std::size_t n, std::uint64_t budget,
                    const std::function<void(const std::vector<Letter>&)>& fn) {
  std::uint64_t total = tuple_count(A.size(), n);
  if (total > budget)
    throw ResourceError("enumeration of " + std::to_string(total) +
                        " patterns exceeds budget " + std::to_string(budget));
  std::vector<std::size_t> idx(n, 0);
  std::vector<Letter> tuple(n, n ? A[0] : Letter{0});
  for (std::uint64_t c = 0; c < total; ++c) {
    fn(tuple);
    // Odometer increment from the last position (canonical order).
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++idx[i] < A.size()) {
        tuple[i] = A[idx[i]];
        break;
      }
      idx[i] = 0;
      tuple[i] = A[0];
      if (i == 0) return;
    }
    if (n == 0) return;  // single empty tuple already visited
  }
}

}  // namespace gibbs
