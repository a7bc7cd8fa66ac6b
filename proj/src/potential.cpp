#include "gibbs/potential.hpp"

#include <algorithm>
#include <cmath>

namespace gibbs {

VariationProfile Potential::variation_profile() const {
  VariationProfile p;
  p.delta_upper = [this](std::int64_t m) { return delta_upper(m); };
  p.tail = [this](std::int64_t m) { return variation_tail_upper(m); };
  p.oscillation_upper = oscillation_upper();
  p.summable = std::isfinite(variation_tail_upper(1));
  return p;
}

Interval phi_F(const Potential& pot, const SiteSet& F, const BoundaryCondition& x) {
  Interval total = Interval::zero();
  for (const Site& g : F) total += pot.eval(x.translated(pot.group(), g));
  return total;
}

namespace {

constexpr std::int64_t kMaxVariationDepth = 96;

// First index whose tail no longer matters: layers strictly below it are
// summed exactly and the crude |F| * tail remainder starts there, so finite
// ranges and fast-decaying couplings pay only a negligible remainder.
std::int64_t auto_depth(const Potential& pot) {
  double t1 = pot.variation_tail_upper(1);
  if (!std::isfinite(t1) || t1 == 0.0) return 1;
  for (std::int64_t m = 1; m <= kMaxVariationDepth; ++m) {
    double t = pot.variation_tail_upper(m + 1);
    if (t <= 1e-24 || t <= 1e-18 * t1) return m + 1;
  }
  return kMaxVariationDepth;
}

}  // namespace

Interval v_f_upper(const Potential& pot, const SiteSet& F, std::int64_t depth) {
  if (F.is_empty()) return Interval::zero();
  const Exhaustion& ex = pot.exhaustion();
  const GroupContext& ctx = pot.group();
  if (depth <= 0) depth = auto_depth(pot);

  Interval sum = Interval::zero();
  SiteSet prev = product_set(ctx, ex.inverse_set_of(1), F);
  for (std::int64_t m = 1; m < depth; ++m) {
    SiteSet next = product_set(ctx, ex.inverse_set_of(m + 1), F);
    std::size_t grown = next.set_difference(prev).size();
    sum += scale_nonneg(Interval(0.0, pot.delta_upper(m)),
                        static_cast<double>(grown));
    prev = std::move(next);
  }
  // Remainder: each later layer grows by at most |F| fresh sites per shell.
  double tail = pot.variation_tail_upper(depth);
  sum += scale_nonneg(Interval(0.0, tail), static_cast<double>(F.size()));
  return Interval(0.0, sum.hi);
}

Interval delta_f_upper(const Potential& pot, const SiteSet& F) {
  if (F.is_empty()) return Interval::zero();
  const Exhaustion& ex = pot.exhaustion();
  const GroupContext& ctx = pot.group();
  const double osc = pot.oscillation_upper();
  const double fsize = static_cast<double>(F.size());

  // Strategy (a): split F into the E_m-interior part (m-th variation applies)
  // and the rest (plain oscillation applies).
  double best = fsize * osc;
  std::int64_t depth = auto_depth(pot);
  depth = std::max<std::int64_t>(depth, ex.cover_index(F) + 1);
  depth = std::min<std::int64_t>(depth, kMaxVariationDepth);
  for (std::int64_t m = 1; m <= depth; ++m) {
    SiteSet inner = k_interior(ctx, ex.set(m), F).set_intersection(F);
    Interval cand =
        scale_nonneg(Interval(0.0, pot.delta_upper(m)),
                     static_cast<double>(inner.size())) +
        scale_nonneg(Interval(0.0, osc), static_cast<double>(F.size() - inner.size()));
    best = std::min(best, cand.hi);
    if (inner.size() == F.size() && pot.delta_upper(m) == 0.0) break;
  }

  // Strategy (b): V(phi) |S|^2 |SF \ F| for summable variation.
  double vtotal = pot.variation_tail_upper(1);
  if (std::isfinite(vtotal)) {
    const SiteSet& S = ctx.generators();
    SiteSet boundary = product_set(ctx, S, F).set_difference(F);
    Interval cand = scale_nonneg(
        Interval(0.0, vtotal),
        static_cast<double>(S.size()) * static_cast<double>(S.size()) *
            static_cast<double>(boundary.size()));
    best = std::min(best, cand.hi);
  }
  return Interval(0.0, best);
}

double variation_sum_from(const Potential& pot, const SiteSet& K, std::int64_t m) {
  if (K.is_empty()) return 0.0;
  const Exhaustion& ex = pot.exhaustion();
  const GroupContext& ctx = pot.group();
  std::int64_t depth = std::max(m, auto_depth(pot));

  Interval sum = Interval::zero();
  SiteSet prev = product_set(ctx, ex.inverse_set_of(m), K);
  for (std::int64_t k = m; k < depth; ++k) {
    SiteSet next = product_set(ctx, ex.inverse_set_of(k + 1), K);
    std::size_t grown = next.set_difference(prev).size();
    sum += scale_nonneg(Interval(0.0, pot.delta_upper(k)),
                        static_cast<double>(grown));
    prev = std::move(next);
  }
  sum += scale_nonneg(Interval(0.0, pot.variation_tail_upper(depth)),
                      static_cast<double>(K.size()));
  return sum.hi;
}

}  // namespace gibbs
