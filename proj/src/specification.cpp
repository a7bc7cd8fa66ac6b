#include "gibbs/specification.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "gibbs/errors.hpp"

namespace gibbs {

Swap::Swap(SiteSet K_, Pattern w_, Pattern v_)
    : K(std::move(K_)), w(std::move(w_)), v(std::move(v_)) {
  if (!(w.support() == K) || !(v.support() == K))
    throw ConfigError("swap patterns must be supported exactly on the swap window");
}

BoundaryCondition apply_swap(const Swap& s, const BoundaryCondition& x,
                             const GroupContext& ctx) {
  (void)ctx;
  std::vector<Letter> out;
  out.reserve(s.K.size());
  for (std::size_t i = 0; i < s.K.size(); ++i) {
    const Letter cur = x.at(s.K[i]);
    const Letter a = s.w.at_index(i);
    const Letter b = s.v.at_index(i);
    out.push_back(cur == a ? b : (cur == b ? a : cur));
  }
  return x.overridden_by(Pattern(s.K, std::move(out)));
}

Interval energy_diff_window(const Potential& pot, const Swap& s,
                            const BoundaryCondition& x, const SiteSet& F) {
  const GroupContext& ctx = pot.group();
  const BoundaryCondition tx = apply_swap(s, x, ctx);
  Interval sum = Interval::zero();
  for (const Site& g : F)
    sum += pot.eval_diff(tx.translated(ctx, g), x.translated(ctx, g));
  return sum;
}

namespace {

// Shared window policy: the smallest exhaustion index whose remainder bound is
// zero (finite range) or below tol, capped so ill-conditioned requests fail
// towards a wider certified remainder instead of spinning.
std::int64_t choose_window(const Potential& pot, const SiteSet& K, double tol) {
  if (auto k0 = pot.influence_set()) {
    SiteSet cover = *k0;
    cover.insert(pot.group().identity());
    return pot.exhaustion().cover_index(cover);
  }
  std::int64_t m = 1;
  while (m < 64 && variation_sum_from(pot, K, m) > tol) ++m;
  return m;
}

Interval clamp01(const Interval& a) { return clamp(a, 0.0, 1.0); }

double certified_gap(const Interval& a, const Interval& b) {
  return std::max(0.0, std::max(a.lo - b.hi, b.lo - a.hi));
}

}  // namespace

EnergyDiff energy_diff_limit(const Potential& pot, const Swap& s,
                             const BoundaryCondition& x, std::int64_t window,
                             double tol) {
  if (s.is_identity()) return {Interval::zero(), 0, 0.0};
  const std::int64_t m = window > 0 ? window : choose_window(pot, s.K, tol);
  const SiteSet W =
      product_set(pot.group(), pot.exhaustion().inverse_set_of(m), s.K);
  const Interval value = energy_diff_window(pot, s, x, W);
  // Sites outside E_m^{-1}K see the swap only beyond E_m, so each contributes
  // at most the matching variation; the layered sum bounds the whole tail.
  const double rem = variation_sum_from(pot, s.K, m);
  return {value + Interval(-rem, rem), m, rem};
}

const Interval& KernelTable::entry_for(const Pattern& w) const {
  if (!(w.support() == K))
    throw ConfigError("kernel lookup pattern is not supported on the kernel window");
  std::size_t idx = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::ptrdiff_t d = A.index_of(w.at_index(i));
    if (d < 0)
      throw ConfigError("kernel lookup pattern uses a letter outside the table alphabet");
    idx = idx * A.size() + static_cast<std::size_t>(d);
  }
  return entries[idx];
}

KernelTable kernel_table(const Potential& pot, const SiteSet& K,
                         const BoundaryCondition& x, const Alphabet& A,
                         const KernelOptions& opts) {
  if (K.is_empty()) throw ConfigError("kernel window must be non-empty");
  if (A.is_empty()) throw ConfigError("kernel alphabet must be non-empty");
  if (auto decl = pot.declared_alphabet()) {
    for (Letter a : A)
      if (!decl->contains(a))
        throw ConfigError("kernel alphabet reaches outside the potential's alphabet");
  }
  if (tuple_count(A.size(), K.size()) > opts.budget)
    throw ResourceError("kernel table exceeds the enumeration budget");

  const GroupContext& ctx = pot.group();
  const std::int64_t m =
      opts.window > 0 ? opts.window : choose_window(pot, K, opts.tol);
  const SiteSet W = product_set(ctx, pot.exhaustion().inverse_set_of(m), K);
  const double rem = variation_sum_from(pot, K, m);
  const Interval remI(-rem, rem);

  const Pattern vref = Pattern::constant(K, A.min_letter());
  const BoundaryCondition xv = x.overridden_by(vref);

  KernelTable out;
  out.K = K;
  out.A = A;
  out.boundary = x;
  out.window = m;

  std::vector<Interval> numerators;
  Interval denom = Interval::zero();
  for_each_tuple(A, K.size(), opts.budget, [&](const std::vector<Letter>& tup) {
    Pattern w(K, tup);
    Interval e = Interval::zero();
    if (!(w == vref)) e = energy_diff_window(pot, Swap(K, w, vref), xv, W) + remI;
    Interval num = exp(e);
    out.patterns.push_back(std::move(w));
    numerators.push_back(num);
    denom += num;
  });

  // Denominator tail over the patterns outside A^K: each swap limit stays
  // within Delta_K + V_K of sup phi_K[w'] - sup phi_K[vref], so the tail is
  // dominated by the truncation remainder of the K-site partition sum.
  out.v_k_upper = v_f_upper(pot, K).hi;
  out.delta_k_upper = delta_f_upper(pot, K).hi;
  const Interval dv = Interval(out.delta_k_upper) + Interval(out.v_k_upper);
  const Interval sup_v = pot.sup_phi_F_cylinder(K, vref, nullptr);
  const Interval R = countable_pattern_remainder(pot, K.size(), A);
  const Interval envelope = exp(Interval(0.0, dv.hi) - sup_v);
  const Interval tail_num(0.0, (envelope * R).hi);

  const Interval denom_full = denom + tail_num;
  if (!(denom_full.lo > 0.0))
    throw ConfigError("kernel denominator is not certifiably positive");

  out.entries.reserve(numerators.size());
  for (const Interval& num : numerators)
    out.entries.push_back(clamp01(num / denom_full));
  out.tail_mass = clamp01(tail_num / denom_full);
  return out;
}

ConsistencyReport consistency_check(const Potential& pot, const SiteSet& K,
                                    const SiteSet& F, const BoundaryCondition& x,
                                    const Alphabet& A, const KernelOptions& opts) {
  if (F.is_empty() || !F.is_subset_of(K))
    throw ConfigError("consistency check needs a non-empty F subseteq K");
  const KernelTable gK = kernel_table(pot, K, x, A, opts);
  const SiteSet rim = K.set_difference(F);

  ConsistencyReport rep;
  rep.tail_mass = gK.tail_mass.hi;
  rep.max_deviation = -1e300;
  const Interval tailI(0.0, gK.tail_mass.hi);

  for_each_tuple(A, rim.size(), opts.budget, [&](const std::vector<Letter>& rim_tup) {
    const Pattern ub(rim, rim_tup);
    // gamma_F only reads its boundary off F, so one inner table serves every
    // F-pattern under this rim pattern.
    const KernelTable gF = kernel_table(pot, F, x.overridden_by(ub), A, opts);

    Interval slice_mass = Interval::zero();
    std::vector<Pattern> ws;
    for_each_tuple(A, F.size(), opts.budget, [&](const std::vector<Letter>& f_tup) {
      Pattern w = ub.overridden_by(Pattern(F, f_tup));
      slice_mass += gK.entry_for(w);
      ws.push_back(std::move(w));
    });

    for (const Pattern& w : ws) {
      const Interval lhs = gK.entry_for(w);
      const Interval rhs = gF.entry_for(w.restrict_to(F)) * slice_mass + tailI;
      rep.max_gap = std::max(rep.max_gap, certified_gap(lhs, rhs));
      const double slack = 0.5 * (lhs.width() + rhs.width());
      rep.max_deviation =
          std::max(rep.max_deviation, std::abs(lhs.mid() - rhs.mid()) - slack);
    }
  });

  rep.pass = rep.max_gap == 0.0;
  return rep;
}

InvarianceReport invariance_check(const Potential& pot, const SiteSet& K,
                                  const BoundaryCondition& x, const Alphabet& A,
                                  const Site& g, const KernelOptions& opts) {
  const GroupContext& ctx = pot.group();
  const KernelTable t1 = kernel_table(pot, K, x, A, opts);
  const SiteSet K2 = translate(ctx, K, ctx.inverse(g));
  const KernelTable t2 =
      kernel_table(pot, K2, x.translated(ctx, g), A, opts);

  InvarianceReport rep;
  for (std::size_t i = 0; i < t1.patterns.size(); ++i) {
    const Interval& a = t1.entries[i];
    const Interval& b = t2.entry_for(t1.patterns[i].translated(ctx, g));
    rep.max_gap = std::max(rep.max_gap, certified_gap(a, b));
    rep.max_deviation = std::max(rep.max_deviation, std::abs(a.mid() - b.mid()));
    rep.width_allowance =
        std::max(rep.width_allowance, 0.5 * (a.width() + b.width()));
  }
  rep.pass = rep.max_gap == 0.0;
  return rep;
}

BowenGibbsReport bowen_gibbs_check(const Potential& pot, const SiteSet& F,
                                   const BoundaryCondition& x,
                                   const BoundaryCondition& y, const Alphabet& A,
                                   const KernelOptions& opts) {
  const KernelTable t = kernel_table(pot, F, x, A, opts);
  EnumOptions eo;
  eo.budget = opts.budget;
  const bool finite = pot.declared_alphabet().has_value();
  BowenGibbsReport rep;
  rep.z = finite ? partition_function(pot, F, A, eo)
                 : partition_function_countable(pot, F, A, eo);
  rep.v_f = v_f_upper(pot, F).hi;
  rep.delta_f = delta_f_upper(pot, F).hi;

  const double expo = (Interval(2.0) * Interval(rep.v_f) +
                       Interval(3.0) * Interval(rep.delta_f)).hi;
  const Interval upper_const = exp(Interval(expo));
  const Interval lower_const = exp(Interval(-expo));

  for (std::size_t i = 0; i < t.patterns.size(); ++i) {
    const Interval phi = phi_F(pot, F, y.overridden_by(t.patterns[i]));
    const Interval ratio = t.entries[i] * rep.z * exp(-phi);
    if (ratio.lo > upper_const.hi || ratio.hi < lower_const.lo) ++rep.violations;
    if (lower_const.lo > 0.0)
      rep.worst_low = std::min(rep.worst_low, ratio.hi / lower_const.lo);
    if (upper_const.hi > 0.0)
      rep.worst_high = std::max(rep.worst_high, ratio.lo / upper_const.hi);
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace gibbs
