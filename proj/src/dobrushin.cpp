#include "gibbs/dobrushin.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "gibbs/errors.hpp"

namespace gibbs {

Interval rho_bound_example(const CountablePottsPotential& fam, const Site& g,
                           const Site& h) {
  const GroupContext& ctx = fam.group();
  ctx.check_site(g);
  ctx.check_site(h);
  if (g == h) return Interval::zero();
  if (fam.beta() < 0.0)
    throw ConfigError("Dobrushin bounds need beta >= 0");
  const Interval couplings =
      fam.coupling_sup_base(ctx.multiply(h, ctx.inverse(g))) +
      fam.coupling_sup_base(ctx.multiply(g, ctx.inverse(h)));
  return scale_nonneg(max(couplings, Interval::zero()), 2.0 * fam.beta());
}

Interval dobrushin_constant_bound(const CountablePottsPotential& fam) {
  if (fam.beta() < 0.0)
    throw ConfigError("Dobrushin bounds need beta >= 0");
  const Interval total = max(fam.coupling_total_base(), Interval::zero());
  return scale_nonneg(total, 4.0 * fam.beta());
}

UniquenessCertificate uniqueness_certificate(const CountablePottsPotential& fam) {
  UniquenessCertificate cert;
  cert.conditions = check_example_conditions(fam);
  cert.contraction = dobrushin_constant_bound(fam);

  const Interval total = max(fam.coupling_total_base(), Interval::zero());
  if (total.hi <= 0.0) {
    cert.beta_threshold = Interval(std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity());
  } else if (total.lo > 0.0) {
    cert.beta_threshold = Interval(1.0) / scale_nonneg(total, 4.0);
  } else {
    // Coupling mass cannot be certifiably separated from zero; only the
    // contraction value itself can decide.
    cert.beta_threshold = Interval(0.0, std::numeric_limits<double>::infinity());
  }

  if (!cert.conditions.all_ok()) {
    cert.verdict = UniquenessCertificate::Verdict::inconclusive;
    cert.reason = "family admissibility conditions not certified";
  } else if (cert.contraction.hi < 1.0) {
    cert.verdict = UniquenessCertificate::Verdict::unique;
    cert.reason = "Dobrushin contraction certified below one";
  } else {
    cert.verdict = UniquenessCertificate::Verdict::inconclusive;
    cert.reason = "contraction bound does not certify uniqueness at this beta";
  }
  return cert;
}

RhoNumericResult rho_numeric(const Potential& pot, const Site& g, const Site& h,
                             const Alphabet& A, std::size_t trials,
                             std::uint64_t seed, const KernelOptions& kopts) {
  const GroupContext& ctx = pot.group();
  ctx.check_site(g);
  ctx.check_site(h);
  RhoNumericResult res;
  res.trials = trials;
  if (g == h || A.size() < 2) return res;

  SiteSet Kg;
  Kg.insert(g);
  SiteSet Kh;
  Kh.insert(h);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, A.size() - 1);
  for (std::size_t t = 0; t < trials; ++t) {
    const Letter bg = A[pick(rng)];
    const Letter a1 = A[pick(rng)];
    Letter a2 = a1;
    while (a2 == a1) a2 = A[pick(rng)];

    const KernelTable p = kernel_table(
        pot, Kg, BoundaryCondition(bg, Pattern(Kh, {a1})), A, kopts);
    const KernelTable q = kernel_table(
        pot, Kg, BoundaryCondition(bg, Pattern(Kh, {a2})), A, kopts);

    // TV >= P(B) - Q(B) for the event B of letters certifiably heavier under p.
    double lower = 0.0;
    for (std::size_t i = 0; i < p.entries.size(); ++i) {
      const double gap = p.entries[i].lo - q.entries[i].hi;
      if (gap > 0.0) lower += gap;
    }
    if (lower > res.lower) {
      res.lower = lower;
      res.background = bg;
      res.letter_a = a1;
      res.letter_b = a2;
    }
  }
  return res;
}

}  // namespace gibbs
