#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <memory>

#include "gibbs/dobrushin.hpp"
#include "gibbs/errors.hpp"
#include "gibbs/group.hpp"
#include "gibbs/potentials.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<const GroupContext> line() {
  return make_lattice(1, LatticeNorm::linf);
}

CountablePottsPotential family(double beta, double amplitude = 1.0) {
  CountablePottsPotential::Params p;
  p.cost_form = CountablePottsPotential::CostForm::linear;
  p.cost_coef = 1.0;
  p.coupling_form = CountablePottsPotential::CouplingForm::geometric;
  p.amplitude = amplitude;
  p.lambda = 0.5;
  return CountablePottsPotential(line(), beta, p);
}

}  // namespace

TEST_CASE("pairwise interdependence bounds") {
  CountablePottsPotential fam = family(0.3);

  Interval diag = rho_bound_example(fam, Site{{4}}, Site{{4}});
  CHECK(diag.lo == 0.0);
  CHECK(diag.hi == 0.0);

  // Adjacent pair: 2 beta (C(1) + C(-1)) = 2 beta.
  Interval adj = rho_bound_example(fam, Site{{0}}, Site{{1}});
  CHECK(adj.contains(0.6));
  CHECK(adj.width() < 1e-12);

  // Distance three: 2 beta (C(3) + C(-3)) = beta / 2.
  Interval far = rho_bound_example(fam, Site{{0}}, Site{{3}});
  CHECK(far.contains(0.15));
  CHECK(far.width() < 1e-12);

  // Symmetric in its arguments and translation covariant.
  Interval ba = rho_bound_example(fam, Site{{1}}, Site{{0}});
  CHECK(ba.lo == adj.lo);
  CHECK(ba.hi == adj.hi);
  Interval shifted = rho_bound_example(fam, Site{{7}}, Site{{8}});
  CHECK(shifted.lo == adj.lo);
  CHECK(shifted.hi == adj.hi);

  CHECK_THROWS_AS(rho_bound_example(fam, Site{{0, 0}}, Site{{1, 0}}), ConfigError);
}

TEST_CASE("contraction constant bound") {
  // 4 beta sum_{h != 1} C(h) with total coupling mass 2.
  Interval c = dobrushin_constant_bound(family(0.1));
  CHECK(c.contains(0.8));
  CHECK(c.width() < 1e-9);

  Interval c2 = dobrushin_constant_bound(family(0.15));
  CHECK(c2.contains(1.2));

  Interval c0 = dobrushin_constant_bound(family(0.2, 0.0));
  CHECK(c0.lo >= -1e-300);
  CHECK(c0.hi <= 1e-300);
}

TEST_CASE("uniqueness certificates across the threshold") {
  UniquenessCertificate low = uniqueness_certificate(family(0.1));
  CHECK(low.unique());
  CHECK(low.conditions.all_ok());
  CHECK(low.contraction.hi < 1.0);
  CHECK(low.beta_threshold.contains(0.125));
  CHECK(low.beta_threshold.width() < 1e-9);
  CHECK(!low.reason.empty());

  UniquenessCertificate lower = uniqueness_certificate(family(0.05));
  CHECK(lower.unique());
  CHECK(lower.contraction.contains(0.4));

  UniquenessCertificate high = uniqueness_certificate(family(0.15));
  CHECK(!high.unique());
  CHECK(high.verdict == UniquenessCertificate::Verdict::inconclusive);
  CHECK(high.conditions.all_ok());  // admissible, just not contracting
  CHECK(high.contraction.hi > 1.0);
  CHECK(!high.reason.empty());
}

TEST_CASE("certificate is honest when admissibility fails") {
  // beta = 0 breaks exponential summability of the countable alphabet, so the
  // certificate must refuse even though the contraction bound is zero.
  UniquenessCertificate flat = uniqueness_certificate(family(0.0));
  CHECK(!flat.unique());
  CHECK(!flat.conditions.all_ok());
  CHECK(!flat.conditions.exp_summable);
  CHECK(flat.contraction.hi <= 1e-300);
  CHECK(!flat.reason.empty());
}

TEST_CASE("decoupled family certifies for every beta") {
  UniquenessCertificate free = uniqueness_certificate(family(3.0, 0.0));
  CHECK(free.unique());
  CHECK(free.contraction.hi <= 1e-300);
  // The coupling mass rounds to a sliver above zero, so the threshold is the
  // conservative half line rather than a point at infinity.
  CHECK(free.beta_threshold.lo >= 0.0);
  CHECK(std::isinf(free.beta_threshold.hi));
}

TEST_CASE("numeric lower bounds stay under the certified upper bound") {
  CountablePottsPotential fam = family(0.3);
  const Site g{{0}}, h{{1}};
  Alphabet A = Alphabet::prefix(3);

  RhoNumericResult num = rho_numeric(fam, g, h, A, 12, 20260814);
  Interval bound = rho_bound_example(fam, g, h);
  CHECK(num.trials == 12);
  CHECK(num.lower >= 0.0);
  CHECK(num.lower <= bound.hi + 1e-12);
  if (num.lower > 0.0) CHECK(num.letter_a != num.letter_b);

  // Same seed, same witness.
  RhoNumericResult again = rho_numeric(fam, g, h, A, 12, 20260814);
  CHECK(again.lower == num.lower);
  CHECK(again.background == num.background);

  // An exact finite-range chain has razor-thin tables, so the certified
  // discrepancy must catch the genuine nearest-neighbor influence. The best
  // witness boundary gives total variation just over 0.33 by direct softmax.
  PairPotential::Neighbor nb;
  nb.offset = Site{{1}};
  nb.J = {{1.0, -0.5}, {-0.5, 1.0}};
  PairPotential chain(line(), 0.5, {0.1, -0.2}, {nb});
  RhoNumericResult ex = rho_numeric(chain, g, h, Alphabet::prefix(2), 12, 20260814);
  CHECK(ex.lower > 0.25);
  CHECK(ex.lower < 0.34);
  CHECK(ex.letter_a != ex.letter_b);

  // A constant-spin single-site family has no interdependence at all.
  SingleSitePotential single(line(), 1.0, {0.0, -0.5, 0.25});
  RhoNumericResult none = rho_numeric(single, g, h, Alphabet::prefix(3), 8, 7);
  CHECK(none.lower == 0.0);

  RhoNumericResult same_site = rho_numeric(fam, g, g, A, 8, 7);
  CHECK(same_site.lower == 0.0);
}
