#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "gibbs/errors.hpp"
#include "gibbs/group.hpp"
#include "gibbs/oracles.hpp"
#include "gibbs/pattern.hpp"
#include "gibbs/potentials.hpp"
#include "gibbs/specification.hpp"
#include "gibbs/site.hpp"

using namespace gibbs;

namespace {

std::shared_ptr<const GroupContext> line() {
  return make_lattice(1, LatticeNorm::linf);
}

CountablePottsPotential::Params potts_params() {
  CountablePottsPotential::Params p;
  p.cost_form = CountablePottsPotential::CostForm::linear;
  p.cost_coef = 1.0;
  p.coupling_form = CountablePottsPotential::CouplingForm::geometric;
  p.amplitude = 1.0;
  p.lambda = 0.5;
  return p;
}

PairPotential nn_chain(std::shared_ptr<const GroupContext> ctx, double beta) {
  PairPotential::Neighbor n;
  n.offset = Site{{1}};
  n.J = {{1.0, -0.5}, {-0.5, 1.0}};
  return PairPotential(std::move(ctx), beta, {0.1, -0.2}, {n});
}

SiteSet range_set(std::int64_t lo, std::int64_t hi) {
  std::vector<Site> v;
  for (std::int64_t i = lo; i <= hi; ++i) v.push_back(Site{{i}});
  return SiteSet(std::move(v));
}

bool agree_on_window(const BoundaryCondition& a, const BoundaryCondition& b,
                     std::int64_t lo, std::int64_t hi) {
  for (std::int64_t i = lo; i <= hi; ++i)
    if (a.at(Site{{i}}) != b.at(Site{{i}})) return false;
  return true;
}

}  // namespace

TEST_CASE("swaps act coordinate-wise and are involutions") {
  auto ctx = line();
  SiteSet K = range_set(0, 1);
  Swap s(K, Pattern(K, {1, 2}), Pattern(K, {2, 1}));
  CHECK(!s.is_identity());

  BoundaryCondition x(0, Pattern(K, {1, 1}));
  BoundaryCondition tx = apply_swap(s, x, *ctx);
  CHECK(tx.at(Site{{0}}) == 2);  // matched w there
  CHECK(tx.at(Site{{1}}) == 2);  // matched v there
  CHECK(tx.at(Site{{5}}) == 0);  // fixed off K

  // Letters outside {w, v} are fixed.
  BoundaryCondition y(0, Pattern(K, {3, 1}));
  BoundaryCondition ty = apply_swap(s, y, *ctx);
  CHECK(ty.at(Site{{0}}) == 3);
  CHECK(ty.at(Site{{1}}) == 2);

  for (const BoundaryCondition& b : {x, y, BoundaryCondition(2)}) {
    BoundaryCondition twice = apply_swap(s, apply_swap(s, b, *ctx), *ctx);
    CHECK(agree_on_window(twice, b, -4, 4));
  }

  CHECK_THROWS_AS(Swap(K, Pattern(range_set(0, 2), {1, 1, 1}), Pattern(K, {2, 1})),
                  ConfigError);
}

TEST_CASE("windowed swap energies") {
  auto ctx = line();
  SiteSet K0({Site{{0}}});

  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  Swap s(K0, Pattern(K0, {1}), Pattern(K0, {0}));
  BoundaryCondition x(0, Pattern(K0, {1}));
  // Swapping 1 -> 0 at the origin raises the local energy by exactly 1.
  Interval d = energy_diff_window(pot, s, x, K0);
  CHECK(d.contains(1.0));
  CHECK(d.width() < 1e-12);

  // The identity swap never moves anything.
  Swap id(K0, Pattern(K0, {1}), Pattern(K0, {1}));
  CHECK(id.is_identity());
  Interval z = energy_diff_window(pot, id, x, range_set(-3, 3));
  CHECK(std::fabs(z.lo) <= 1e-300);
  CHECK(std::fabs(z.hi) <= 1e-300);

  // Far-away windows contribute nothing for a finite-range chain.
  PairPotential chain = nn_chain(ctx, 0.5);
  Interval far = energy_diff_window(chain, s, x, range_set(5, 7));
  CHECK(far.contains(0.0));
  CHECK(far.width() < 1e-12);
}

TEST_CASE("swap energy limits stabilize") {
  auto ctx = line();
  SiteSet K0({Site{{0}}});
  Swap s(K0, Pattern(K0, {0}), Pattern(K0, {1}));
  BoundaryCondition x(0);

  // Hand sum for the chain at beta = 1/2: cost difference -0.3 plus two
  // bond differences of -1.5 each.
  PairPotential chain = nn_chain(ctx, 0.5);
  EnergyDiff ed = energy_diff_limit(chain, s, x);
  CHECK(ed.value.contains(-1.65));
  CHECK(ed.value.width() < 1e-9);
  CHECK(ed.remainder <= 1e-300);  // finite range: the window is exact

  // Forcing wider windows must not move the finite-range answer.
  EnergyDiff w3 = energy_diff_limit(chain, s, x, 3);
  EnergyDiff w6 = energy_diff_limit(chain, s, x, 6);
  CHECK(std::fabs(w3.value.mid() - w6.value.mid()) < 1e-12);

  // Countable couplings: widening the window tightens the enclosure around
  // a common limit.
  CountablePottsPotential potts(ctx, 1.0, potts_params());
  EnergyDiff p3 = energy_diff_limit(potts, s, x, 3);
  EnergyDiff p8 = energy_diff_limit(potts, s, x, 8);
  CHECK(p8.value.width() <= p3.value.width() + 1e-12);
  CHECK(p3.value.lo <= p8.value.hi);
  CHECK(p8.value.lo <= p3.value.hi);
  CHECK(p8.remainder < p3.remainder + 1e-15);
}

TEST_CASE("kernel tables: product structure") {
  auto ctx = line();
  SiteSet K = range_set(0, 1);

  // Flat potential: the kernel is uniform with zero tail.
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  KernelTable uni = kernel_table(flat, K, BoundaryCondition(0), Alphabet::prefix(2));
  REQUIRE(uni.patterns.size() == 4);
  for (const Interval& e : uni.entries) {
    CHECK(e.contains(0.25));
    CHECK(e.width() < 1e-9);
  }
  CHECK(uni.tail_mass.hi <= 1e-12);

  // Nontrivial single-site table: entries are products of softmax weights.
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  KernelTable tab = kernel_table(pot, K, BoundaryCondition(0), Alphabet::prefix(2));
  const double p0 = 1.0 / (1.0 + std::exp(-1.0));
  for (std::size_t i = 0; i < tab.patterns.size(); ++i) {
    double expect = 1.0;
    for (std::size_t j = 0; j < 2; ++j)
      expect *= tab.patterns[i].at_index(j) == 0 ? p0 : 1.0 - p0;
    CHECK(tab.entries[i].contains(expect));
  }

  // Normalization: entries plus tail account for exactly all the mass.
  Interval total = tab.tail_mass;
  for (const Interval& e : tab.entries) total += e;
  CHECK(total.contains(1.0));

  // entry_for finds the right row.
  Pattern want(K, {1, 0});
  const Interval& row = tab.entry_for(want);
  CHECK(row.contains((1.0 - p0) * p0));

  KernelOptions tight;
  tight.budget = 2;
  CHECK_THROWS_AS(kernel_table(pot, K, BoundaryCondition(0), Alphabet::prefix(2), tight),
                  ResourceError);
  CHECK_THROWS_AS(kernel_table(pot, K, BoundaryCondition(0), Alphabet::prefix(3)),
                  ConfigError);  // letters beyond the declared alphabet
}

TEST_CASE("kernel tables: exact nearest-neighbor conditional") {
  auto ctx = line();
  PairPotential chain = nn_chain(ctx, 0.5);
  SiteSet K0({Site{{0}}});
  BoundaryCondition x(0, Pattern(SiteSet({Site{{-1}}, Site{{1}}}), {1, 0}));

  // Independent long-double softmax of the two adjacent bonds plus the site
  // term; the finite range makes this exact.
  const double f0[2] = {0.1, -0.2};
  const double J[2][2] = {{1.0, -0.5}, {-0.5, 1.0}};
  long double w[2];
  for (int a = 0; a < 2; ++a)
    w[a] = expl(0.5L * (f0[a] + J[a][0] + J[1][a]));  // x(1) = 0, x(-1) = 1
  const long double Z = w[0] + w[1];

  KernelTable tab = kernel_table(chain, K0, x, Alphabet::prefix(2));
  REQUIRE(tab.patterns.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const Letter a = tab.patterns[i].at_index(0);
    CHECK(tab.entries[i].contains(static_cast<double>(w[a] / Z)));
    CHECK(tab.entries[i].width() < 1e-9);
  }
  CHECK(tab.tail_mass.hi <= 1e-12);
}

TEST_CASE("kernel tables agree with the independent clustering oracle") {
  auto ctx = line();
  auto params = potts_params();
  CountablePottsPotential pot(ctx, 0.8, params);
  const Site g{{2}};
  BoundaryCondition x(0, Pattern(range_set(1, 4), {1, 0, 2, 1}));
  Alphabet A = Alphabet::prefix(5);

  KernelTable tab = kernel_table(pot, SiteSet({g}), x, A);
  auto orc = oracle::potts_site_conditional(*ctx, params, 0.8, g, x, A);

  long double W = 0.0;
  for (double v : orc.weights) W += v;
  const long double es = expl(static_cast<long double>(orc.slop));
  for (std::size_t i = 0; i < A.size(); ++i) {
    const Letter a = A[i];
    // Bracket the true conditional from the oracle's side.
    const long double num = static_cast<long double>(orc.weights[i]);
    const long double lo = num / es / (W * es + orc.denom_tail_hi);
    const long double hi = num * es / (W / es + orc.denom_tail_lo);
    const Interval& entry = tab.entry_for(Pattern(SiteSet({g}), {a}));
    CHECK(entry.lo <= static_cast<double>(hi));
    CHECK(entry.hi >= static_cast<double>(lo));
  }
}

TEST_CASE("kernels are proper: interior overrides are ignored") {
  auto ctx = line();
  CountablePottsPotential pot(ctx, 1.0, potts_params());
  SiteSet K = range_set(0, 1);
  BoundaryCondition x(0, Pattern(SiteSet({Site{{3}}}), {2}));
  BoundaryCondition noisy = x.overridden_by(Pattern(K, {3, 1}));

  KernelTable a = kernel_table(pot, K, x, Alphabet::prefix(3));
  KernelTable b = kernel_table(pot, K, noisy, Alphabet::prefix(3));
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].lo == b.entries[i].lo);
    CHECK(a.entries[i].hi == b.entries[i].hi);
  }
}

TEST_CASE("quasilocality: distant boundary changes fade") {
  auto ctx = line();
  CountablePottsPotential pot(ctx, 1.0, potts_params());
  SiteSet K0({Site{{0}}});
  Alphabet A = Alphabet::prefix(3);

  double prev = 1e300;
  for (std::int64_t r : {2, 4, 6}) {
    BoundaryCondition far0(0, Pattern(SiteSet({Site{{r}}}), {1}));
    BoundaryCondition far1(0, Pattern(SiteSet({Site{{r}}}), {2}));
    KernelTable ta = kernel_table(pot, K0, far0, A);
    KernelTable tb = kernel_table(pot, K0, far1, A);
    double dev = 0.0;
    for (std::size_t i = 0; i < ta.entries.size(); ++i)
      dev = std::max(dev, std::fabs(ta.entries[i].mid() - tb.entries[i].mid()));
    CHECK(dev < prev + 1e-15);
    prev = dev;
  }
  CHECK(prev < 0.01);  // influence at distance 6 is tiny
}

TEST_CASE("consistency of nested kernels") {
  auto ctx = line();
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  SiteSet K = range_set(0, 1);

  auto same = consistency_check(pot, K, K, BoundaryCondition(0), Alphabet::prefix(2));
  CHECK(same.pass);
  CHECK(same.max_gap <= 1e-12);
  CHECK(std::fabs(same.max_deviation) <= 1e-10);

  auto nested = consistency_check(pot, K, SiteSet({Site{{0}}}), BoundaryCondition(0),
                                  Alphabet::prefix(2));
  CHECK(nested.pass);
  CHECK(nested.max_gap <= 1e-12);

  CountablePottsPotential potts(ctx, 0.6, potts_params());
  auto pc = consistency_check(potts, K, SiteSet({Site{{1}}}), BoundaryCondition(1),
                              Alphabet::prefix(3));
  CHECK(pc.pass);
  CHECK(pc.max_gap <= 1e-12);
  CHECK(pc.tail_mass <= 1.0);  // clamped certified bound may saturate here

  // A wider declared prefix shrinks the certified tail bound.
  auto pc6 = consistency_check(potts, SiteSet({Site{{0}}}), SiteSet({Site{{0}}}),
                               BoundaryCondition(1), Alphabet::prefix(6));
  CHECK(pc6.pass);
  CHECK(pc6.tail_mass < pc.tail_mass + 1e-15);
}

TEST_CASE("translation behavior of kernels") {
  auto ctx = line();
  CountablePottsPotential pot(ctx, 0.9, potts_params());
  SiteSet K = range_set(0, 1);
  BoundaryCondition x(0, Pattern(SiteSet({Site{{4}}}), {2}));

  auto id = invariance_check(pot, K, x, Alphabet::prefix(3), ctx->identity());
  CHECK(id.pass);
  CHECK(id.max_gap <= 1e-12);
  CHECK(id.max_deviation <= 1e-12);

  auto shifted = invariance_check(pot, K, x, Alphabet::prefix(3), Site{{3}});
  CHECK(shifted.pass);
  CHECK(shifted.max_gap <= 1e-12);
  CHECK(shifted.max_deviation <= shifted.width_allowance + 1e-12);
}

TEST_CASE("two-sided envelope around the finite-window weights") {
  auto ctx = line();
  Alphabet A2 = Alphabet::prefix(2);

  // Flat potential: the ratio is identically one and the envelope is trivial.
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  SiteSet F = range_set(0, 1);
  auto r0 = bowen_gibbs_check(flat, F, BoundaryCondition(0), BoundaryCondition(0), A2);
  CHECK(r0.pass);
  CHECK(r0.violations == 0);
  CHECK(r0.v_f <= 1e-12);
  CHECK(r0.delta_f <= 1e-12);
  CHECK(r0.worst_low >= 1.0 - 1e-9);
  CHECK(r0.worst_high <= 1.0 + 1e-9);
  CHECK(r0.z.contains(4.0));

  // Declared two-letter family: still exact, nontrivial weights.
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  auto r1 = bowen_gibbs_check(pot, F, BoundaryCondition(1), BoundaryCondition(0), A2);
  CHECK(r1.pass);
  CHECK(r1.violations == 0);

  // Countable couplings with disagreeing boundaries.
  CountablePottsPotential potts(ctx, 0.7, potts_params());
  BoundaryCondition x(1, Pattern(SiteSet({Site{{3}}}), {2}));
  BoundaryCondition y(0);
  auto r2 = bowen_gibbs_check(potts, F, x, y, Alphabet::prefix(4));
  CHECK(r2.pass);
  CHECK(r2.violations == 0);
  CHECK(r2.v_f > 0.0);
  CHECK(r2.delta_f > 0.0);
  CHECK(r2.z.lo > 0.0);
}
