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
#include "gibbs/site.hpp"
#include "gibbs/thermo.hpp"

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

SiteSet range_set(std::int64_t lo, std::int64_t hi) {
  std::vector<Site> v;
  for (std::int64_t i = lo; i <= hi; ++i) v.push_back(Site{{i}});
  return SiteSet(std::move(v));
}

PairPotential nn_chain(std::shared_ptr<const GroupContext> ctx, double beta) {
  PairPotential::Neighbor n;
  n.offset = Site{{1}};
  n.J = {{1.0, -0.5}, {-0.5, 1.0}};
  return PairPotential(std::move(ctx), beta, {0.1, -0.2}, {n});
}

}  // namespace

TEST_CASE("partition functions of product families") {
  auto ctx = line();
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  Interval z8 = partition_function(flat, range_set(0, 2), Alphabet::prefix(2));
  CHECK(z8.contains(8.0));
  CHECK(z8.width() < 1e-9);

  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  SiteSet two({Site{{0}}, Site{{5}}});
  Interval z = partition_function(pot, two, Alphabet::prefix(2));
  CHECK(z.contains(std::pow(1.0 + std::exp(-1.0), 2)));
  CHECK(z.width() < 1e-9);

  // Exact factorization over disjoint supports for single-site families.
  Interval za = partition_function(pot, range_set(0, 1), Alphabet::prefix(2));
  Interval zb = partition_function(pot, range_set(7, 8), Alphabet::prefix(2));
  Interval both = partition_function(pot, range_set(0, 1).set_union(range_set(7, 8)),
                                     Alphabet::prefix(2));
  Interval prod = za * zb;
  CHECK(both.lo <= prod.hi + 1e-12);
  CHECK(both.hi >= prod.lo - 1e-12);

  EnumOptions tiny;
  tiny.budget = 10;
  CHECK_THROWS_AS(partition_function(flat, range_set(0, 2), Alphabet::prefix(4), tiny),
                  ResourceError);
}

TEST_CASE("partition functions are translation invariant bit for bit") {
  auto ctx = line();
  CountablePottsPotential potts(ctx, 1.0, potts_params());
  SingleSitePotential local(ctx, 0.8, {0.3, -0.7, 0.1});
  SiteSet F = range_set(0, 2);
  SiteSet Fg = translate(*ctx, F, Site{{-31}});
  for (const Potential* pot : {static_cast<const Potential*>(&potts),
                               static_cast<const Potential*>(&local)}) {
    Interval a = partition_function(*pot, F, Alphabet::prefix(3));
    Interval b = partition_function(*pot, Fg, Alphabet::prefix(3));
    CHECK(a.lo == b.lo);
    CHECK(a.hi == b.hi);
  }
}

TEST_CASE("countable partition sums") {
  auto ctx = line();
  CountablePottsPotential potts(ctx, 1.0, potts_params());
  SiteSet F0({Site{{0}}});
  const double z1 = 1.0 / (1.0 - std::exp(-1.0));

  Interval z = partition_function_countable(potts, F0, Alphabet::prefix(8));
  CHECK(z.contains(z1));
  CHECK(z.width() < 1e-2);

  // Enlarging the kept alphabet tightens the enclosure around the same value.
  Interval z14 = partition_function_countable(potts, F0, Alphabet::prefix(14));
  CHECK(z14.contains(z1));
  CHECK(z14.width() < z.width());

  // For declared-finite families the remainder is empty and the countable
  // route agrees with plain enumeration.
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  SiteSet two = range_set(0, 1);
  Interval fin = partition_function(pot, two, Alphabet::prefix(2));
  Interval cnt = partition_function_countable(pot, two, Alphabet::prefix(2));
  CHECK(std::fabs(fin.lo - cnt.lo) < 1e-12);
  CHECK(std::fabs(fin.hi - cnt.hi) < 1e-12);

  Interval rem = countable_pattern_remainder(pot, 2, Alphabet::prefix(2));
  CHECK(rem.lo == 0.0);
  CHECK(rem.hi <= 1e-12);  // zero tail up to outward rounding
  Interval pr = countable_pattern_remainder(potts, 2, Alphabet::prefix(12));
  CHECK(pr.lo == 0.0);
  CHECK(pr.hi > 0.0);
  CHECK(pr.hi < 1e-4);
}

TEST_CASE("pressure upper bounds") {
  auto ctx = line();
  std::vector<SiteSet> candidates = {ctx->ball(0), ctx->ball(1), ctx->ball(2)};

  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  auto up = pressure_upper(flat, candidates, Alphabet::prefix(2), false);
  CHECK(up.upper >= std::log(2.0) - 1e-12);
  CHECK(up.upper <= std::log(2.0) + 1e-6);
  REQUIRE(up.per_candidate.size() == 3);
  for (double v : up.per_candidate) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Single-site families factorize, so every window gives the same bound.
  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  auto up2 = pressure_upper(pot, candidates, Alphabet::prefix(2), false);
  const double exact = std::log(1.0 + std::exp(-1.0));
  CHECK(up2.upper >= exact - 1e-12);
  CHECK(up2.upper <= exact + 1e-6);
  CHECK(up2.witness < candidates.size());

  // Nearest-neighbor chain: the bound sits above an independent transfer
  // operator enclosure and improves (or stays) with longer windows.
  PairPotential chain = nn_chain(ctx, 0.5);
  auto up3 = pressure_upper(chain, candidates, Alphabet::prefix(2), false);
  auto tm = oracle::transfer_matrix_pressure({0.1, -0.2}, {{1.0, -0.5}, {-0.5, 1.0}}, 0.5);
  CHECK(up3.upper >= tm.log_lambda.lo - 1e-9);
  CHECK(up3.upper <= up3.per_candidate[0] + 1e-12);
}

TEST_CASE("entropy enclosures") {
  CHECK(entropy({0.5, 0.5}).contains(std::log(2.0)));
  Interval point = entropy({1.0, 0.0});
  CHECK(point.contains(0.0));
  CHECK(point.width() < 1e-12);
  CHECK(entropy({0.25, 0.75}).contains(0.5623351446188083));
  CHECK(entropy({0.25, 0.75}).width() < 1e-12);
  CHECK_THROWS_AS(entropy({-0.1, 1.1}), ConfigError);
}

TEST_CASE("mean energy under product measures") {
  auto ctx = line();
  CountablePottsPotential potts(ctx, 1.0, potts_params());
  CHECK(mean_energy(potts, Alphabet::prefix(4), {0.0, 1.0, 0.0, 0.0}).contains(-3.0));
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  Interval z = mean_energy(flat, Alphabet::prefix(2), {0.5, 0.5});
  CHECK(z.contains(0.0));
  CHECK(z.width() < 1e-12);
}

TEST_CASE("pressure lower bounds and the bracket sandwich") {
  auto ctx = line();
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  auto low = pressure_lower(flat, Alphabet::prefix(2));
  CHECK(low.lower <= std::log(2.0) + 1e-12);
  CHECK(low.lower >= std::log(2.0) - 1e-6);
  REQUIRE(low.q.size() == 2);
  CHECK(low.q[0] == doctest::Approx(0.5).epsilon(1e-3));

  SingleSitePotential pot(ctx, 1.0, {0.0, -1.0});
  auto low2 = pressure_lower(pot, Alphabet::prefix(2));
  const double exact = std::log(1.0 + std::exp(-1.0));
  CHECK(low2.lower <= exact + 1e-12);
  CHECK(low2.lower >= exact - 1e-6);
  // The optimal product weight is the single-site softmax.
  CHECK(low2.q[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-3));

  // Sandwich against the matching upper bound.
  auto up = pressure_upper(pot, {ctx->ball(0), ctx->ball(1)}, Alphabet::prefix(2), false);
  CHECK(low2.lower <= up.upper + 1e-12);
  CHECK(up.upper - low2.lower < 1e-6);

  // Nearest-neighbor chain: certified bracket around the transfer enclosure.
  PairPotential chain = nn_chain(ctx, 0.5);
  auto lo3 = pressure_lower(chain, Alphabet::prefix(2));
  auto up3 = pressure_upper(chain, {ctx->ball(1), ctx->ball(2)}, Alphabet::prefix(2), false);
  auto tm = oracle::transfer_matrix_pressure({0.1, -0.2}, {{1.0, -0.5}, {-0.5, 1.0}}, 0.5);
  CHECK(lo3.lower <= tm.log_lambda.hi + 1e-9);
  CHECK(up3.upper >= tm.log_lambda.lo - 1e-9);
  CHECK(lo3.lower <= up3.upper);
}

TEST_CASE("certified bracket for the countable family") {
  auto ctx = line();
  // Zero coupling: the sites decouple and the pressure is exactly
  // log sum_a e^{-a} = log(1 / (1 - e^{-1})).
  auto params = potts_params();
  params.coupling_form = CountablePottsPotential::CouplingForm::zero;
  CountablePottsPotential free(ctx, 1.0, params);
  BracketOptions opts;
  opts.max_radius = 1;
  opts.countable = true;
  opts.ladder = {2, 4, 6};
  auto br = pressure_bracket(free, Alphabet::prefix(8), opts);
  const double exact = std::log(1.0 / (1.0 - std::exp(-1.0)));
  CHECK(br.lower <= exact);
  CHECK(br.upper >= exact);
  CHECK(br.upper - br.lower < 0.01);
  REQUIRE(br.ladder.size() == 3);
  for (std::size_t i = 0; i < br.ladder.size(); ++i) {
    CHECK(br.ladder[i].alphabet_size == opts.ladder[i]);
    // Finite-alphabet restrictions sit below the full countable bound.
    CHECK(br.ladder[i].upper <= br.upper + 1e-6);
  }

  // Couplings only lower the energy here, so the bracket stays ordered and
  // sits below the decoupled pressure.
  CountablePottsPotential coupled(ctx, 1.0, potts_params());
  auto cb = pressure_bracket(coupled, Alphabet::prefix(8), opts);
  CHECK(cb.lower <= cb.upper);
  CHECK(cb.upper < exact);

  // Flat potential: the bracket collapses onto log |A|.
  SingleSitePotential flat(ctx, 1.0, {0.0, 0.0});
  BracketOptions fo;
  fo.max_radius = 1;
  fo.countable = false;
  auto fb = pressure_bracket(flat, Alphabet::prefix(2), fo);
  CHECK(fb.lower <= std::log(2.0) + 1e-12);
  CHECK(fb.upper >= std::log(2.0) - 1e-12);
  CHECK(fb.upper - fb.lower < 1e-6);
}

TEST_CASE("cover subadditivity checks") {
  auto ctx = line();
  PairPotential chain = nn_chain(ctx, 0.4);
  Alphabet A = Alphabet::prefix(2);

  // Trivial cover by the set itself: both sides are the same quantity, so
  // nothing can certify strictly, but a violation would be a bug.
  SiteSet F = range_set(0, 1);
  auto triv = shearer_check(chain, F, {F}, A);
  CHECK(triv.k == 1);
  CHECK(!triv.violated_certified);
  CHECK(triv.lhs.lo <= triv.rhs.hi);

  // Cutting the bond between 0 and 1 overcounts its weight, so the product
  // bound holds with certified slack.
  auto cut = shearer_check(chain, F, {range_set(0, 0), range_set(1, 1)}, A);
  CHECK(cut.k == 1);
  CHECK(cut.holds_certified);
  CHECK(!cut.violated_certified);

  // Disjoint split of a disconnected window: equality again, never violated.
  SiteSet two = range_set(0, 1).set_union(range_set(5, 6));
  auto split = shearer_check(chain, two, {range_set(0, 1), range_set(5, 6)}, A);
  CHECK(split.k == 1);
  CHECK(!split.violated_certified);
  CHECK(split.lhs.lo <= split.rhs.hi);

  // Overlapping cover with multiplicity 2 on a window of five sites.
  SiteSet F5 = range_set(0, 4);
  std::vector<SiteSet> cover = {range_set(0, 2), range_set(2, 4),
                                range_set(0, 1).set_union(range_set(3, 4))};
  auto over = shearer_check(chain, F5, cover, A);
  CHECK(over.k == 2);
  CHECK(over.holds_certified);
  CHECK(!over.violated_certified);
  CHECK(over.lhs.lo <= over.rhs.hi);

  CountablePottsPotential potts(ctx, 0.7, potts_params());
  auto pc = shearer_check(potts, F, {range_set(0, 0), range_set(1, 1)}, Alphabet::prefix(3));
  CHECK(pc.holds_certified);
}

TEST_CASE("pattern sums are thread-count independent") {
  auto ctx = line();
  CountablePottsPotential potts(ctx, 1.0, potts_params());
  SiteSet F = range_set(0, 5);
  EnumOptions one;
  one.threads = 1;
  EnumOptions four;
  four.threads = 4;
  Interval a = partition_function(potts, F, Alphabet::prefix(4), one);
  Interval b = partition_function(potts, F, Alphabet::prefix(4), four);
  CHECK(a.lo == b.lo);
  CHECK(a.hi == b.hi);
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}
